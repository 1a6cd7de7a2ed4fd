import { describe, expect, it } from "vitest";

import {
  EmptyInputError,
  parseSweepTable,
  SchemaError,
} from "../src/schema.js";
import { COLUMNS, csvText } from "./fixtures.js";

describe("parseSweepTable", () => {
  it("round-trips metadata and values exactly", () => {
    const text = csvText([
      { observable: "photon_number", value: 17.6870123456 },
      { observable: "g2_zero", value: 1.0058 },
    ]);
    const table = parseSweepTable(text);
    expect(table.meta.schema_version).toBe("1");
    expect(table.meta.config_hash).toBe("0123456789abcdef");
    expect(table.rows).toHaveLength(2);
    expect(table.rows[0].value).toBe(17.6870123456);
    expect(table.rows[0].method).toBe("exact");
  });

  it("raises a schema error naming a renamed column", () => {
    const renamed = COLUMNS.map((c) =>
      c === "standard_error" ? "stderr" : c
    ).join(",");
    const text = csvText([{ observable: "photon_number", value: 1 }], renamed);
    expect(() => parseSweepTable(text)).toThrowError(SchemaError);
    expect(() => parseSweepTable(text)).toThrowError(/standard_error/);
  });

  it("raises a schema error on malformed numeric cells", () => {
    const good = csvText([{ observable: "photon_number", value: 1 }]);
    const bad = good.replace("photon_number,1,", "photon_number,banana,");
    expect(() => parseSweepTable(bad)).toThrowError(SchemaError);
    expect(() => parseSweepTable(bad)).toThrowError(/value/);
  });

  it("rejects unknown method tags", () => {
    const text = csvText([
      { observable: "photon_number", value: 1, method: "guesswork" },
    ]);
    expect(() => parseSweepTable(text)).toThrowError(SchemaError);
  });

  it("flags empty inputs explicitly", () => {
    expect(() => parseSweepTable("")).toThrowError(EmptyInputError);
    expect(() => parseSweepTable(csvText([]))).toThrowError(EmptyInputError);
  });

  it("maps undefined flags and blank values to nulls", () => {
    const table = parseSweepTable(
      csvText([
        { observable: "ozz_ratio", value: "", undefined: true, site_m: 2, site_l: 3 },
      ])
    );
    expect(table.rows[0].value).toBeNull();
    expect(table.rows[0].undefined).toBe(true);
    expect(table.rows[0].site_m).toBe(2);
  });
});
