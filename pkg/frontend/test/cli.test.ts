import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { main, renderPreset } from "../src/cli.js";
import { csvText, spectrumRows } from "./fixtures.js";

let dir: string;

beforeEach(() => {
  dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
});

afterEach(() => {
  fs.rmSync(dir, { recursive: true, force: true });
});

describe("plot CLI", () => {
  it("renders a preset CSV to an SVG file", async () => {
    fs.writeFileSync(path.join(dir, "fig6.csv"), csvText(spectrumRows()));
    const code = await main(["--preset", "fig6", "--data", dir, "--out", dir]);
    expect(code).toBe(0);
    const svg = fs.readFileSync(path.join(dir, "fig6.svg"), "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("exits 2 on a schema violation", async () => {
    const broken = csvText(spectrumRows()).replace("is_bright", "bright");
    fs.writeFileSync(path.join(dir, "fig6.csv"), broken);
    const code = await main(["--preset", "fig6", "--data", dir, "--out", dir]);
    expect(code).toBe(2);
  });

  it("exits 2 when the data file is missing", async () => {
    const code = await main(["--preset", "fig3", "--data", dir, "--out", dir]);
    expect(code).toBe(2);
  });

  it("exits 3 on empty data", async () => {
    fs.writeFileSync(path.join(dir, "fig6.csv"), csvText([]));
    const code = await main(["--preset", "fig6", "--data", dir, "--out", dir]);
    expect(code).toBe(3);
  });

  it("writes byte-identical output for identical input", () => {
    fs.writeFileSync(path.join(dir, "fig5.csv"), csvText(spectrumRows()));
    const a = fs.readFileSync(renderPreset("fig5", dir, path.join(dir, "a")));
    const b = fs.readFileSync(renderPreset("fig5", dir, path.join(dir, "b")));
    expect(a.equals(b)).toBe(true);
  });
});
