/**
 * Parsing and validation of the simulator's sweep CSV files.
 *
 * The CSV is the contract with the simulation package: a `#`-prefixed
 * metadata block, one header row, then records. Nothing in this package
 * recomputes physics; every plotted number comes out of these rows.
 */

import Papa from "papaparse";
import { z } from "zod";

export const EXPECTED_COLUMNS = [
  "L",
  "U_over_J",
  "P_over_J",
  "g_over_J",
  "kappa_over_J",
  "n_max",
  "method",
  "observable",
  "value",
  "standard_error",
  "site_m",
  "site_l",
  "eigen_index",
  "energy_over_J",
  "magnetization",
  "is_bright",
  "is_top3",
  "undefined",
] as const;

export class SchemaError extends Error {}
export class EmptyInputError extends Error {}

const numeric = z
  .string()
  .regex(/^-?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/, "not a number")
  .transform(Number);
const optionalNumeric = z
  .union([z.literal(""), numeric])
  .transform((v) => (v === "" ? null : v));
const flag = z
  .enum(["", "0", "1"])
  .transform((v) => (v === "" ? null : v === "1"));

const rowSchema = z.object({
  L: numeric,
  U_over_J: numeric,
  P_over_J: numeric,
  g_over_J: numeric,
  kappa_over_J: numeric,
  n_max: numeric,
  method: z.enum(["exact", "jump", "diffusive"]),
  observable: z.string().min(1),
  value: optionalNumeric,
  standard_error: optionalNumeric,
  site_m: optionalNumeric,
  site_l: optionalNumeric,
  eigen_index: optionalNumeric,
  energy_over_J: optionalNumeric,
  magnetization: optionalNumeric,
  is_bright: flag,
  is_top3: flag,
  undefined: flag,
});

export type SweepRecord = z.infer<typeof rowSchema>;

export interface SweepTable {
  meta: Record<string, string>;
  rows: SweepRecord[];
}

/** Parse the full data-file text: metadata block, header check, rows. */
export function parseSweepTable(text: string): SweepTable {
  const meta: Record<string, string> = {};
  const dataLines: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const body = line.slice(1);
      const sep = body.indexOf(":");
      if (sep >= 0) meta[body.slice(0, sep).trim()] = body.slice(sep + 1).trim();
    } else if (line.trim() !== "") {
      dataLines.push(line);
    }
  }
  if (dataLines.length === 0) {
    throw new EmptyInputError("data file contains no header row");
  }
  const parsed = Papa.parse<Record<string, string>>(dataLines.join("\n"), {
    header: true,
    skipEmptyLines: true,
  });
  const header = parsed.meta.fields ?? [];
  for (const column of EXPECTED_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`missing required column '${column}'`);
    }
  }
  const rows: SweepRecord[] = [];
  for (const [i, raw] of parsed.data.entries()) {
    const result = rowSchema.safeParse(raw);
    if (!result.success) {
      const issue = result.error.issues[0];
      throw new SchemaError(
        `row ${i + 1}: column '${issue.path.join(".")}': ${issue.message}`
      );
    }
    rows.push(result.data);
  }
  if (rows.length === 0) {
    throw new EmptyInputError("data file contains a header but no rows");
  }
  return { meta, rows };
}

export function filterRows(
  rows: SweepRecord[],
  pred: Partial<Record<"observable" | "method", string>> & { L?: number }
): SweepRecord[] {
  return rows.filter(
    (r) =>
      (pred.observable === undefined || r.observable === pred.observable) &&
      (pred.method === undefined || r.method === pred.method) &&
      (pred.L === undefined || r.L === pred.L)
  );
}
