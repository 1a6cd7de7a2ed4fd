/**
 * plot --preset <name> --data <dir> --out <dir>
 *
 * Reads the simulator's `<preset>.csv` from the data directory, validates
 * it against the CSV schema, and writes `<preset>.svg` to the output
 * directory. Exit codes: 0 success, 2 schema/usage error, 3 empty input.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { buildFigure, PRESETS, PresetName } from "./figures.js";
import { EmptyInputError, parseSweepTable, SchemaError } from "./schema.js";

export function renderPreset(
  preset: PresetName,
  dataDir: string,
  outDir: string
): string {
  const csvPath = path.join(dataDir, `${preset}.csv`);
  if (!fs.existsSync(csvPath)) {
    throw new SchemaError(`data file not found: ${csvPath}`);
  }
  const table = parseSweepTable(fs.readFileSync(csvPath, "utf-8"));
  const svg = buildFigure(preset, table.rows);
  fs.mkdirSync(outDir, { recursive: true });
  const outPath = path.join(outDir, `${preset}.svg`);
  fs.writeFileSync(outPath, svg);
  return outPath;
}

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .option("preset", {
      type: "string",
      demandOption: true,
      choices: PRESETS,
      describe: "figure preset matching the simulation preset name",
    })
    .option("data", {
      type: "string",
      demandOption: true,
      describe: "directory containing <preset>.csv",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output directory for <preset>.svg",
    })
    .strict()
    .fail((msg) => {
      throw new SchemaError(msg ?? "invalid arguments");
    })
    .parse();

  try {
    const outPath = renderPreset(args.preset as PresetName, args.data, args.out);
    console.log(`wrote ${outPath}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof EmptyInputError) {
      console.error(`empty input: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] && path.resolve(process.argv[1]) === path.resolve(
    new URL(import.meta.url).pathname
  );
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
