#!/usr/bin/env node
/** CLI: plot-curves <run_dir>... -o fig.svg */

import * as fs from "node:fs";
import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadRun } from "./artifacts.js";
import { buildCurves } from "./curves.js";
import { renderCurveFigure } from "./svg.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("plot-curves <run_dir>... -o <fig.svg>")
    .option("output", {
      alias: "o",
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .demandCommand(1, "at least one run directory is required")
    .strictOptions()
    .exitProcess(false)
    .parseSync();
  if (args.help || args.version) return 0;
  const dirs = args._.map(String);
  const curves = buildCurves(dirs.map(loadRun));
  fs.writeFileSync(args.output, renderCurveFigure(curves));
  console.log(
    `wrote ${args.output}: ${dirs.length} run(s), ${curves.length} algorithm curve(s)`,
  );
  return 0;
}

function isMainModule(): boolean {
  if (process.argv[1] === undefined) return false;
  try {
    return fileURLToPath(import.meta.url) === fs.realpathSync(process.argv[1]);
  } catch {
    return false;
  }
}

if (isMainModule()) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exitCode = 1;
  }
}
