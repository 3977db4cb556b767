#!/usr/bin/env node
/** CLI: table <run_dir>... -o table.md */

import * as fs from "node:fs";
import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { loadReportOnlyRun, RunArtifact } from "./artifacts.js";
import { renderSuccessTable } from "./table.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .usage("table <run_dir>... -o <table.md>")
    .option("output", {
      alias: "o",
      type: "string",
      demandOption: true,
      describe: "output markdown path",
    })
    .demandCommand(1, "at least one run directory is required")
    .strictOptions()
    .exitProcess(false)
    .parseSync();
  if (args.help || args.version) return 0;
  const runs: RunArtifact[] = args._.map(String).map(loadReportOnlyRun);
  const table = renderSuccessTable(runs);
  fs.writeFileSync(args.output, table);
  console.log(`wrote ${args.output}: ${runs.length} run(s)`);
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
