/**
 * Run-directory loading and validation.
 *
 * A run directory is the unit of input for every report: it holds
 * `run_manifest.json` plus the CSV logs written by the training
 * harness.  Loading is strict about the documented CSV contract so a
 * column drift fails with a diagnostic naming the offending file
 * instead of producing a silently wrong figure.  Everything here is
 * read-only.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import Papa from "papaparse";

export const TRAIN_LOG_COLUMNS = [
  "episode",
  "env_primitive_steps",
  "return",
  "success",
  "sigma",
  "epsilon",
  "loss_q1",
  "loss_q2",
  "loss_actor",
] as const;

export const EVAL_LOG_COLUMNS = [
  "episode_at_eval",
  "trials",
  "success_rate",
  "mean_primitives",
  "mean_return",
] as const;

export const EVAL_REPORT_COLUMNS = [
  "trial",
  "seed",
  "success",
  "primitives_used",
  "final_error_norm",
] as const;

export interface Manifest {
  algo: string;
  task: string;
  seed: number;
  horizon: number;
  [key: string]: unknown;
}

export interface TrainRow {
  episode: number;
  env_primitive_steps: number;
  return: number;
  success: number;
}

export interface EvalRow {
  episode_at_eval: number;
  trials: number;
  success_rate: number;
  mean_primitives: number;
  mean_return: number;
}

export interface ReportRow {
  trial: number;
  seed: number;
  success: number;
  primitives_used: number;
  final_error_norm: number;
}

export interface RunArtifact {
  dir: string;
  manifest: Manifest;
  trainLog: TrainRow[];
  evalLog: EvalRow[];
  /** Per-trial final evaluation; null when the run has no report. */
  evalReport: ReportRow[] | null;
}

function parseCsv(
  filePath: string,
  expectedColumns: readonly string[],
): Record<string, number>[] {
  let text: string;
  try {
    text = fs.readFileSync(filePath, "utf8");
  } catch {
    throw new Error(`missing CSV file: ${filePath}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${filePath}: CSV parse error: ${first.message}`);
  }
  const got = parsed.meta.fields ?? [];
  if (
    got.length !== expectedColumns.length ||
    expectedColumns.some((c, i) => got[i] !== c)
  ) {
    throw new Error(
      `${filePath}: header mismatch: expected [${expectedColumns.join(",")}]` +
        ` got [${got.join(",")}]`,
    );
  }
  return parsed.data.map((row) => {
    const out: Record<string, number> = {};
    for (const col of expectedColumns) {
      out[col] = Number(row[col]);
    }
    return out;
  });
}

function readManifest(dir: string): Manifest {
  const manifestPath = path.join(dir, "run_manifest.json");
  let raw: string;
  try {
    raw = fs.readFileSync(manifestPath, "utf8");
  } catch {
    throw new Error(`missing manifest: ${manifestPath}`);
  }
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch (err) {
    throw new Error(`${manifestPath}: invalid JSON: ${(err as Error).message}`);
  }
  const manifest = data as Manifest;
  for (const field of ["algo", "task", "seed", "horizon"] as const) {
    if (manifest[field] === undefined) {
      throw new Error(`${manifestPath}: manifest is missing field "${field}"`);
    }
  }
  return manifest;
}

/** Load one run directory, validating the CSV contract. */
export function loadRun(dir: string): RunArtifact {
  if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
    throw new Error(`not a run directory: ${dir}`);
  }
  const manifest = readManifest(dir);
  const trainLog = parseCsv(
    path.join(dir, "train_log.csv"),
    TRAIN_LOG_COLUMNS,
  ) as unknown as TrainRow[];
  const evalLog = parseCsv(
    path.join(dir, "eval_log.csv"),
    EVAL_LOG_COLUMNS,
  ) as unknown as EvalRow[];
  const reportPath = path.join(dir, "eval_report.csv");
  const evalReport = fs.existsSync(reportPath)
    ? (parseCsv(reportPath, EVAL_REPORT_COLUMNS) as unknown as ReportRow[])
    : null;
  return { dir, manifest, trainLog, evalLog, evalReport };
}

/**
 * Load a run directory that may lack training logs (transfer runs in
 * direct mode write only a manifest and a final report).
 */
export function loadReportOnlyRun(dir: string): RunArtifact {
  const manifest = readManifest(dir);
  const reportPath = path.join(dir, "eval_report.csv");
  const evalReport = parseCsv(
    reportPath,
    EVAL_REPORT_COLUMNS,
  ) as unknown as ReportRow[];
  return { dir, manifest, trainLog: [], evalLog: [], evalReport };
}

/** Mean success over the per-trial final report of one run. */
export function reportSuccessRate(run: RunArtifact): number {
  const report = run.evalReport;
  if (report === null || report.length === 0) {
    throw new Error(`${path.join(run.dir, "eval_report.csv")}: no trials`);
  }
  let total = 0;
  for (const row of report) total += row.success;
  return total / report.length;
}
