/**
 * Learning-curve assembly: group runs by algorithm, align their
 * periodic evaluations, and reduce across seeds to a mean line with a
 * min-max band, plotted against cumulative environment primitive
 * steps.
 */

import * as path from "node:path";
import { RunArtifact } from "./artifacts.js";

export interface CurvePoint {
  /** Cumulative env primitive steps, averaged across seeds. */
  steps: number;
  mean: number;
  min: number;
  max: number;
}

export interface AlgoCurve {
  algo: string;
  seeds: number[];
  points: CurvePoint[];
}

/** Cumulative env steps at each evaluation episode of one run. */
function evalSeries(run: RunArtifact): { steps: number; rate: number }[] {
  if (run.evalLog.length === 0) {
    throw new Error(
      `${path.join(run.dir, "eval_log.csv")}: empty evaluation log`,
    );
  }
  const stepsByEpisode = new Map<number, number>();
  for (const row of run.trainLog) {
    stepsByEpisode.set(row.episode, row.env_primitive_steps);
  }
  return run.evalLog.map((row) => {
    const steps = stepsByEpisode.get(row.episode_at_eval);
    if (steps === undefined) {
      throw new Error(
        `${path.join(run.dir, "eval_log.csv")}: evaluation at episode ` +
          `${row.episode_at_eval} has no matching train_log row`,
      );
    }
    return { steps, rate: row.success_rate };
  });
}

/**
 * One curve per algorithm; runs of the same algorithm must share the
 * evaluation schedule so points can be reduced index-by-index.
 * Algorithms are ordered by first appearance in the input.
 */
export function buildCurves(runs: RunArtifact[]): AlgoCurve[] {
  if (runs.length === 0) {
    throw new Error("no run directories given");
  }
  const groups = new Map<string, RunArtifact[]>();
  for (const run of runs) {
    const algo = run.manifest.algo;
    const group = groups.get(algo);
    if (group === undefined) groups.set(algo, [run]);
    else group.push(run);
  }
  const curves: AlgoCurve[] = [];
  for (const [algo, group] of groups) {
    const series = group.map(evalSeries);
    const n = series[0].length;
    for (let g = 1; g < series.length; g++) {
      if (series[g].length !== n) {
        throw new Error(
          `${algo}: evaluation schedules differ across runs ` +
            `(${group[0].dir}: ${n} points, ${group[g].dir}: ${series[g].length})`,
        );
      }
    }
    const points: CurvePoint[] = [];
    for (let i = 0; i < n; i++) {
      const rates = series.map((s) => s[i].rate);
      const steps = series.map((s) => s[i].steps);
      points.push({
        steps: steps.reduce((a, b) => a + b, 0) / steps.length,
        mean: rates.reduce((a, b) => a + b, 0) / rates.length,
        min: Math.min(...rates),
        max: Math.max(...rates),
      });
    }
    curves.push({
      algo,
      seeds: group.map((r) => r.manifest.seed),
      points,
    });
  }
  return curves;
}
