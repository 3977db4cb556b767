/**
 * Minimal deterministic SVG line-figure renderer.
 *
 * Byte-stable output is a hard requirement (golden-file tests diff the
 * figure verbatim), so everything is fixed: canvas size, palette,
 * tick selection, and number formatting.  No timestamps, no random
 * ids, no environment-dependent fonts in the geometry.
 */

import { AlgoCurve } from "./curves.js";

const WIDTH = 720;
const HEIGHT = 460;
const MARGIN = { top: 24, right: 168, bottom: 52, left: 64 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

/** Fixed-point coordinate formatting keeps the output byte-stable. */
function px(value: number): string {
  return value.toFixed(2);
}

/** Tick positions at a 1/2/5 x 10^k step covering [0, maxValue]. */
function niceTicks(maxValue: number, targetCount: number): number[] {
  if (maxValue <= 0) return [0, 1];
  const rough = maxValue / targetCount;
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  let step = power;
  for (const mult of [1, 2, 5, 10]) {
    step = mult * power;
    if (step >= rough) break;
  }
  const ticks: number[] = [];
  for (let v = 0; v <= maxValue + step * 1e-9; v += step) {
    ticks.push(Math.round(v / step) * step);
  }
  return ticks;
}

function tickLabel(value: number): string {
  return Number.isInteger(value) ? String(value) : String(Number(value.toFixed(6)));
}

/** Render algorithm learning curves (mean line, min-max band). */
export function renderCurveFigure(curves: AlgoCurve[]): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const maxSteps = Math.max(
    1,
    ...curves.flatMap((c) => c.points.map((p) => p.steps)),
  );
  const xTicks = niceTicks(maxSteps, 6);
  const xMax = Math.max(maxSteps, xTicks[xTicks.length - 1]);
  const sx = (steps: number) => MARGIN.left + (steps / xMax) * plotW;
  const sy = (rate: number) => MARGIN.top + (1 - rate) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);

  // gridlines and axes
  for (let i = 0; i <= 5; i++) {
    const rate = i / 5;
    const y = px(sy(rate));
    parts.push(
      `<line x1="${px(MARGIN.left)}" y1="${y}" x2="${px(MARGIN.left + plotW)}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px(MARGIN.left - 8)}" y="${y}" ${FONT} font-size="12" fill="#333333" text-anchor="end" dominant-baseline="middle">${rate.toFixed(1)}</text>`,
    );
  }
  for (const tick of xTicks) {
    const x = px(sx(tick));
    parts.push(
      `<line x1="${x}" y1="${px(MARGIN.top + plotH)}" x2="${x}" y2="${px(MARGIN.top + plotH + 5)}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${px(MARGIN.top + plotH + 20)}" ${FONT} font-size="12" fill="#333333" text-anchor="middle">${tickLabel(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${px(MARGIN.left)}" y="${px(MARGIN.top)}" width="${px(plotW)}" height="${px(plotH)}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${px(MARGIN.left + plotW / 2)}" y="${px(HEIGHT - 14)}" ${FONT} font-size="13" fill="#333333" text-anchor="middle">cumulative env primitive steps</text>`,
  );
  parts.push(
    `<text x="16" y="${px(MARGIN.top + plotH / 2)}" ${FONT} font-size="13" fill="#333333" text-anchor="middle" transform="rotate(-90 16 ${px(MARGIN.top + plotH / 2)})">eval success rate</text>`,
  );

  // bands first so every mean line stays on top
  curves.forEach((curve, idx) => {
    if (curve.seeds.length < 2) return;
    const color = PALETTE[idx % PALETTE.length];
    const upper = curve.points.map((p) => `${px(sx(p.steps))},${px(sy(p.max))}`);
    const lower = [...curve.points]
      .reverse()
      .map((p) => `${px(sx(p.steps))},${px(sy(p.min))}`);
    parts.push(
      `<polygon points="${[...upper, ...lower].join(" ")}" fill="${color}" opacity="0.18"/>`,
    );
  });
  curves.forEach((curve, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const pts = curve.points
      .map((p) => `${px(sx(p.steps))},${px(sy(p.mean))}`)
      .join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
  });

  // legend
  curves.forEach((curve, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const y = MARGIN.top + 10 + idx * 22;
    const x0 = MARGIN.left + plotW + 14;
    parts.push(
      `<line x1="${px(x0)}" y1="${px(y)}" x2="${px(x0 + 24)}" y2="${px(y)}" stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text x="${px(x0 + 30)}" y="${px(y)}" ${FONT} font-size="12" fill="#333333" dominant-baseline="middle">${curve.algo} (${curve.seeds.length} seed${curve.seeds.length === 1 ? "" : "s"})</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
