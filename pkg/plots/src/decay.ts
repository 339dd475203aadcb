/** Level-decay panel: log of the level maxima against depth, slope annotated. */

import { column, parseCsv } from "./csv.js";
import { bounds, Panel } from "./svg.js";

export function fitSlope(xs: number[], ys: number[]): number {
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  return den === 0 ? 0 : num / den;
}

export interface DecaySeries {
  label: string;
  levels: number[];
  logValues: number[];
  slope: number;
}

const COLORS = ["black", "royalblue", "seagreen", "crimson"];

export function renderDecay(csvTexts: string[], title = "level decay"): { svg: string; series: DecaySeries[] } {
  if (csvTexts.length === 0) throw new Error("no input CSVs");
  const series: DecaySeries[] = csvTexts.map((text, i) => {
    const t = parseCsv(text);
    const levels = column(t, "level");
    const values = column(t, "value");
    const logValues = values.map((v) => Math.log(v));
    if (logValues.some((v) => !Number.isFinite(v))) {
      throw new Error(`series ${i}: level values must be positive and finite`);
    }
    return { label: `series ${i + 1}`, levels, logValues, slope: fitSlope(levels, logValues) };
  });
  const allLevels = series.flatMap((s) => s.levels);
  const allLogs = series.flatMap((s) => s.logValues);
  const [x0, x1] = bounds(allLevels);
  const [y0, y1] = bounds(allLogs);
  const panel = new Panel(x0, x1, y0, y1);
  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    const label = csvTexts.length > 1 ? `${s.label} (slope ${s.slope.toFixed(4)})` : undefined;
    panel.polyline(s.levels, s.logValues, color, label);
    panel.points(s.levels, s.logValues, color, 2.5);
  });
  const first = series[0];
  panel.annotate(
    `fitted slope ${first.slope.toFixed(4)}`,
    x0 + 0.05 * (x1 - x0),
    y0 + 0.08 * (y1 - y0),
  );
  return { svg: panel.render(title, "level", "log max level distance"), series };
}
