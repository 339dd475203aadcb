/** The critical-parameter panel: sweep scatter, error bars, theory overlays. */

import { column, parseCsv, Table } from "./csv.js";
import { bounds, Panel } from "./svg.js";

export const OVERLAYS: Record<string, { label: string; f: (s: number) => number; color: string }> = {
  // closed forms recomputed from the sigma column; the plotting layer never
  // reaches back into the simulator
  interval_theory: { label: "y = -s^2/2", f: (s) => -(s * s) / 2, color: "crimson" },
  interval_post: {
    label: "y = log2 - sqrt(2 log2) s",
    f: (s) => Math.log(2) - Math.sqrt(2 * Math.log(2)) * s,
    color: "darkorange",
  },
  brw_line: {
    label: "y = -sqrt(2 log4) s + log2",
    f: (s) => -Math.sqrt(2 * Math.log(4)) * s + Math.log(2),
    color: "royalblue",
  },
};

export interface SweepSpec {
  overlays: string[];
  title?: string;
}

export function renderSweep(csvText: string, spec: SweepSpec): string {
  const table: Table = parseCsv(csvText);
  const sigma = column(table, "sigma");
  const value = column(table, "log2lambda");
  const err = column(table, "stderr");
  for (const name of spec.overlays) {
    if (!(name in OVERLAYS)) {
      throw new Error(`unknown overlay ${JSON.stringify(name)} (have: ${Object.keys(OVERLAYS).join(", ")})`);
    }
  }
  const overlayValues = spec.overlays.flatMap((name) => sigma.map(OVERLAYS[name].f));
  const [x0, x1] = bounds(sigma);
  const [y0, y1] = bounds([...value, ...overlayValues]);
  const panel = new Panel(x0, x1, y0, y1);
  for (const name of spec.overlays) {
    const o = OVERLAYS[name];
    panel.polyline(sigma, sigma.map(o.f), o.color, o.label);
  }
  panel.errorBars(sigma, value, err);
  panel.points(sigma, value);
  return panel.render(spec.title ?? "critical rescaling constant", "sigma", "log(2*lambda_cr)");
}
