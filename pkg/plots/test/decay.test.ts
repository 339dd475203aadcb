import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { fitSlope, renderDecay } from "../src/decay.js";
import { main as decayMain } from "../src/render_decay.js";

function geometricCsv(rate: number, n = 10): string {
  const lines = ["level,value"];
  for (let l = 0; l < n; l++) lines.push(`${l},${Math.exp(rate * l)}`);
  return lines.join("\n");
}

describe("fitSlope", () => {
  it("recovers an exact geometric rate", () => {
    const xs = [0, 1, 2, 3, 4];
    const ys = xs.map((x) => -0.45 * x + 1.0);
    expect(fitSlope(xs, ys)).toBeCloseTo(-0.45, 12);
  });

  it("is zero for a constant series", () => {
    const { series } = renderDecay([geometricCsv(0)]);
    expect(series[0].slope).toBeCloseTo(0, 12);
  });
});

describe("renderDecay", () => {
  it("annotates a negative slope for a decaying series", () => {
    const { svg, series } = renderDecay([geometricCsv(-0.49)]);
    expect(series[0].slope).toBeCloseTo(-0.49, 10);
    expect(svg).toContain("fitted slope -0.4900");
    expect(svg).toContain("log max level distance");
  });

  it("plots two series with a legend", () => {
    const { svg, series } = renderDecay([geometricCsv(-0.3), geometricCsv(-0.6)]);
    expect(series.length).toBe(2);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(2);
    expect(svg).toContain("series 1 (slope -0.3000)");
    expect(svg).toContain("series 2 (slope -0.6000)");
  });

  it("rejects nonpositive values and empty input", () => {
    expect(() => renderDecay(["level,value\n0,0\n1,1"])).toThrow(/positive/);
    expect(() => renderDecay([])).toThrow(/no input/);
  });
});

describe("render_decay CLI", () => {
  it("round-trips through files", () => {
    const dir = mkdtempSync(join(tmpdir(), "decay-"));
    const a = join(dir, "a.csv");
    const b = join(dir, "b.csv");
    writeFileSync(a, geometricCsv(-0.5));
    writeFileSync(b, geometricCsv(-0.2));
    const out = join(dir, "decay.svg");
    expect(decayMain(["--input", a, "--input", b, "--out", out])).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("</svg>");
    expect(svg).toContain("series 2");
  });
});
