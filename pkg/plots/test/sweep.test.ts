import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { CsvError, parseCsv, column } from "../src/csv.js";
import { OVERLAYS, renderSweep } from "../src/sweep.js";
import { main as sweepMain } from "../src/render_sweep.js";

const SWEEP_CSV = [
  "sigma,log2lambda,stderr,overlay_interval,overlay_brw",
  "0.05,0.02,0.001,-0.00125,0.609891",
  "0.1,0.035,0.001,-0.005,0.526635",
  "0.2,0.08,0.002,-0.02,0.360124",
  "0.3,0.19,0.002,-0.045,0.193612",
  "0.4,0.31,0.003,-0.08,0.0271",
].join("\n");

describe("csv parsing", () => {
  it("parses numbers and inf literals", () => {
    const t = parseCsv("value\n1\n2.5\ninf\n");
    expect(column(t, "value")).toEqual([1, 2.5, Infinity]);
  });

  it("rejects empty input and missing columns", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv("a,b\n")).toThrow(CsvError);
    expect(() => column(parseCsv("a\n1"), "b")).toThrow(/missing column/);
  });
});

describe("renderSweep", () => {
  it("draws points, error bars and the requested overlays", () => {
    const svg = renderSweep(SWEEP_CSV, { overlays: ["brw_line"] });
    expect(svg).toContain("<svg");
    expect((svg.match(/<circle/g) ?? []).length).toBe(5);
    expect((svg.match(/<polyline/g) ?? []).length).toBe(1);
    expect(svg).toContain("sqrt(2 log4)");
    // five error bars plus axis ticks; bars are vertical lines inside the frame
    expect((svg.match(/<line/g) ?? []).length).toBeGreaterThanOrEqual(5);
  });

  it("recomputes overlays from the sigma column", () => {
    expect(OVERLAYS.interval_theory.f(0.3)).toBeCloseTo(-0.045, 12);
    expect(OVERLAYS.brw_line.f(0.3)).toBeCloseTo(-Math.sqrt(2 * Math.log(4)) * 0.3 + Math.log(2), 12);
    expect(OVERLAYS.interval_post.f(0.0)).toBeCloseTo(Math.log(2), 12);
  });

  it("renders both panel styles", () => {
    const left = renderSweep(SWEEP_CSV, { overlays: ["interval_theory", "interval_post"], title: "interval" });
    const right = renderSweep(SWEEP_CSV, { overlays: ["brw_line"], title: "figure eight" });
    expect(left).toContain("interval");
    expect(left).toContain("-s^2/2");
    expect(right).toContain("figure eight");
  });

  it("rejects unknown overlays and missing columns", () => {
    expect(() => renderSweep(SWEEP_CSV, { overlays: ["nope"] })).toThrow(/unknown overlay/);
    expect(() => renderSweep("sigma,foo\n0.1,1", { overlays: [] })).toThrow(/missing column/);
  });
});

describe("render_sweep CLI", () => {
  it("writes an SVG file and fails cleanly on an empty CSV", () => {
    const dir = mkdtempSync(join(tmpdir(), "sweep-"));
    const csv = join(dir, "sweep.csv");
    writeFileSync(csv, SWEEP_CSV);
    const out = join(dir, "panel.svg");
    expect(sweepMain(["--input", csv, "--overlay", "brw_line", "--out", out])).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("</svg>");

    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "");
    const out2 = join(dir, "nope.svg");
    expect(sweepMain(["--input", empty, "--out", out2])).toBe(1);
    expect(existsSync(out2)).toBe(false); // no truncated file left behind
  });

  it("declines png output with a clear message", () => {
    const dir = mkdtempSync(join(tmpdir(), "sweep-"));
    const csv = join(dir, "sweep.csv");
    writeFileSync(csv, SWEEP_CSV);
    expect(sweepMain(["--input", csv, "--out", join(dir, "x.png")])).toBe(1);
  });
});
