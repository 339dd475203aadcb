/** Shared output plumbing for the render scripts. */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { dirname, extname, join } from "node:path";

export function checkExtension(outPath: string): void {
  const ext = extname(outPath).toLowerCase();
  if (ext === ".svg") return;
  if (ext === ".png") {
    throw new Error("PNG output needs a rasterizer, which this toolchain does not ship; use .svg");
  }
  throw new Error(`unsupported image extension ${JSON.stringify(ext)}; use .svg`);
}

/** Write-then-rename so failures never leave a truncated image behind. */
export function atomicWrite(outPath: string, data: string): void {
  mkdirSync(dirname(outPath) || ".", { recursive: true });
  const tmp = join(dirname(outPath) || ".", `.${Date.now()}-${process.pid}.tmp`);
  writeFileSync(tmp, data);
  renameSync(tmp, outPath);
}

export interface Args {
  inputs: string[];
  overlays: string[];
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], overlays: [], out: "" };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`flag ${a} needs a value`);
      return argv[++i];
    };
    if (a === "--input") args.inputs.push(next());
    else if (a === "--overlay") args.overlays.push(next());
    else if (a === "--out") args.out = next();
    else if (a === "--title") args.title = next();
    else throw new Error(`unknown flag ${JSON.stringify(a)}`);
  }
  if (args.inputs.length === 0) throw new Error("at least one --input CSV is required");
  if (!args.out) throw new Error("--out path is required");
  return args;
}
