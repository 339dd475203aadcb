#!/usr/bin/env node
/** CLI: render a critical-parameter sweep CSV to an SVG panel.
 *
 *   node dist/render_sweep.js --input sweep.csv --overlay brw_line --out panel.svg
 */

import { readFileSync } from "node:fs";

import { atomicWrite, checkExtension, parseArgs } from "./io.js";
import { renderSweep } from "./sweep.js";

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    if (args.inputs.length !== 1) throw new Error("render_sweep takes exactly one --input");
    checkExtension(args.out);
    const svg = renderSweep(readFileSync(args.inputs[0], "utf8"), {
      overlays: args.overlays,
      title: args.title,
    });
    atomicWrite(args.out, svg);
    return 0;
  } catch (e) {
    console.error(JSON.stringify({ error: (e as Error).constructor.name, message: (e as Error).message }));
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
