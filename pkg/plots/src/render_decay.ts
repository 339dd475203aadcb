#!/usr/bin/env node
/** CLI: render one or more level-decay CSVs to an SVG panel.
 *
 *   node dist/render_decay.js --input cascade_levels.csv --out decay.svg
 */

import { readFileSync } from "node:fs";

import { renderDecay } from "./decay.js";
import { atomicWrite, checkExtension, parseArgs } from "./io.js";

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    checkExtension(args.out);
    const { svg } = renderDecay(
      args.inputs.map((p) => readFileSync(p, "utf8")),
      args.title ?? "level decay",
    );
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
