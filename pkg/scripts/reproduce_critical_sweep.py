#!/usr/bin/env python3
"""Reproduce the two critical-parameter panels.

Runs the warm-started sigma sweep for the two-edge interval and for the
figure eight, writing sweep CSVs (with theory overlays) that the plots
package renders directly:

    python scripts/reproduce_critical_sweep.py --out results/sweeps --seed 7
    node plots/dist/render_sweep.js --input results/sweeps/interval/sweep.csv \
        --overlay interval_theory --out interval.svg
"""

import argparse
import sys

from hcascade import cli


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--reps", type=int, default=4)
    ap.add_argument("--sigma-max", type=float, default=0.6)
    args = ap.parse_args()

    for graph in ("interval2", "eight"):
        rc = cli.main(
            [
                "sweep",
                "--graph", graph,
                "--sigma-min", "0.05",
                "--sigma-max", str(args.sigma_max),
                "--sigma-step", "0.025",
                "--n", str(args.n),
                "--k", str(args.k),
                "--reps", str(args.reps),
                "--seed", str(args.seed),
                "--out", f"{args.out}/{graph}",
            ]
        )
        if rc:
            return rc
        print(f"sweep for {graph} -> {args.out}/{graph}/sweep.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
