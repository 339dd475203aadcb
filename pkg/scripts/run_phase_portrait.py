#!/usr/bin/env python3
"""Phase of the limit space across sigma for the figure eight.

For each sigma, estimates log lambda_cr and classifies the phase by the
sign of gamma_BRW + log lambda_cr, printing a small table and writing
phase JSONs under --out.
"""

import argparse
import json
import sys
from pathlib import Path

from hcascade import bricks, critical, dist, geometry


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/phase")
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--sigmas", type=float, nargs="*", default=[0.1, 0.2, 0.3, 0.4, 0.6])
    ap.add_argument("--n", type=int, default=50_000)
    args = ap.parse_args()

    pf = bricks.path_functional(bricks.preset("eight"))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    print(f"{'sigma':>6} {'log_lambda_cr':>14} {'criterion':>10} {'phase':>14} {'dim bound':>10}")
    for i, sigma in enumerate(args.sigmas):
        est = critical.estimate_drift(
            pf, dist.lognormal(sigma), N=args.n, k=50, warmup=10, reps=4,
            key=("phase-portrait", args.seed, i),
        )
        rep = geometry.phase_classify(sigma, est)
        (outdir / f"phase_{sigma:.3f}.json").write_text(json.dumps(rep.to_json(), indent=2))
        bound = f"{rep.hausdorff_bound:.2f}" if rep.hausdorff_bound else "-"
        print(f"{sigma:>6.3f} {est.log_lambda_cr:>14.4f} {rep.criterion:>10.4f} {rep.phase:>14} {bound:>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
