"""Command-line surface.

Subcommands: theta, paths, lambda-cr, sweep, stationary, converge,
phase, brw, cascade, geodesic, percolation-toy, sierpinski {lambda-cr,
theta, glue}.  Every run needs a seed (flag or config file; never the
wall clock), writes its outputs atomically (write-then-rename) into
--out, and echoes the fully resolved configuration to
resolved_config.json for provenance.  Scalar reports are JSON, tabular
data CSV; floats are printed with 9 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bricks, critical, dist, geometry, renorm, sierpinski


def _round9(x):
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            return x
        return float(f"{x:.9g}")
    if isinstance(x, dict):
        return {k: _round9(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round9(v) for v in x]
    return x


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(_round9(obj), indent=2, allow_nan=True) + "\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            if math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return f"{v:.9g}"
        return str(v)

    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _load_graph(name_or_path: str) -> bricks.BrickGraph:
    try:
        return bricks.preset(name_or_path)
    except bricks.GraphError:
        pass
    p = Path(name_or_path)
    if not p.exists():
        raise bricks.GraphError(f"no preset or file named {name_or_path!r}")
    return bricks.parse_graph(p.read_text())


def _law_from_args(cfg: dict) -> dist.FactorLaw:
    law = cfg.get("law")
    if isinstance(law, dict):
        return dist.FactorLaw.from_json(law)
    if isinstance(law, str):
        return dist.FactorLaw.from_json(json.loads(law))
    if cfg.get("sigma") is not None:
        return dist.lognormal(float(cfg["sigma"]))
    raise ValueError("no factor law: pass --sigma or --law JSON")


# ---------------------------------------------------------------------------
# config resolution: defaults < config file < explicit CLI flags


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    file_cfg = {}
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text())
    cfg = dict(defaults)
    cfg.update({k: v for k, v in file_cfg.items()})
    for k in list(defaults) + ["seed", "workers", "out"]:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    # CLI flags arrive as strings; coerce scalars back to the default's type
    for k, dflt in defaults.items():
        v = cfg.get(k)
        if isinstance(v, str) and isinstance(dflt, (int, float)) and not isinstance(dflt, bool):
            cfg[k] = type(dflt)(float(v)) if isinstance(dflt, int) else float(v)
        elif isinstance(v, str) and dflt is None and k in (
            "sigma", "lam", "tol", "bound", "lam_lo", "lam_hi", "cutoff", "p"
        ):
            cfg[k] = float(v)
    if cfg.get("seed") is None:
        raise ValueError("a seed is mandatory (flag --seed or config field)")
    cfg["seed"] = int(cfg["seed"])
    cfg.setdefault("workers", 1)
    cfg.setdefault("out", "out")
    return cfg


def _emit_config(cfg: dict, outdir: Path, command: str) -> None:
    # out dir and worker count never influence results; keeping them out of
    # the echo makes reruns byte-identical regardless of where they land
    doc = {"command": command}
    doc.update({k: v for k, v in sorted(cfg.items()) if k not in ("out", "workers")})
    write_json(outdir / "resolved_config.json", doc)


def _key(cfg: dict):
    return ("seed", cfg["seed"])


# ---------------------------------------------------------------------------
# command implementations


def cmd_theta(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    n = int(cfg["grid_points"])
    ps = np.linspace(0.0, 1.0, n)
    write_csv(outdir / "theta_curve.csv", ["p", "theta"],
              zip(ps, bricks.theta_exact(g, ps)))
    analysis = bricks.theta_fixed_points(g, tol=float(cfg["tol"]))
    write_json(
        outdir / "theta_fixed_points.json",
        {
            "graph": cfg["graph"],
            "fixed_points": [
                {"value": f.value, "stability": f.stability, "derivative": f.derivative}
                for f in analysis.fixed_points
            ],
        },
    )


def cmd_paths(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    cls = bricks.classify_edges(pf)
    write_json(
        outdir / "paths.json",
        {
            "graph": cfg["graph"],
            "n_edges": g.n_edges,
            "paths": [sorted(p) for p in pf.paths],
            "io_graph_distance": pf.io_graph_distance,
            "edge_classes": list(cls.per_edge),
            "graph_label": cls.graph_label,
        },
    )


def cmd_lambda_cr(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    m = _law_from_args(cfg)
    method = cfg["method"]
    if method in ("drift", "both"):
        est = critical.estimate_drift(
            pf, m, N=int(cfg["n"]), k=int(cfg["k"]), warmup=int(cfg["warmup"]),
            reps=int(cfg["reps"]), key=_key(cfg), workers=int(cfg["workers"]),
        )
        doc = est.to_json()
        doc["lambda_cr"] = est.lambda_cr
        write_json(outdir / "drift_estimate.json", doc)
    if method in ("bisect", "both"):
        mode = cfg["cutoff_mode"]
        if mode is None:
            label = bricks.classify_edges(pf).graph_label
            mode = "lower" if label == "has-shortcut" else "upper"
        gens = int(cfg["generations"])
        val = critical.bisect_lambda_cr(
            pf, m, mode, float(cfg["bound"]), float(cfg["lam_lo"]), float(cfg["lam_hi"]),
            N=int(cfg["n"]), generations=gens, tol=float(cfg["tol"]), key=_key(cfg),
        )
        write_json(
            outdir / "bisect.json",
            {
                "lambda_cr": val,
                "tol": cfg["tol"],
                "cutoff_mode": mode,
                "generations": gens,
                "resolution": critical.bisect_resolution(val, gens, tol=float(cfg["tol"])),
            },
        )


def cmd_sweep(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    if cfg.get("sigma_grid"):
        grid = [float(s) for s in cfg["sigma_grid"]]
    else:
        lo, hi, step = float(cfg["sigma_min"]), float(cfg["sigma_max"]), float(cfg["sigma_step"])
        grid = list(np.arange(lo, hi + step / 2, step))
    res = critical.sweep_sigma(
        pf, grid, N=int(cfg["n"]), k=int(cfg["k"]), key=_key(cfg),
        warmup=int(cfg["warmup"]), reps=int(cfg["reps"]),
    )
    sigmas = np.array([r[0] for r in res.rows])
    oi = res.overlay("interval_theory", sigmas)
    ob = res.overlay("brw_line", sigmas)
    write_csv(
        outdir / "sweep.csv",
        ["sigma", "log2lambda", "stderr", "overlay_interval", "overlay_brw"],
        [(s, l, e, a, b) for (s, l, e), a, b in zip(res.rows, oi, ob)],
    )


def cmd_stationary(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    m = _law_from_args(cfg)
    law = critical.stationary_law(
        pf, m, N=int(cfg["n"]), generations=int(cfg["generations"]), key=_key(cfg)
    )
    write_json(
        outdir / "stationary.json",
        {
            "log_lambda_cr": law.log_lambda_cr,
            "residual_drift": law.residual_drift,
            "sample_size": law.samples.n,
            "generations": cfg["generations"],
        },
    )
    write_csv(outdir / "stationary_samples.csv", ["value"],
              ((v,) for v in law.samples.samples))


def cmd_converge(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    m = _law_from_args(cfg)
    N = int(cfg["n"])
    from . import rng

    d1 = dist.dirac(1.0, N)
    d2 = dist.EmpiricalDistribution(
        rng.generator(_key(cfg), "converge-start").exponential(size=N)
    )
    rows = critical.convergence_diagnostic(
        pf, m, d1, d2, N=N, generations=int(cfg["generations"]), key=_key(cfg)
    )
    write_csv(outdir / "converge.csv", ["generation", "ks"], rows)


def cmd_phase(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    sigma = float(cfg["sigma"])
    est = critical.estimate_drift(
        pf, dist.lognormal(sigma), N=int(cfg["n"]), k=int(cfg["k"]),
        warmup=int(cfg["warmup"]), reps=int(cfg["reps"]), key=_key(cfg),
        workers=int(cfg["workers"]),
    )
    report = geometry.phase_classify(sigma, est, b=pf.n_edges)
    doc = report.to_json()
    doc["sigma"] = sigma
    doc["drift_stderr"] = est.stderr
    write_json(outdir / "phase.json", doc)


def cmd_brw(cfg: dict, outdir: Path) -> None:
    m = _law_from_args(cfg)
    window = (int(cfg["window_lo"]), int(cfg["window_hi"])) if cfg.get("window_lo") else None
    est = geometry.brw_max_drift(
        m, b=int(cfg["b"]), n_max=int(cfg["n_max"]), reps=int(cfg["reps"]),
        key=_key(cfg), window=window,
        beam=None if int(cfg["beam"]) == 0 else int(cfg["beam"]),
        workers=int(cfg["workers"]),
    )
    write_json(outdir / "brw.json", est.to_json())


def cmd_cascade(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    m = _law_from_args(cfg)
    if cfg.get("lam") is not None:
        lam = float(cfg["lam"])
    else:
        est = critical.estimate_drift(
            pf, m, N=int(cfg["n"]), k=int(cfg["k"]), warmup=int(cfg["warmup"]),
            reps=int(cfg["reps"]), key=(_key(cfg), "lam"), workers=int(cfg["workers"]),
        )
        lam = est.lambda_cr
    res = geometry.cascade_io_distances(pf, m, lam, int(cfg["depth"]), "unit", key=_key(cfg))
    write_csv(outdir / "cascade_levels.csv", ["level", "value"], enumerate(res.dprime))
    write_json(
        outdir / "cascade.json",
        {"lambda": lam, "depth": res.depth, "decay_slope": res.decay_slope()},
    )


def cmd_geodesic(cfg: dict, outdir: Path) -> None:
    g = _load_graph(cfg["graph"])
    pf = bricks.path_functional(g)
    m = _law_from_args(cfg)
    stat = critical.stationary_law(
        pf, m, N=int(cfg["n"]), generations=int(cfg["generations"]), key=(_key(cfg), "stat")
    )
    lam = float(cfg["lam"]) if cfg.get("lam") is not None else math.exp(stat.log_lambda_cr)
    traces = geometry.geodesic_chain(
        pf, stat, m, lam, depth=int(cfg["depth"]), reps=int(cfg["reps"]), key=_key(cfg)
    )
    t0 = traces[0]
    write_csv(
        outdir / "geodesic.csv",
        ["step", "Z", "ratio"],
        [(i, t0.zs[i], t0.ratios[i - 1] if i else "") for i in range(len(t0.zs))],
    )
    ratios = np.concatenate([t.ratios for t in traces])
    write_json(
        outdir / "geodesic.json",
        {
            "reps": len(traces),
            "depth": cfg["depth"],
            "lambda": lam,
            "mean_window_visits": float(np.mean([t.window_visits for t in traces])),
            "frac_ratio_leq_2": float(np.mean(ratios <= 2.0)),
            "regenerated_blocks": traces[0].regenerated_blocks,
            "regeneration_note": "blocks after the first restart from rescaled stationary draws, an approximation to the exact conditional subtree law",
        },
    )


def cmd_percolation_toy(cfg: dict, outdir: Path) -> None:
    q_inf, p_star, x_star = geometry.percolation_replacement(float(cfg["p"]), float(cfg["tol"]))
    write_json(
        outdir / "percolation.json",
        {"p": cfg["p"], "q_inf": q_inf, "p_star": p_star, "x_star": x_star},
    )


def cmd_sierpinski_lambda_cr(cfg: dict, outdir: Path) -> None:
    m = _law_from_args(cfg)
    est = sierpinski.lambda_cr_sierpinski(
        m, N=int(cfg["n"]), k=int(cfg["k"]), warmup=int(cfg["warmup"]),
        reps=int(cfg["reps"]), key=_key(cfg),
    )
    doc = est.to_json()
    doc["lambda_cr"] = est.lambda_cr
    write_json(outdir / "sierpinski_lambda_cr.json", doc)


def cmd_sierpinski_theta(cfg: dict, outdir: Path) -> None:
    start = cfg["start"]
    if start == "uniform":
        P0 = sierpinski.PartitionDistribution.uniform()
    elif start in sierpinski.PARTITIONS:
        P0 = sierpinski.PartitionDistribution.point(start)
    else:
        P0 = sierpinski.PartitionDistribution.from_json(json.loads(start))
    traj, cls = sierpinski.theta_sigma_orbit(P0, int(cfg["steps"]), float(cfg["tol"]))
    write_csv(
        outdir / "sierpinski_theta_orbit.csv",
        ["step", *sierpinski.PARTITIONS],
        [(i, *P.probs) for i, P in enumerate(traj)],
    )
    write_json(
        outdir / "sierpinski_theta.json",
        {"start": start, "limit": cls, "steps": len(traj) - 1, "final": traj[-1].to_json()},
    )


def cmd_sierpinski_glue(cfg: dict, outdir: Path) -> None:
    m = _law_from_args(cfg)
    N = int(cfg["n"])
    ens = sierpinski.constant_ensemble(1.0, 1.0, 1.0, N)
    lam = float(cfg["lam"]) if cfg.get("lam") is not None else 1.0
    cut = float(cfg["cutoff"]) if cfg.get("cutoff") is not None else None
    for gen in range(int(cfg["generations"])):
        ens = sierpinski.glue_step_3(ens, m, lam, cut, N, (_key(cfg), "gen", gen))
    write_csv(outdir / "sierpinski_ensemble.csv", ["x", "y", "z"], ens.states)


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp, defaults: dict):
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out")
    sp.add_argument("--config")
    for name, val in defaults.items():
        flag = "--" + name.replace("_", "-")
        if isinstance(val, bool):
            sp.add_argument(flag, action="store_true", default=None)
        elif isinstance(val, list) or name in ("sigma_grid",):
            sp.add_argument(flag, nargs="*", default=None)
        else:
            sp.add_argument(flag, default=None)
    return sp


_COMMANDS: dict[str, tuple] = {}


def _register(name: str, fn, defaults: dict):
    _COMMANDS[name] = (fn, defaults)


_register("theta", cmd_theta, {"graph": "eight", "grid_points": 1001, "tol": 1e-12})
_register("paths", cmd_paths, {"graph": "eight"})
_register(
    "lambda-cr",
    cmd_lambda_cr,
    {
        "graph": "eight", "sigma": None, "law": None, "method": "drift",
        "n": 50_000, "k": 50, "warmup": 10, "reps": 8,
        "cutoff_mode": None, "bound": 1.0, "lam_lo": 0.1, "lam_hi": 1.0,
        "generations": critical.BISECT_GENERATIONS, "tol": 0.01,
    },
)
_register(
    "sweep",
    cmd_sweep,
    {
        "graph": "eight", "sigma_min": 0.05, "sigma_max": 0.60, "sigma_step": 0.025,
        "sigma_grid": None, "n": 50_000, "k": 50, "warmup": 10, "reps": 8,
    },
)
_register(
    "stationary",
    cmd_stationary,
    {"graph": "eight", "sigma": None, "law": None, "n": 50_000, "generations": 100},
)
_register(
    "converge",
    cmd_converge,
    {"graph": "eight", "sigma": None, "law": None, "n": 50_000, "generations": 60},
)
_register(
    "phase",
    cmd_phase,
    {"graph": "eight", "sigma": 0.3, "n": 50_000, "k": 50, "warmup": 10, "reps": 8},
)
_register(
    "brw",
    cmd_brw,
    {
        "sigma": None, "law": None, "b": 4, "n_max": 25, "reps": 200,
        "window_lo": 15, "window_hi": 25, "beam": geometry.DEFAULT_BEAM,
    },
)
_register(
    "cascade",
    cmd_cascade,
    {
        "graph": "eight", "sigma": None, "law": None, "lam": None, "depth": 10,
        "n": 50_000, "k": 50, "warmup": 10, "reps": 4,
    },
)
_register(
    "geodesic",
    cmd_geodesic,
    {
        "graph": "eight", "sigma": None, "law": None, "lam": None, "depth": 64,
        "reps": 100, "n": 50_000, "generations": 80,
    },
)
_register("percolation-toy", cmd_percolation_toy, {"p": 0.84375, "tol": 1e-6})
_register(
    "sierpinski:lambda-cr",
    cmd_sierpinski_lambda_cr,
    {"sigma": None, "law": None, "n": 50_000, "k": 50, "warmup": 10, "reps": 8},
)
_register(
    "sierpinski:theta",
    cmd_sierpinski_theta,
    {"start": "uniform", "steps": 200, "tol": 1e-9},
)
_register(
    "sierpinski:glue",
    cmd_sierpinski_glue,
    {"sigma": None, "law": None, "lam": None, "cutoff": None, "n": 50_000, "generations": 10},
)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hcascade",
        description="Multiplicative-cascade random metrics on brick graphs and the Sierpinski gasket",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, defaults) in _COMMANDS.items():
        if name.startswith("sierpinski:"):
            continue
        _add_common(sub.add_parser(name), defaults)
    sp = sub.add_parser("sierpinski")
    ssub = sp.add_subparsers(dest="subcommand", required=True)
    for name, (_, defaults) in _COMMANDS.items():
        if name.startswith("sierpinski:"):
            _add_common(ssub.add_parser(name.split(":")[1]), defaults)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.command
    if name == "sierpinski":
        name = f"sierpinski:{args.subcommand}"
    fn, defaults = _COMMANDS[name]
    try:
        cfg = _resolve(args, defaults)
        outdir = Path(cfg["out"])
        fn(cfg, outdir)
        _emit_config(cfg, outdir, name)
    except Exception as e:  # machine-readable failure, nonzero exit
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
