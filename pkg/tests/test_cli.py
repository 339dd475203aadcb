import json
import math
from pathlib import Path

import pytest

from hcascade import cli


def run(args):
    return cli.main([str(a) for a in args])


def test_seed_is_mandatory(tmp_path, capsys):
    rc = run(["theta", "--graph", "eight", "--out", tmp_path / "a"])
    assert rc == 1
    assert "seed" in json.loads(capsys.readouterr().err)["message"]


def test_theta_outputs_and_determinism(tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert run(["theta", "--graph", "eight", "--seed", 11, "--out", out1]) == 0
    assert run(["theta", "--graph", "eight", "--seed", 11, "--out", out2]) == 0
    for name in ("theta_curve.csv", "theta_fixed_points.json", "resolved_config.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    doc = json.loads((out1 / "theta_fixed_points.json").read_text())
    interior = doc["fixed_points"][1]["value"]
    assert abs(interior - 0.3819660) < 1e-6
    header = (out1 / "theta_curve.csv").read_text().splitlines()[0]
    assert header == "p,theta"


def test_theta_interval_has_two_fixed_points(tmp_path):
    assert run(["theta", "--graph", "interval2", "--seed", 1, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "theta_fixed_points.json").read_text())
    assert len(doc["fixed_points"]) == 2


def test_theta_diamond_interior_point(tmp_path):
    assert run(["theta", "--graph", "diamond", "--seed", 1, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "theta_fixed_points.json").read_text())
    assert abs(doc["fixed_points"][1]["value"] - 0.6180340) < 1e-6


def test_paths_report(tmp_path):
    assert run(["paths", "--graph", "racket", "--seed", 1, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "paths.json").read_text())
    assert doc["graph_label"] == "has-bridge"
    assert doc["io_graph_distance"] == 2


def test_lambda_cr_dirac_exact(tmp_path):
    assert (
        run(
            ["lambda-cr", "--graph", "eight", "--law", '{"kind":"dirac","c":1.0}',
             "--n", 200, "--k", 8, "--warmup", 2, "--reps", 2, "--seed", 3, "--out", tmp_path]
        )
        == 0
    )
    doc = json.loads((tmp_path / "drift_estimate.json").read_text())
    assert abs(doc["log_lambda_cr"] + 0.6931472) < 1e-6


def test_config_file_and_flag_precedence(tmp_path):
    cfgfile = tmp_path / "conf.json"
    cfgfile.write_text(json.dumps({"seed": 5, "graph": "diamond", "grid_points": 11}))
    out = tmp_path / "o"
    assert run(["theta", "--config", cfgfile, "--grid-points", 21, "--out", out]) == 0
    resolved = json.loads((out / "resolved_config.json").read_text())
    assert resolved["graph"] == "diamond"  # from config file
    assert resolved["grid_points"] == 21  # flag wins
    assert resolved["seed"] == 5
    assert len((out / "theta_curve.csv").read_text().splitlines()) == 22


def test_percolation_toy_command(tmp_path):
    assert run(["percolation-toy", "--p", 0.84375, "--tol", 1e-4, "--seed", 1, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "percolation.json").read_text())
    assert abs(doc["q_inf"] - 2 / 3) < 1e-4
    assert doc["p_star"] == 27 / 32


def test_sweep_csv_schema(tmp_path):
    assert (
        run(
            ["sweep", "--graph", "interval2", "--sigma-grid", 0.1, 0.2,
             "--n", 2000, "--k", 10, "--warmup", 3, "--reps", 2, "--seed", 9, "--out", tmp_path]
        )
        == 0
    )
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "sigma,log2lambda,stderr,overlay_interval,overlay_brw"
    assert len(lines) == 3


def test_stationary_outputs(tmp_path):
    assert (
        run(
            ["stationary", "--graph", "eight", "--law", '{"kind":"scaled-uniform","scale":2.0}',
             "--n", 5000, "--generations", 30, "--seed", 2, "--out", tmp_path]
        )
        == 0
    )
    doc = json.loads((tmp_path / "stationary.json").read_text())
    assert abs(doc["log_lambda_cr"]) < 0.05
    lines = (tmp_path / "stationary_samples.csv").read_text().splitlines()
    assert lines[0] == "value"
    assert len(lines) == 5001


def test_phase_command(tmp_path):
    assert (
        run(
            ["phase", "--graph", "eight", "--sigma", 0.6, "--n", 5000, "--k", 20,
             "--warmup", 5, "--reps", 2, "--seed", 4, "--out", tmp_path]
        )
        == 0
    )
    doc = json.loads((tmp_path / "phase.json").read_text())
    assert doc["phase"] == "supercritical"


def test_sierpinski_subcommands(tmp_path):
    assert (
        run(["sierpinski", "lambda-cr", "--law", '{"kind":"dirac","c":1.0}',
             "--n", 200, "--k", 5, "--warmup", 1, "--reps", 1, "--seed", 6, "--out", tmp_path])
        == 0
    )
    doc = json.loads((tmp_path / "sierpinski_lambda_cr.json").read_text())
    assert abs(doc["lambda_cr"] - 0.5) < 1e-9

    assert run(["sierpinski", "theta", "--start", "uniform", "--seed", 6, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "sierpinski_theta.json").read_text())
    assert doc["limit"] in ("singletons", "pair12", "pair23", "pair31", "together")

    assert (
        run(["sierpinski", "glue", "--law", '{"kind":"lognormal","sigma":0.2}',
             "--n", 500, "--generations", 3, "--lam", 0.5, "--seed", 6, "--out", tmp_path])
        == 0
    )
    lines = (tmp_path / "sierpinski_ensemble.csv").read_text().splitlines()
    assert lines[0] == "x,y,z"
    assert len(lines) == 501


def test_brw_command(tmp_path):
    assert (
        run(["brw", "--law", '{"kind":"dirac","c":2.0}', "--b", 2, "--n-max", 6,
             "--window-lo", 2, "--window-hi", 6, "--reps", 1, "--beam", 0,
             "--seed", 8, "--out", tmp_path])
        == 0
    )
    doc = json.loads((tmp_path / "brw.json").read_text())
    assert abs(doc["gamma"] - math.log(2)) < 1e-9
    assert doc["beam"] is None


def test_cascade_command(tmp_path):
    assert (
        run(["cascade", "--graph", "eight", "--law", '{"kind":"dirac","c":1.0}',
             "--lam", 0.5, "--depth", 5, "--seed", 2, "--out", tmp_path])
        == 0
    )
    lines = (tmp_path / "cascade_levels.csv").read_text().splitlines()
    assert lines[0] == "level,value"
    assert lines[1] == "0,1"
    assert len(lines) == 7


def test_converge_command(tmp_path):
    assert (
        run(["converge", "--graph", "eight", "--sigma", 0.3, "--n", 2000,
             "--generations", 5, "--seed", 2, "--out", tmp_path])
        == 0
    )
    lines = (tmp_path / "converge.csv").read_text().splitlines()
    assert lines[0] == "generation,ks"
    assert len(lines) == 7


def test_geodesic_command(tmp_path):
    assert (
        run(["geodesic", "--graph", "eight", "--sigma", 0.5, "--n", 2000,
             "--generations", 20, "--depth", 12, "--reps", 3, "--seed", 2, "--out", tmp_path])
        == 0
    )
    lines = (tmp_path / "geodesic.csv").read_text().splitlines()
    assert lines[0] == "step,Z,ratio"
    doc = json.loads((tmp_path / "geodesic.json").read_text())
    assert doc["reps"] == 3
    assert "regeneration_note" in doc


def test_error_is_machine_readable(tmp_path, capsys):
    rc = run(["theta", "--graph", "does-not-exist", "--seed", 1, "--out", tmp_path])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "GraphError"
