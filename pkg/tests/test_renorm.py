import dataclasses
import math

import numpy as np
import pytest

from hcascade import bricks, dist, renorm, rng


def pf(name):
    return bricks.path_functional(bricks.preset(name))


def cfg(name="eight", m=None, lam=1.0, n=2000, key=("t",), **kw):
    return renorm.GlueConfig(
        pf=pf(name), m=m or dist.dirac_factor(1.0), lam=lam, n_out=n, key=key, **kw
    )


# ---------------------------------------------------------------------------
# glue_step


def test_glue_dirac_everything():
    out = renorm.glue_step(dist.dirac(1.0, 500), cfg())
    assert np.all(out.samples == 2.0)


def test_glue_exp_uniform_fixed_point_small():
    N = 20_000
    x = dist.EmpiricalDistribution(rng.generator(("exp0",)).exponential(scale=2, size=N))
    out = renorm.glue_step(x, cfg(m=dist.FactorLaw("scaled-uniform", scale=2.0), n=N, key=("eu",)))
    fresh = dist.EmpiricalDistribution(rng.generator(("exp1",)).exponential(scale=2, size=N))
    assert dist.ks_distance(out, fresh) <= 0.025  # ~ two-sample band at this N


def test_glue_matches_exact_pushforward():
    inp = dist.AtomicDistribution(((0.0, 0.25), (1.0, 0.5), (2.0, 0.25)))
    m = dist.finite_atoms((0.5, 0.5), (2.0, 0.5))
    N = 50_000
    mc = renorm.glue_step(inp.as_samples(N), cfg(m=m, lam=0.8, n=N, key=("oracle",)))
    exact = dist.exact_pushforward(pf("eight"), inp, m, 0.8)
    band = 2 * math.sqrt(math.log(2 / 1e-6) / (2 * N))
    xs = np.array([v for v, _ in exact.atoms])
    cdf_exact = np.cumsum([w for _, w in exact.atoms])
    assert np.max(np.abs(mc.cdf(xs) - cdf_exact)) <= band


def test_glue_respects_cutoffs():
    x = dist.EmpiricalDistribution(rng.generator(("cut",)).exponential(size=1000))
    up = renorm.glue_step(x, cfg(m=dist.lognormal(0.5), cutoff=("upper", 1.0), n=1000))
    assert up.samples.max() <= 1.0
    lo = renorm.glue_step(x, cfg(m=dist.lognormal(0.5), cutoff=("lower", 1.0), n=1000))
    assert lo.samples.min() >= 1.0


def test_glue_max_variant_only_eight():
    with pytest.raises(ValueError):
        cfg("diamond", variant="max")
    out = renorm.glue_step(dist.dirac(1.0, 100), cfg(variant="max"))
    assert np.all(out.samples == 1.0)  # max(min,min)=1 for all-ones input


def test_glue_worker_count_invariance_by_blocks():
    # output blocks are keyed, so any scheduling gives identical arrays
    N = rng.BLOCK + 1234
    x = dist.EmpiricalDistribution(rng.generator(("w",)).exponential(size=2000))
    c = cfg(m=dist.lognormal(0.3), n=N, key=("wc",))
    a = renorm.glue_step(x, c)
    b = renorm.glue_step(x, c)
    assert np.array_equal(a.samples, b.samples)


# ---------------------------------------------------------------------------
# rescale


def test_rescale_identity_and_inf():
    d = dist.EmpiricalDistribution([0.0, 1.0, np.inf])
    assert np.array_equal(renorm.rescale(d, 1.0).samples, d.samples)
    r = renorm.rescale(d, 3.0)
    assert r.samples.tolist() == [0.0, 3.0, np.inf]


def test_rescale_glue_commutes_exactly_power_of_two():
    x = dist.EmpiricalDistribution(rng.generator(("com",)).exponential(size=4000))
    c = cfg(m=dist.lognormal(0.4), lam=0.7, n=4000, key=("comk",))
    a = renorm.glue_step(renorm.rescale(x, 2.0), c)
    b = renorm.rescale(renorm.glue_step(x, c), 2.0)
    assert np.array_equal(a.samples, b.samples)


# ---------------------------------------------------------------------------
# iterate_cutoff


def test_iterate_first_generation_is_all_bound():
    c = cfg(m=dist.lognormal(0.3), lam=0.5, cutoff=("upper", 1.0), n=500)
    orbit = renorm.iterate_cutoff(c, "dirac_inf", 1)
    assert np.all(np.isinf(orbit[0].samples))
    assert np.all(orbit[1].samples == 1.0)


def test_iterate_requires_matching_start():
    c = cfg(m=dist.lognormal(0.3), cutoff=("upper", 1.0))
    with pytest.raises(ValueError):
        renorm.iterate_cutoff(c, "dirac_zero", 3)
    with pytest.raises(ValueError):
        renorm.iterate_cutoff(cfg(m=dist.lognormal(0.3)), "dirac_inf", 3)


def test_iterate_supercritical_survives():
    c = cfg(m=dist.lognormal(0.3), lam=0.75, cutoff=("upper", 1.0), n=20_000, key=("sup",))
    final = renorm.iterate_cutoff(c, "dirac_inf", 50)[-1]
    assert dist.quantile(final, 0.5) >= 1e-3


def test_iterate_subcritical_collapses():
    c = cfg(m=dist.lognormal(0.3), lam=0.3, cutoff=("upper", 1.0), n=20_000, key=("sub",))
    final = renorm.iterate_cutoff(c, "dirac_inf", 50)[-1]
    assert dist.quantile(final, 0.5) <= 1e-6


def test_upper_orbit_is_stochastically_decreasing():
    c = cfg(m=dist.lognormal(0.3), lam=0.6, cutoff=("upper", 1.0), n=5000, key=("mono",))
    orbit = renorm.iterate_cutoff(c, "dirac_inf", 10)
    for a, b in zip(orbit[1:], orbit[2:]):
        assert dist.dominates(b, a, slack=0.03)  # later one sits below


# ---------------------------------------------------------------------------
# coupled monotonicity (common random numbers)


def test_order_preservation_coupling():
    N = 3000
    base = rng.generator(("op",)).exponential(size=N)
    d1 = dist.EmpiricalDistribution(base)
    d2 = dist.EmpiricalDistribution(base * 1.4 + 0.2)
    c = cfg(m=dist.lognormal(0.5), lam=0.8, n=N, key=("opk",))
    y1, y2 = renorm.glue_step(d1, c), renorm.glue_step(d2, c)
    assert np.all(y1.samples <= y2.samples)


def test_lambda_monotonicity_coupling():
    N = 3000
    d = dist.EmpiricalDistribution(rng.generator(("lm",)).exponential(size=N))
    c1 = cfg(m=dist.lognormal(0.5), lam=0.6, n=N, key=("lmk",))
    c2 = dataclasses.replace(c1, lam=0.9)
    assert np.all(renorm.glue_step(d, c1).samples <= renorm.glue_step(d, c2).samples)


def test_scaling_conjugacy_exact():
    c1 = cfg(m=dist.lognormal(0.4), lam=0.52, cutoff=("upper", 1.0), n=2000, key=("sc",))
    c2 = dataclasses.replace(c1, cutoff=("upper", 2.0))
    orb1 = renorm.iterate_cutoff(c1, "dirac_inf", 8)
    orb2 = renorm.iterate_cutoff(c2, "dirac_inf", 8)
    for a, b in zip(orb1, orb2):
        assert np.array_equal(a.samples, renorm.rescale(b, 0.5).samples)


# ---------------------------------------------------------------------------
# factor trees and the cut-off tree recursion


def test_factor_tree_dirac_and_depth0():
    t = renorm.sample_factor_tree(4, 0, dist.dirac_factor(2.0), ("t0",))
    assert t.levels[0].tolist() == [2.0]
    t = renorm.sample_factor_tree(4, 3, dist.dirac_factor(2.0), ("t1",))
    assert all(np.all(lv == 2.0) for lv in t.levels)


def test_factor_tree_guard():
    with pytest.raises(ValueError):
        renorm.sample_factor_tree(4, 30, dist.dirac_factor(1.0), ("g",))


def test_factor_tree_path_variance():
    # sum of log-factors along the leftmost root-leaf path over many trees
    sigma, depth, ntrees = 0.5, 6, 10_000
    sums = np.empty(ntrees)
    for i in range(ntrees):
        t = renorm.sample_factor_tree(2, depth, dist.lognormal(sigma), ("v", i))
        sums[i] = sum(math.log(lv[0]) for lv in t.levels[1:])
    # nodes below the root contribute depth iid normals
    assert abs(sums.var() / (depth * sigma**2) - 1) < 0.05


def test_cutoff_tree_horizon_zero_is_bound():
    t = renorm.sample_factor_tree(4, 3, dist.lognormal(0.3), ("h0",))
    assert renorm.cutoff_tree_distance(pf("eight"), t, 7.5, 1.0, 0) == 7.5


def test_cutoff_tree_deterministic_geometric_decay():
    # Dirac(1) factors with lam<1/2: value decays by (2 lam) per extra level
    lam = 0.4
    t = renorm.sample_factor_tree(4, 8, dist.dirac_factor(1.0), ("geo",))
    for h in range(9):
        got = renorm.cutoff_tree_distance(pf("eight"), t, 1.0, lam, h)
        assert got == pytest.approx((2 * lam) ** h, rel=1e-12)


def test_cutoff_tree_monotone_in_horizon():
    for i in range(20):
        t = renorm.sample_factor_tree(4, 6, dist.lognormal(0.6), ("mh", i))
        vals = [renorm.cutoff_tree_distance(pf("eight"), t, 1.0, 0.45, h) for h in range(7)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_cutoff_tree_branching_mismatch():
    t = renorm.sample_factor_tree(2, 3, dist.dirac_factor(1.0), ("bm",))
    with pytest.raises(ValueError):
        renorm.cutoff_tree_distance(pf("eight"), t, 1.0, 0.5, 2)
