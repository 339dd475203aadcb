"""Monte Carlo renormalization kernels.

One generation of the glueing operator is realized by bootstrap
resampling: every output sample draws #E input samples uniformly with
replacement, one factor xi from m, and emits lam * xi * rho(draws),
optionally clamped by an upper or lower cutoff.  All draws are keyed
(see rng), so reusing a key couples runs samplewise: that is the
concrete form of every coupling argument used by the tests.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import bricks, dist, rng

TREE_GUARD = 10**8


@dataclass(frozen=True)
class GlueConfig:
    pf: bricks.PathFunctional
    m: dist.FactorLaw
    lam: float
    n_out: int
    key: rng.Key
    cutoff: tuple[str, float] | None = None  # ("upper"|"lower", bound)
    variant: str = "sum"  # "sum" = rho, "max" = figure-eight max-approximation

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.n_out < 1:
            raise ValueError("n_out must be >= 1")
        if self.cutoff is not None:
            mode, bound = self.cutoff
            if mode not in ("upper", "lower") or not 0 < bound < np.inf:
                raise ValueError("cutoff must be ('upper'|'lower', bound>0)")
        if self.variant == "max":
            eight_pairs(self.pf)  # raises unless the brick is eight-shaped
        elif self.variant != "sum":
            raise ValueError(f"unknown variant {self.variant!r}")


def eight_pairs(pf: bricks.PathFunctional) -> tuple[list[int], list[int]]:
    """Split the figure-eight's edges into the I-side and O-side pair."""
    g = pf.graph
    groups: dict[frozenset, list[int]] = {}
    for i, e in enumerate(g.edges):
        groups.setdefault(frozenset(e), []).append(i)
    if len(groups) == 2 and all(len(v) == 2 for v in groups.values()):
        (ka, ia), (kb, ib) = groups.items()
        if g.in_vertex in ka and g.out_vertex in kb and ka & kb:
            return ia, ib
        if g.in_vertex in kb and g.out_vertex in ka and ka & kb:
            return ib, ia
    raise ValueError("variant='max' needs the figure-eight brick")


def _kernel(cfg: GlueConfig, drawn: np.ndarray, xi: np.ndarray) -> np.ndarray:
    if cfg.variant == "sum":
        r = bricks.rho_many(cfg.pf, drawn)
    else:
        ia, ib = eight_pairs(cfg.pf)
        r = np.maximum(drawn[:, ia].min(axis=1), drawn[:, ib].min(axis=1))
    y = cfg.lam * xi * r
    # 0 * inf: a zero-length route stays zero under any rescaling
    bad = np.isnan(y)
    if bad.any():
        y[bad] = np.where(r[bad] == 0.0, 0.0, np.inf)
    if cfg.cutoff is not None:
        mode, bound = cfg.cutoff
        y = np.minimum(y, bound) if mode == "upper" else np.maximum(y, bound)
    return y


def glue_step(input_dist: dist.EmpiricalDistribution, cfg: GlueConfig) -> dist.EmpiricalDistribution:
    """One Monte Carlo generation of the (cut-off) glueing operator."""
    ne = cfg.pf.n_edges
    n_in = input_dist.n
    idx = rng.blocked(cfg.n_out, lambda g, m: g.integers(0, n_in, size=(m, ne)), cfg.key, "glue-idx")
    xi = rng.blocked(cfg.n_out, _factor_draw(cfg.m), cfg.key, "glue-xi")
    y = _kernel(cfg, input_dist.samples[idx], xi)
    return dist.EmpiricalDistribution(y)


def _factor_draw(law: dist.FactorLaw):
    return lambda g, m: dist.draw_factors(law, g, m)


def rescale(input_dist: dist.EmpiricalDistribution, c: float) -> dist.EmpiricalDistribution:
    """Multiply every sample by c > 0; +inf is fixed."""
    if c <= 0:
        raise ValueError("c must be > 0")
    return dist.EmpiricalDistribution(input_dist.samples * c)


def iterate_cutoff(cfg: GlueConfig, start, generations: int) -> list[dist.EmpiricalDistribution]:
    """Orbit mu_0, Phi[mu_0], ..., of length generations+1.

    start is "dirac_inf" (requires an upper cutoff), "dirac_zero"
    (requires a lower cutoff) or a custom EmpiricalDistribution.
    """
    if cfg.cutoff is None:
        raise ValueError("iterate_cutoff needs a cutoff in the config")
    mode = cfg.cutoff[0]
    if start == "dirac_inf":
        if mode != "upper":
            raise ValueError("dirac_inf start needs an upper cutoff")
        current = dist.dirac(np.inf, cfg.n_out)
    elif start == "dirac_zero":
        if mode != "lower":
            raise ValueError("dirac_zero start needs a lower cutoff")
        current = dist.dirac(0.0, cfg.n_out)
    elif isinstance(start, dist.EmpiricalDistribution):
        current = start
    else:
        raise ValueError(f"bad start {start!r}")
    orbit = [current]
    for g in range(generations):
        step_cfg = dataclasses.replace(cfg, key=(cfg.key, "iter", g))
        current = glue_step(current, step_cfg)
        orbit.append(current)
    return orbit


# ---------------------------------------------------------------------------
# factor trees and the depth-limited cut-off recursion


@dataclass(frozen=True)
class FactorTree:
    """Complete b-ary tree of positive factors, stored level by level."""

    branching: int
    depth: int
    levels: tuple[np.ndarray, ...]  # levels[l] has branching**l values

    def __post_init__(self):
        assert len(self.levels) == self.depth + 1
        for l, arr in enumerate(self.levels):
            assert arr.shape == (self.branching**l,)


def sample_factor_tree(b: int, depth: int, m: dist.FactorLaw, key: rng.Key) -> FactorTree:
    if b < 2:
        raise ValueError("branching must be >= 2")
    if b**depth > TREE_GUARD:
        raise ValueError("tree node guard exceeded")
    levels = tuple(
        dist.sample_factors(m, b**l, (key, "tree-level", l)) for l in range(depth + 1)
    )
    return FactorTree(branching=b, depth=depth, levels=levels)


def cutoff_tree_distance(
    pf: bricks.PathFunctional,
    tree: FactorTree,
    bound: float,
    lam: float,
    horizon: int,
) -> float:
    """Depth-limited cut-off IO-distance read off a shared factor tree.

    Nodes deeper than the horizon count as infinitely far; every node at
    depth <= horizon combines its children by min(lam*xi*rho(...), bound).
    Monotone nonincreasing in the horizon for a fixed tree.
    """
    b = tree.branching
    if b != pf.n_edges:
        raise ValueError("tree branching must equal the brick's edge count")
    if not 0 <= horizon <= tree.depth:
        raise ValueError("horizon must lie in [0, tree depth]")
    values = np.full(b ** (horizon + 1), np.inf)
    for level in range(horizon, -1, -1):
        xi = tree.levels[level]
        children = values.reshape(-1, b)
        r = bricks.rho_many(pf, children)
        y = lam * xi * r
        bad = np.isnan(y)
        if bad.any():
            y[bad] = np.where(r[bad] == 0.0, 0.0, np.inf)
        values = np.minimum(y, bound)
    return float(values[0])
