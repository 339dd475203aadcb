"""Geometry of the limit random metric.

Holds the branching-random-walk maximum simulator, the cascade-tree
realization of the level distances Y_t with their level maxima D'_n, the
subcritical/supercritical phase classifier, the geodesic-selection
Markov chain, and the percolation-with-replacement toy model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import bricks, critical, dist, rng
from .renorm import TREE_GUARD, eight_pairs

DEFAULT_BEAM = 100_000


@dataclass(frozen=True)
class BrwEstimate:
    gamma: float
    stderr: float
    slope_window: tuple[int, int]
    reps: int
    branching: int
    beam: int | None  # pruning width, None = exact full tree

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "stderr": self.stderr,
            "slope_window": list(self.slope_window),
            "reps": self.reps,
            "branching": self.branching,
            "beam": self.beam,
        }


def brw_max_drift(
    increment_law: dist.FactorLaw,
    b: int,
    n_max: int,
    reps: int = 200,
    key: rng.Key = (0,),
    window: tuple[int, int] | None = None,
    beam: int | None = DEFAULT_BEAM,
    workers: int = 1,
) -> BrwEstimate:
    """Drift of the maximum of a b-ary BRW with increments log(xi).

    The per-level population is pruned to the top `beam` partial maxima,
    which is exact for the running maximum with overwhelming probability
    and is reported in the estimate.  With beam=None the full tree is
    simulated (subject to the node guard).
    """
    if b < 2:
        raise ValueError("branching must be >= 2")
    if beam is None and b**n_max > TREE_GUARD:
        raise ValueError("node guard exceeded; enable pruning")
    n_lo, n_hi = window if window is not None else (max(1, n_max // 2), n_max)
    if not 1 <= n_lo < n_hi <= n_max:
        raise ValueError("bad slope window")

    def one_rep(r: int) -> float:
        values = np.zeros(1)
        maxima = []
        for level in range(1, n_max + 1):
            m = values.size * b
            incr = np.log(
                rng.blocked(m, lambda g, k: dist.draw_factors(increment_law, g, k),
                            key, "brw", r, level)
            )
            values = np.repeat(values, b) + incr
            maxima.append(float(values.max()))
            if beam is not None and values.size > beam:
                values = values[np.argpartition(values, -beam)[-beam:]]
        ns = np.arange(n_lo, n_hi + 1, dtype=float)
        ys = np.array(maxima[n_lo - 1 : n_hi])
        nc = ns - ns.mean()
        return float((nc * (ys - ys.mean())).sum() / (nc * nc).sum())

    slopes = np.array(critical.parallel_map(one_rep, range(reps), workers))
    return BrwEstimate(
        gamma=float(slopes.mean()),
        stderr=float(slopes.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
        slope_window=(n_lo, n_hi),
        reps=reps,
        branching=b,
        beam=beam,
    )


# ---------------------------------------------------------------------------
# cascade trees: level distances Y_t and their maxima D'_n


@dataclass(frozen=True)
class CascadeResult:
    branching: int
    depth: int
    lam: float
    levels: tuple[np.ndarray, ...] = field(repr=False)  # Y_t by level
    dprime: np.ndarray = field(repr=False)  # per-level maxima

    def decay_slope(self, l_min: int = 0) -> float:
        ls = np.arange(l_min, self.depth + 1, dtype=float)
        ys = np.log(self.dprime[l_min:])
        lc = ls - ls.mean()
        return float((lc * (ys - ys.mean())).sum() / (lc * lc).sum())


def cascade_io_distances(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    lam: float,
    depth: int,
    leaf_law="unit",
    key: rng.Key = (0,),
) -> CascadeResult:
    """Realize the level-l copy distances of one cascade tree.

    Leaves carry a seed value (1, or a draw from a supplied stationary
    sample) times the product of lam*xi along the root path; internal
    values combine children by the plain min-plus functional, so the
    recursion Y_t = rho(Y_children) holds bitwise at every node.
    D'_l is the maximum over level l.
    """
    b = pf.n_edges
    if b**depth > TREE_GUARD:
        raise ValueError("tree node guard exceeded")

    # cumulative factor products down to the leaves (lam*xi of all strict ancestors)
    a = np.ones(1)
    for level in range(depth):
        xi = dist.sample_factors(m, b**level, (key, "cascade-xi", level))
        a = np.repeat(a * (lam * xi), b)

    n_leaves = b**depth
    if isinstance(leaf_law, str):
        if leaf_law != "unit":
            raise ValueError("leaf_law must be 'unit' or an EmpiricalDistribution")
        seeds = np.ones(n_leaves)
    else:
        pool = leaf_law.samples
        idx = rng.blocked(n_leaves, lambda g, k: g.integers(0, pool.size, size=k),
                          key, "cascade-leaf")
        seeds = pool[idx]

    levels: list[np.ndarray] = [a * seeds]
    for _ in range(depth):
        levels.append(bricks.rho_many(pf, levels[-1].reshape(-1, b)))
    levels.reverse()
    dprime = np.array([lv.max() for lv in levels])
    return CascadeResult(branching=b, depth=depth, lam=lam,
                         levels=tuple(levels), dprime=dprime)


# ---------------------------------------------------------------------------
# phase classification


@dataclass(frozen=True)
class PhaseReport:
    gamma_brw: float
    log_lambda_cr: float
    criterion: float
    uncertainty: float
    phase: str  # "subcritical" | "supercritical" | "indeterminate"
    hausdorff_bound: float | None

    def to_json(self) -> dict:
        return {
            "gamma_brw": self.gamma_brw,
            "log_lambda_cr": self.log_lambda_cr,
            "criterion": self.criterion,
            "uncertainty": self.uncertainty,
            "phase": self.phase,
            "hausdorff_bound": self.hausdorff_bound,
        }


def phase_classify(sigma: float, drift_estimate, gamma_estimate: BrwEstimate | None = None,
                   b: int = 4) -> PhaseReport:
    """Sign of gamma_BRW + log lambda_cr decides the phase.

    Negative: the limit space is compact (homeomorphic to the hierarchical
    limit) with Hausdorff dimension at most 2 log2/|criterion|; positive:
    almost surely infinite diameter.  Log-normal factors admit the closed
    form gamma = sqrt(2 log b) * sigma; otherwise pass a BrwEstimate.
    """
    if gamma_estimate is None:
        if sigma <= 0:
            raise ValueError("sigma must be > 0")
        gamma, gamma_se = math.sqrt(2 * math.log(b)) * sigma, 0.0
    else:
        gamma, gamma_se = gamma_estimate.gamma, gamma_estimate.stderr
    crit = gamma + drift_estimate.log_lambda_cr
    unc = 3.0 * math.hypot(drift_estimate.stderr, gamma_se)
    if abs(crit) <= unc:
        phase = "indeterminate"
    elif crit < 0:
        phase = "subcritical"
    else:
        phase = "supercritical"
    bound = 2 * math.log(2) / abs(crit) if phase == "subcritical" else None
    return PhaseReport(gamma_brw=gamma, log_lambda_cr=drift_estimate.log_lambda_cr,
                       criterion=crit, uncertainty=unc, phase=phase, hausdorff_bound=bound)


# ---------------------------------------------------------------------------
# geodesic-selection Markov chain (figure-eight)


@dataclass(frozen=True)
class GeodesicTrace:
    zs: np.ndarray  # Z_0..Z_n, selected within-copy distances
    ratios: np.ndarray  # r_1..r_n, max/min of the two halves
    halves: np.ndarray = field(repr=False)  # (n, 2) selected-node half distances
    parent_xi: np.ndarray = field(repr=False)  # factor at each split's parent
    parents: np.ndarray = field(repr=False)  # parent within-copy distance per split
    window_visits: int = 0
    regenerated_blocks: int = 0  # >0 marks the stationary-resample approximation


def _block_tree(pf, pool, m, lam, block, key, leaf_scale=1.0):
    """Bottom-up within-copy distances for one depth-`block` subtree."""
    b = pf.n_edges
    n_leaves = b**block
    idx = rng.blocked(n_leaves, lambda g, k: g.integers(0, pool.size, size=k), key, "leaf")
    levels = [pool[idx] * leaf_scale]
    xis = []
    for level in range(block - 1, -1, -1):
        xi = dist.sample_factors(m, b**level, (key, "xi", level))
        xis.append(xi)
        levels.append(lam * xi * bricks.rho_many(pf, levels[-1].reshape(-1, b)))
    levels.reverse()
    xis.reverse()
    return levels, xis  # levels[0] is the root value; xis[l] pairs with levels[l]


def geodesic_chain(
    pf: bricks.PathFunctional,
    stationary,
    m: dist.FactorLaw,
    lam: float,
    depth: int,
    reps: int = 100,
    key: rng.Key = (0,),
    block: int = 8,
) -> list[GeodesicTrace]:
    """Top-down walk always selecting the larger of the two half-distances.

    Trees are built bottom-up from the stationary sample (exact joint law
    within a block); longer horizons regenerate blockwise, rescaling the
    fresh subtree's leaves so its root continues at the current value --
    an approximation to the exact conditional law, flagged via
    regenerated_blocks.
    """
    ia, ib = eight_pairs(pf)
    sd = stationary.samples if isinstance(stationary, critical.StationaryLaw) else stationary
    if not isinstance(sd, dist.EmpiricalDistribution):
        sd = dist.EmpiricalDistribution(np.asarray(stationary, dtype=float))
    pool = sd.samples
    q25, q75 = dist.quantile(sd, 0.25), dist.quantile(sd, 0.75)

    traces = []
    for r in range(reps):
        zs, ratios, halves, pxi, parents = [], [], [], [], []
        carry = None  # value the next block's root continues from
        n_blocks = (depth + block - 1) // block
        steps_left = depth
        for bi in range(n_blocks):
            this_block = min(block, steps_left)
            bkey = (key, "geo", r, bi)
            levels, xis = _block_tree(pf, pool, m, lam, this_block, bkey)
            if carry is None:
                zs.append(float(levels[0][0]))
            else:
                # rebuild from rescaled leaves: homogeneity carries the root
                # to ~carry while keeping every internal identity exact
                levels, xis = _block_tree(
                    pf, pool, m, lam, this_block, bkey,
                    leaf_scale=carry / float(levels[0][0]),
                )
            pos = 0
            for lv in range(this_block):
                child = levels[lv + 1][4 * pos : 4 * pos + 4]
                h1 = min(child[ia[0]], child[ia[1]])
                h2 = min(child[ib[0]], child[ib[1]])
                hi_half, lo_half = (h1, h2) if h1 >= h2 else (h2, h1)
                zs.append(float(hi_half))
                ratios.append(float(hi_half / lo_half) if lo_half > 0 else np.inf)
                halves.append((h1, h2))
                pxi.append(float(xis[lv][pos]))
                parents.append(float(levels[lv][pos]))
                if h1 >= h2:
                    sel = ia[0] if child[ia[0]] <= child[ia[1]] else ia[1]
                else:
                    sel = ib[0] if child[ib[0]] <= child[ib[1]] else ib[1]
                pos = 4 * pos + sel
            carry = float(levels[this_block][pos])
            steps_left -= this_block
        z_arr = np.array(zs)
        traces.append(
            GeodesicTrace(
                zs=z_arr,
                ratios=np.array(ratios),
                halves=np.array(halves),
                parent_xi=np.array(pxi),
                parents=np.array(parents),
                window_visits=int(np.count_nonzero((z_arr >= q25) & (z_arr <= q75))),
                regenerated_blocks=max(0, n_blocks - 1),
            )
        )
    return traces


# ---------------------------------------------------------------------------
# percolation with replacement (toy model)


def _theta_eight(q: float) -> float:
    # exact percolation polynomial of the figure-eight brick
    return q * q * (2.0 - q) * (2.0 - q)


def percolation_replacement(p: float, tol: float = 1e-6) -> tuple[float, float, float]:
    """Survival probability of the edge-replacement process at parameter p.

    Iterates q <- p*theta(q) from q=1 to tolerance tol, and cross-checks
    against the largest root of p*theta(x) = x.  Also returns the closed
    form threshold p* = 27/32 and its fixed point x* = 2/3.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    p_star, x_star = 27.0 / 32.0, 2.0 / 3.0

    q = 1.0
    # near the tangency at p*, steps shrink like the square of the error;
    # stop at ~(9/8)(tol/2)^2 so the iterate lands within tol/2 of the limit
    step_tol = 0.28125 * tol * tol
    for _ in range(10**7):
        q_next = p * _theta_eight(q)
        if abs(q_next - q) <= step_tol:
            q = q_next
            break
        q = q_next

    if p < p_star:
        root = 0.0
    else:
        g = lambda x: x * (2.0 - x) ** 2 - 1.0 / p
        root = float(brentq(g, x_star, 1.0, xtol=1e-14)) if g(1.0) < 0 else 1.0
    if abs(q - root) > 10 * tol:
        raise RuntimeError(f"iteration limit {q} and root {root} disagree beyond 10*tol")
    return q, p_star, x_star
