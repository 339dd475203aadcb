"""Critical rescaling constant and stationary laws.

The central estimator follows the resampling experiment: iterate the
glueing operator with lam=1 (no cutoff) on a size-N sample, fit the log
of the sample median against the generation index, and read

    log lambda_cr = -(drift of the log median).

Sign convention: Phi_1-iterates scale like lambda_cr^{-n}, so a growing
median means lambda_cr < 1.  A bisection on collapse/explosion of the
cut-off process provides an independent second estimator; its finite-run
resolution is declared, never hidden.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bricks, dist, renorm, rng


def parallel_map(fn, items, workers: int = 1) -> list:
    """Map a pure function over items, optionally on a thread pool.

    Every item owns its randomness keys, so results do not depend on the
    worker count; order follows the input."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))

GAMMA_QUATERNARY = math.sqrt(2 * math.log(4))  # BRW drift per unit sigma, b=4


class DriftError(RuntimeError):
    """Degenerate sample (median 0 or inf) or failed bracket."""


@dataclass(frozen=True)
class DriftEstimate:
    log_lambda_cr: float
    stderr: float
    generations: int
    sample_size: int
    warmup: int
    reps: int

    @property
    def lambda_cr(self) -> float:
        return math.exp(self.log_lambda_cr)

    def to_json(self) -> dict:
        return {
            "log_lambda_cr": self.log_lambda_cr,
            "stderr": self.stderr,
            "generations": self.generations,
            "sample_size": self.sample_size,
            "warmup": self.warmup,
            "reps": self.reps,
        }


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[tuple[float, float, float], ...]  # (sigma, log(2*lambda_cr), stderr)
    overlays: tuple[str, ...] = ("interval_theory", "brw_line")

    def overlay(self, name: str, sigma: np.ndarray) -> np.ndarray:
        s = np.asarray(sigma, dtype=float)
        if name == "interval_theory":
            return -(s**2) / 2
        if name == "brw_line":
            return -GAMMA_QUATERNARY * s + math.log(2)
        if name == "interval_post":
            return math.log(2) - math.sqrt(2 * math.log(2)) * s
        raise ValueError(f"unknown overlay {name!r}")


@dataclass(frozen=True)
class StationaryLaw:
    samples: dist.EmpiricalDistribution  # normalized so the median is exactly 1
    log_lambda_cr: float
    residual_drift: float  # mean rescale log over the last quarter + log_lambda_cr


def _slope(y: np.ndarray) -> float:
    """Least-squares slope of y against 0..len(y)-1."""
    x = np.arange(len(y), dtype=float)
    x = x - x.mean()
    return float((x * (y - np.asarray(y).mean())).sum() / (x * x).sum())


def _median(d: dist.EmpiricalDistribution) -> float:
    return dist.quantile(d, 0.5)


def _one_rep_drift(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    N: int,
    k: int,
    warmup: int,
    key: rng.Key,
    start: dist.EmpiricalDistribution | None,
    variant: str = "sum",
) -> tuple[float, dist.EmpiricalDistribution]:
    """Drift of the log median over k recorded generations; returns final sample."""
    current = start if start is not None else dist.dirac(1.0, N)
    cfg = renorm.GlueConfig(pf=pf, m=m, lam=1.0, n_out=N, key=key, variant=variant)
    logmed = []
    scale = 1.0  # running renormalization, so samples stay O(1)
    for g in range(warmup + k):
        step = dataclasses.replace(cfg, key=(key, "gen", g))
        current = renorm.glue_step(current, step)
        med = _median(current)
        if med == 0.0 or math.isinf(med):
            raise DriftError(f"degenerate sample: median {med} at generation {g}")
        if g >= warmup:
            logmed.append(math.log(med) + math.log(scale))
        # renormalize by the median; homogeneity makes this exact bookkeeping
        current = renorm.rescale(current, 1.0 / med)
        scale *= med
    return _slope(np.array(logmed)), current


def estimate_drift(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    N: int = 50_000,
    k: int = 50,
    warmup: int = 10,
    reps: int = 8,
    key: rng.Key = (0,),
    starts: list[dist.EmpiricalDistribution] | None = None,
    variant: str = "sum",
    return_finals: bool = False,
    workers: int = 1,
):
    """Drift-of-log-median estimate of log lambda_cr (lam=1, no cutoff)."""
    if min(N, k, reps) < 1:
        raise ValueError("N, k, reps must all be >= 1")

    def run(r):
        start = starts[r] if starts is not None else None
        return _one_rep_drift(pf, m, N, k, warmup, (key, "rep", r), start, variant)

    results = parallel_map(run, range(reps), workers)
    slopes = np.array([s for s, _ in results])
    finals = [f for _, f in results]
    est = DriftEstimate(
        log_lambda_cr=float(-slopes.mean()),
        stderr=float(slopes.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
        generations=k,
        sample_size=N,
        warmup=warmup,
        reps=reps,
    )
    return (est, finals) if return_finals else est


def sweep_sigma(
    pf: bricks.PathFunctional,
    sigma_grid,
    N: int = 50_000,
    k: int = 50,
    key: rng.Key = (0,),
    warmup: int = 10,
    reps: int = 8,
) -> SweepResult:
    """Warm-started sigma sweep of log(2*lambda_cr) for log-normal factors."""
    grid = [float(s) for s in sigma_grid]
    if any(s <= 0 for s in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("sigma grid must be positive and strictly increasing")
    rows = []
    finals: list[dist.EmpiricalDistribution] | None = None
    for j, sigma in enumerate(grid):
        est, finals = estimate_drift(
            pf,
            dist.lognormal(sigma),
            N=N,
            k=k,
            warmup=warmup,
            reps=reps,
            key=(key, "sweep", j),
            starts=finals,
            return_finals=True,
        )
        rows.append((sigma, math.log(2) + est.log_lambda_cr, est.stderr))
    return SweepResult(rows=tuple(rows))


def crossing_sigma(sweep: SweepResult, overlay: str = "brw_line") -> float:
    """Sigma where the sweep curve crosses the named overlay (interpolated)."""
    s = np.array([r[0] for r in sweep.rows])
    y = np.array([r[1] for r in sweep.rows])
    diff = y - sweep.overlay(overlay, s)
    sign = np.sign(diff)
    idx = np.nonzero(np.diff(sign) != 0)[0]
    if idx.size == 0:
        raise DriftError("sweep curve does not cross the overlay")
    j = int(idx[0])
    t = diff[j] / (diff[j] - diff[j + 1])
    return float(s[j] + t * (s[j + 1] - s[j]))


# ---------------------------------------------------------------------------
# bisection on collapse/explosion

COLLAPSE_EPS = 1e-4
BISECT_GENERATIONS = 200


def _classify(
    pf, m, lam, cutoff_mode, bound, N, generations, key, collapse_eps
) -> bool:
    """True iff lam is on the lambda_cr side of the bracket.

    Upper mode: collapse of the cut-off orbit from Dirac_inf (final
    median < eps*bound) means lam <= lambda_cr.  Lower mode: explosion
    from Dirac_0 (final median > bound/eps) means lam > lambda_cr.
    """
    cfg = renorm.GlueConfig(
        pf=pf, m=m, lam=lam, n_out=N, key=key, cutoff=(cutoff_mode, bound)
    )
    start = "dirac_inf" if cutoff_mode == "upper" else "dirac_zero"
    final = renorm.iterate_cutoff(cfg, start, generations)[-1]
    med = _median(final)
    if cutoff_mode == "upper":
        return med < collapse_eps * bound  # collapsed -> subcritical side
    return med > bound / collapse_eps  # exploded -> supercritical side


def bisect_lambda_cr(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    cutoff_mode: str,
    bound: float,
    lam_lo: float,
    lam_hi: float,
    N: int = 50_000,
    generations: int = BISECT_GENERATIONS,
    tol: float = 1e-2,
    key: rng.Key = (0,),
    collapse_eps: float = COLLAPSE_EPS,
) -> float:
    """Bisection for lambda_cr on a collapse/explosion classifier.

    Upper cutoff (non-pivotal and bridge bricks): lam_lo must collapse,
    lam_hi must survive.  Lower cutoff (shortcut bricks): lam_lo must
    stay bounded, lam_hi must explode.  Resolution is limited by the run
    length: see bisect_resolution.
    """
    if cutoff_mode not in ("upper", "lower"):
        raise ValueError("cutoff_mode must be 'upper' or 'lower'")
    if not 0 < lam_lo < lam_hi:
        raise ValueError("need 0 < lam_lo < lam_hi")

    def low_side(lam: float) -> bool:
        flag = _classify(pf, m, lam, cutoff_mode, bound, N, generations, (key, "cls", lam), collapse_eps)
        return flag if cutoff_mode == "upper" else not flag

    if not low_side(lam_lo):
        raise DriftError(f"lam_lo={lam_lo} does not classify as below lambda_cr")
    if low_side(lam_hi):
        raise DriftError(f"lam_hi={lam_hi} does not classify as above lambda_cr")
    lo, hi = lam_lo, lam_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if low_side(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_resolution(value: float, generations: int = BISECT_GENERATIONS,
                      collapse_eps: float = COLLAPSE_EPS, tol: float = 1e-2) -> float:
    """Declared uncertainty of bisect_lambda_cr.

    Near lambda_cr the orbit drifts at rate |log(lam/lambda_cr)| per
    generation, so a run of the given length only resolves the threshold
    to about value*log(1/eps)/generations; the bracket width adds tol.
    """
    return value * math.log(1.0 / collapse_eps) / generations + tol


# ---------------------------------------------------------------------------
# stationary law and convergence diagnostics


def stationary_law(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    N: int = 50_000,
    generations: int = 100,
    key: rng.Key = (0,),
    start: dist.EmpiricalDistribution | None = None,
) -> StationaryLaw:
    """Self-normalized iteration: glue with lam=1, rescale to median 1.

    The per-generation rescale logs estimate -log lambda_cr (averaged
    after a quarter of burn-in); residual_drift is the mean rescale log
    over the last quarter plus that estimate, i.e. ~0 once stationary.
    """
    if min(N, generations) < 1:
        raise ValueError("N and generations must be >= 1")
    current = start if start is not None else dist.dirac(1.0, N)
    cfg = renorm.GlueConfig(pf=pf, m=m, lam=1.0, n_out=N, key=key)
    logs = []
    for g in range(generations):
        step = dataclasses.replace(cfg, key=(key, "gen", g))
        current = renorm.glue_step(current, step)
        med = _median(current)
        if med == 0.0 or math.isinf(med):
            raise DriftError(f"degenerate sample: median {med} at generation {g}")
        logs.append(math.log(med))
        current = renorm.rescale(current, 1.0 / med)
    logs = np.array(logs)
    burn = generations // 4
    log_lambda_cr = float(-logs[burn:].mean())
    tail = logs[-max(1, generations // 4):]
    residual = float(tail.mean() + log_lambda_cr)
    # purely atomic factor laws may legitimately have point-mass fixed points
    # (Dirac factors leave the Euclidean law invariant); for laws with a
    # density, a collapsed normalized law means the iteration degenerated
    if m.kind not in ("dirac", "atoms"):
        if dist.quantile(current, 0.75) / dist.quantile(current, 0.25) < 1 + 1e-9:
            raise DriftError("normalized law collapsed to a point mass")
    return StationaryLaw(samples=current, log_lambda_cr=log_lambda_cr, residual_drift=residual)


def convergence_diagnostic(
    pf: bricks.PathFunctional,
    m: dist.FactorLaw,
    start1: dist.EmpiricalDistribution,
    start2: dist.EmpiricalDistribution,
    N: int = 50_000,
    generations: int = 60,
    key: rng.Key = (0,),
) -> list[tuple[int, float]]:
    """KS distance between two coupled orbits, medians matched per step.

    Both orbits use the same keys (common random numbers); each is
    renormalized to median 1 every generation, which is exact
    bookkeeping by homogeneity.
    """
    out = []
    pair = [start1, start2]
    for g in range(generations + 1):
        normed = []
        for d in pair:
            med = _median(d)
            if med == 0.0 or math.isinf(med):
                raise DriftError(f"degenerate orbit: median {med} at generation {g}")
            normed.append(renorm.rescale(d, 1.0 / med))
        out.append((g, dist.ks_distance(normed[0], normed[1])))
        if g == generations:
            break
        cfg = renorm.GlueConfig(pf=pf, m=m, lam=1.0, n_out=N, key=(key, "gen", g))
        pair = [renorm.glue_step(d, cfg) for d in normed]
    return out


# ---------------------------------------------------------------------------
# dimension and MMC relations (figure-eight cascade)


def dimension_relation(log_lambda_cr: float, sigma: float) -> float | None:
    """Smallest positive root of log4 + a*log(lambda_cr) + a^2 sigma^2/2 = 0.

    Conjectural Hausdorff dimension of the subcritical limit space; None
    when the quadratic has no positive real root.
    """
    a2 = sigma**2 / 2
    disc = log_lambda_cr**2 - 4 * a2 * math.log(4)
    if disc < 0 or log_lambda_cr >= 0:
        return None
    # rationalized form of the smaller root, stable as sigma -> 0
    return 2 * math.log(4) / (-log_lambda_cr + math.sqrt(disc))


def mmc_lambda(alpha: float, m: dist.FactorLaw) -> float:
    """Normalization 1/(4 E xi^alpha) of the alpha-cascade measure."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    mom = m.moment(alpha)
    if math.isinf(mom):
        return 0.0
    return 1.0 / (4.0 * mom)
