"""Empirical distributions, factor laws and the exact atomic pushforward.

Conventions fixed here and relied on by the rest of the package:

* samples live on the extended half-line [0, +inf]; +inf is an ordinary
  top element for all order statistics;
* the empirical CDF is right-continuous at sample points;
* quantile(alpha) = min{x : F(x) >= alpha}, the left-continuous
  generalized inverse;
* stochastic domination mu <= nu is the reversed pointwise ordering of
  the CDFs (F_mu >= F_nu).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import rng

ATOM_GUARD = 10**8


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted multiset of values in [0, +inf] with atom masses at 0, inf."""

    samples: np.ndarray = field(repr=False)
    p0: float = field(init=False)
    pinf: float = field(init=False)

    def __post_init__(self):
        x = np.sort(np.asarray(self.samples, dtype=float))
        if x.size < 1:
            raise ValueError("need at least one sample")
        if np.any(np.isnan(x)) or x[0] < 0:
            raise ValueError("samples must lie in [0, +inf]")
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "p0", float(np.count_nonzero(x == 0.0)) / x.size)
        object.__setattr__(self, "pinf", float(np.count_nonzero(np.isinf(x))) / x.size)

    @property
    def n(self) -> int:
        return self.samples.size

    def cdf(self, x) -> np.ndarray:
        """Right-continuous empirical CDF evaluated at x."""
        return np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right") / self.n

    def median(self) -> float:
        return quantile(self, 0.5)


def dirac(value: float, n: int = 1) -> EmpiricalDistribution:
    return EmpiricalDistribution(np.full(n, float(value)))


def quantile(d: EmpiricalDistribution, alpha: float) -> float:
    """min{x : F(x) >= alpha} on the empirical CDF, alpha in (0, 1]."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    idx = max(0, math.ceil(alpha * d.n) - 1)
    return float(d.samples[idx])


def _pooled_points(d1: EmpiricalDistribution, d2: EmpiricalDistribution) -> np.ndarray:
    return np.union1d(d1.samples, d2.samples)


def dominates(d1: EmpiricalDistribution, d2: EmpiricalDistribution, slack: float = 0.0) -> bool:
    """True iff F_d1 >= F_d2 - slack at every pooled sample point.

    Passing means d1 sits stochastically below d2, up to slack.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    pts = _pooled_points(d1, d2)
    return bool(np.all(d1.cdf(pts) >= d2.cdf(pts) - slack))


def ks_distance(d1: EmpiricalDistribution, d2: EmpiricalDistribution) -> float:
    """sup |F_d1 - F_d2| over pooled sample points."""
    pts = _pooled_points(d1, d2)
    return float(np.max(np.abs(d1.cdf(pts) - d2.cdf(pts))))


# ---------------------------------------------------------------------------
# factor laws


@dataclass(frozen=True)
class FactorLaw:
    """The multiplier measure m on (0, +inf].

    kind: "lognormal" (exp of N(0, sigma^2); median 1), "dirac",
    "atoms" (finite mixture of point masses, +inf allowed),
    "exponential" (rate parameter), "scaled-uniform" (scale * U[0,1]).
    """

    kind: str
    sigma: float = 0.0
    c: float = 1.0
    atoms: tuple[tuple[float, float], ...] = ()
    rate: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind == "lognormal":
            if self.sigma <= 0:
                raise ValueError("lognormal needs sigma > 0")
        elif self.kind == "dirac":
            if self.c <= 0:
                raise ValueError("dirac needs c > 0")
        elif self.kind == "atoms":
            if not self.atoms:
                raise ValueError("atoms law needs at least one atom")
            vals = [v for v, _ in self.atoms]
            wts = [w for _, w in self.atoms]
            if any(v <= 0 for v in vals):
                raise ValueError("atom values must be > 0")
            if any(w <= 0 for w in wts) or abs(sum(wts) - 1.0) > 1e-12:
                raise ValueError("atom weights must be positive and sum to 1")
        elif self.kind == "exponential":
            if self.rate <= 0:
                raise ValueError("exponential needs rate > 0")
        elif self.kind == "scaled-uniform":
            if self.scale <= 0:
                raise ValueError("scaled-uniform needs scale > 0")
        else:
            raise ValueError(f"unknown factor law {self.kind!r}")

    def moment(self, alpha: float) -> float:
        """E xi^alpha in closed form (may be +inf for infinite atoms)."""
        if self.kind == "lognormal":
            return math.exp(alpha**2 * self.sigma**2 / 2)
        if self.kind == "dirac":
            return self.c**alpha
        if self.kind == "atoms":
            return float(sum(w * v**alpha for v, w in self.atoms))
        if self.kind == "exponential":
            if alpha <= -1:
                return math.inf
            return math.gamma(1 + alpha) / self.rate**alpha
        if self.kind == "scaled-uniform":
            if alpha <= -1:
                return math.inf
            return self.scale**alpha / (1 + alpha)
        raise AssertionError

    def to_json(self) -> dict:
        if self.kind == "lognormal":
            return {"kind": "lognormal", "sigma": self.sigma}
        if self.kind == "dirac":
            return {"kind": "dirac", "c": self.c}
        if self.kind == "atoms":
            return {"kind": "atoms", "atoms": [[v, w] for v, w in self.atoms]}
        if self.kind == "exponential":
            return {"kind": "exponential", "rate": self.rate}
        return {"kind": "scaled-uniform", "scale": self.scale}

    @staticmethod
    def from_json(doc: dict) -> "FactorLaw":
        kind = doc["kind"]
        if kind == "lognormal":
            return FactorLaw("lognormal", sigma=float(doc["sigma"]))
        if kind == "dirac":
            return FactorLaw("dirac", c=float(doc["c"]))
        if kind == "atoms":
            return FactorLaw("atoms", atoms=tuple((float(v), float(w)) for v, w in doc["atoms"]))
        if kind == "exponential":
            return FactorLaw("exponential", rate=float(doc["rate"]))
        if kind == "scaled-uniform":
            return FactorLaw("scaled-uniform", scale=float(doc["scale"]))
        raise ValueError(f"unknown factor law {kind!r}")


def lognormal(sigma: float) -> FactorLaw:
    return FactorLaw("lognormal", sigma=sigma)


def dirac_factor(c: float) -> FactorLaw:
    return FactorLaw("dirac", c=c)


def finite_atoms(*atoms: tuple[float, float]) -> FactorLaw:
    return FactorLaw("atoms", atoms=tuple(atoms))


def draw_factors(law: FactorLaw, g: np.random.Generator, m: int) -> np.ndarray:
    """m draws from the law using an already-positioned generator."""
    if law.kind == "lognormal":
        return np.exp(law.sigma * g.standard_normal(m))
    if law.kind == "dirac":
        return np.full(m, law.c)
    if law.kind == "atoms":
        vals = np.array([v for v, _ in law.atoms])
        cum = np.cumsum([w for _, w in law.atoms])
        cum[-1] = 1.0
        return vals[np.searchsorted(cum, g.random(m), side="right")]
    if law.kind == "exponential":
        return g.exponential(scale=1.0 / law.rate, size=m)
    return law.scale * g.random(m)


def sample_factors(law: FactorLaw, n: int, key: rng.Key) -> np.ndarray:
    """n i.i.d. draws from the law; a pure function of (law, n, key)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.blocked(n, lambda g, m: draw_factors(law, g, m), key, "factors")


# ---------------------------------------------------------------------------
# exact pushforward for atomic inputs (the Monte Carlo oracle)


@dataclass(frozen=True)
class AtomicDistribution:
    """Finite law on [0, +inf]: sorted distinct values with probabilities."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        vals = [v for v, _ in self.atoms]
        wts = [w for _, w in self.atoms]
        if len(self.atoms) == 0 or len(self.atoms) > ATOM_GUARD:
            raise ValueError("atom count out of range")
        if sorted(vals) != vals or len(set(vals)) != len(vals):
            raise ValueError("atom values must be distinct and sorted")
        if any(v < 0 or math.isnan(v) for v in vals):
            raise ValueError("atom values must lie in [0, +inf]")
        if any(w <= 0 for w in wts) or abs(sum(wts) - 1.0) > 1e-9:
            raise ValueError("probabilities must be positive and sum to 1")

    def mass_at(self, value: float) -> float:
        return float(sum(w for v, w in self.atoms if v == value))

    def as_samples(self, n: int) -> EmpiricalDistribution:
        """Deterministic size-n sample with proportional atom counts."""
        cum = np.cumsum([w for _, w in self.atoms])
        bounds = np.rint(cum * n).astype(int)
        counts = np.diff(bounds, prepend=0)
        vals = np.repeat([v for v, _ in self.atoms], counts)
        return EmpiricalDistribution(vals)


def exact_pushforward(
    pf,
    input_dist: AtomicDistribution,
    m: FactorLaw,
    lam: float,
    cutoff: tuple[str, float] | None = None,
) -> AtomicDistribution:
    """Exact law of lam * xi * rho(X_1..X_E) for atomic inputs and factors.

    Enumerates every assignment of input atoms to the brick's edges and
    every atom of m, then clamps by the optional ("upper"|"lower", bound)
    cutoff.  Guarded by ATOM_GUARD on the combinatorial size.
    """
    from . import bricks  # local import to avoid a cycle at import time

    if m.kind == "dirac":
        m_atoms = [(m.c, 1.0)]
    elif m.kind == "atoms":
        m_atoms = list(m.atoms)
    else:
        raise ValueError("exact_pushforward needs an atomic factor law")
    ne = pf.n_edges
    n_in = len(input_dist.atoms)
    if n_in**ne * len(m_atoms) > ATOM_GUARD:
        raise ValueError("combinatorial guard exceeded")

    acc: dict[float, float] = {}
    values = [v for v, _ in input_dist.atoms]
    weights = [w for _, w in input_dist.atoms]
    for combo in itertools.product(range(n_in), repeat=ne):
        p_combo = math.prod(weights[i] for i in combo)
        r = bricks.eval_rho(pf, [values[i] for i in combo])
        for mv, mw in m_atoms:
            y = lam * mv * r
            if math.isnan(y):  # 0 * inf when rho=0 and the factor atom is +inf
                y = 0.0 if r == 0.0 else math.inf
            if cutoff is not None:
                mode, bound = cutoff
                y = min(y, bound) if mode == "upper" else max(y, bound)
            acc[y] = acc.get(y, 0.0) + p_combo * mw
    atoms = tuple(sorted(acc.items()))
    total = sum(w for _, w in atoms)
    if abs(total - 1.0) > 1e-12:
        raise AssertionError(f"pushforward mass {total} != 1")
    return AtomicDistribution(atoms=atoms)
