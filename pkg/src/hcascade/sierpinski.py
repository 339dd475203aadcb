"""Sierpinski-gasket extension: three-distance dynamics and theta_Sigma.

The state is the triple (x, y, z) of distances between the three outer
vertices (B1B2, B2B3, B3B1), constrained by the triangle inequality.
Glueing three copies identifies six vertices; the resulting distances
have the closed min-plus form implemented in r3_eval, and collapsing
distances to the binary connected/disconnected picture gives the exact
map theta_Sigma on distributions over the five vertex partitions.

Vertex identification used throughout (cross-checked in the tests
against the distance recursion itself): the glued triangle has vertices
B1, B2, B3 and midpoints P (copies 2&3), Q (copies 1&2), R (copies
1&3); copy 1 contributes (Q, R, B3), copy 2 (B1, P, Q), copy 3
(P, B2, R), each in its local (B1-slot, B2-slot, B3-slot) order.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import dist, rng

PARTITIONS = ("singletons", "pair12", "pair23", "pair31", "together")

#: blocks of each partition of local slots (0=B1-slot, 1=B2-slot, 2=B3-slot)
_PARTITION_BLOCKS = (
    ((0,), (1,), (2,)),
    ((0, 1), (2,)),
    ((1, 2), (0,)),
    ((2, 0), (1,)),
    ((0, 1, 2),),
)

# glued-vertex names: 0..2 = B1..B3, 3 = P(23), 4 = Q(12), 5 = R(13)
_CHILD_VERTEX = (
    (4, 5, 2),  # copy 1: (Q, R, B3)
    (0, 3, 4),  # copy 2: (B1, P, Q)
    (3, 1, 5),  # copy 3: (P, B2, R)
)


def triangle_ok(x, y, z) -> bool:
    """Triangle inequality on [0, +inf] (inf dominates)."""
    return x + y >= z and y + z >= x and z + x >= y


@dataclass(frozen=True)
class TriangleEnsemble:
    """Array of triangle states, one row per sample."""

    states: np.ndarray = field(repr=False)  # (N, 3)

    def __post_init__(self):
        s = np.asarray(self.states, dtype=float)
        if s.ndim != 2 or s.shape[1] != 3 or s.shape[0] < 1:
            raise ValueError("ensemble must be a nonempty (N, 3) array")
        if np.any(np.isnan(s)) or np.any(s < 0):
            raise ValueError("distances must lie in [0, +inf]")
        x, y, z = s[:, 0], s[:, 1], s[:, 2]
        if not (np.all(x + y >= z) and np.all(y + z >= x) and np.all(z + x >= y)):
            raise ValueError("triangle inequality violated")
        object.__setattr__(self, "states", s)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    def perimeter(self) -> np.ndarray:
        return self.states.sum(axis=1)


def constant_ensemble(x: float, y: float, z: float, n: int) -> TriangleEnsemble:
    return TriangleEnsemble(np.tile([float(x), float(y), float(z)], (n, 1)))


def r3_many(t1: np.ndarray, t2: np.ndarray, t3: np.ndarray, xi, lam: float,
            cutoff: float | None = None) -> np.ndarray:
    """Vectorized glued-triangle distances for stacked (N,3) inputs."""
    x1, y1, z1 = t1[..., 0], t1[..., 1], t1[..., 2]
    x2, y2, z2 = t2[..., 0], t2[..., 1], t2[..., 2]
    x3, y3, z3 = t3[..., 0], t3[..., 1], t3[..., 2]
    r = np.stack(
        [
            np.minimum(z2 + x1 + y3, x2 + x3),
            np.minimum(x3 + y2 + z1, y3 + y1),
            np.minimum(y1 + z3 + x2, z1 + z2),
        ],
        axis=-1,
    )
    out = lam * np.asarray(xi)[..., None] * r
    bad = np.isnan(out)
    if bad.any():
        out[bad] = np.where(r[bad] == 0.0, 0.0, np.inf)
    if cutoff is not None:
        out = np.minimum(out, cutoff)
    return out


def r3_eval(t1, t2, t3, xi: float, lam: float, cutoff: float | None = None):
    """Glued distances of three triangle states (scalar convenience)."""
    for t in (t1, t2, t3):
        if not triangle_ok(*t):
            raise ValueError(f"input {t} violates the triangle inequality")
    out = r3_many(np.asarray(t1, float)[None], np.asarray(t2, float)[None],
                  np.asarray(t3, float)[None], np.array([xi]), lam, cutoff)[0]
    return float(out[0]), float(out[1]), float(out[2])


def glue_step_3(
    ens: TriangleEnsemble,
    m: dist.FactorLaw,
    lam: float,
    cutoff: float | None,
    n_out: int,
    key: rng.Key,
) -> TriangleEnsemble:
    """Resampling Monte Carlo generation of the gasket glueing operator."""
    idx = rng.blocked(n_out, lambda g, k: g.integers(0, ens.n, size=(k, 3)), key, "glue3-idx")
    xi = rng.blocked(n_out, lambda g, k: dist.draw_factors(m, g, k), key, "glue3-xi")
    s = ens.states
    out = r3_many(s[idx[:, 0]], s[idx[:, 1]], s[idx[:, 2]], xi, lam, cutoff)
    return TriangleEnsemble(out)


def lambda_cr_sierpinski(
    m: dist.FactorLaw,
    N: int = 50_000,
    k: int = 50,
    warmup: int = 10,
    reps: int = 8,
    key: rng.Key = (0,),
):
    """Drift-of-log-median of the perimeter under lam=1 dynamics."""
    from . import critical  # late import; critical has the estimate container

    if min(N, k, reps) < 1:
        raise ValueError("N, k, reps must all be >= 1")
    slopes = []
    for r in range(reps):
        ens = constant_ensemble(1.0, 1.0, 1.0, N)
        logmed, scale = [], 1.0
        for g in range(warmup + k):
            ens = glue_step_3(ens, m, 1.0, None, N, ((key, "rep", r), "gen", g))
            per = np.sort(ens.perimeter())
            med = float(per[max(0, math.ceil(0.5 * N) - 1)])  # same quantile convention as dist
            if med == 0.0 or math.isinf(med):
                raise critical.DriftError(f"degenerate perimeter median {med}")
            if g >= warmup:
                logmed.append(math.log(med) + math.log(scale))
            ens = TriangleEnsemble(ens.states / med)
            scale *= med
        x = np.arange(len(logmed), dtype=float)
        x -= x.mean()
        y = np.array(logmed)
        slopes.append(float((x * (y - y.mean())).sum() / (x * x).sum()))
    slopes = np.array(slopes)
    return critical.DriftEstimate(
        log_lambda_cr=float(-slopes.mean()),
        stderr=float(slopes.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0,
        generations=k,
        sample_size=N,
        warmup=warmup,
        reps=reps,
    )


# ---------------------------------------------------------------------------
# the partition map theta_Sigma


@dataclass(frozen=True)
class PartitionDistribution:
    probs: tuple[float, float, float, float, float]  # ordered as PARTITIONS

    def __post_init__(self):
        p = tuple(float(v) for v in self.probs)
        if len(p) != 5 or any(v < 0 for v in p) or abs(sum(p) - 1.0) > 1e-12:
            raise ValueError("need 5 nonnegative probabilities summing to 1")
        object.__setattr__(self, "probs", p)

    def to_json(self) -> dict:
        return dict(zip(PARTITIONS, self.probs))

    @staticmethod
    def from_json(doc: dict) -> "PartitionDistribution":
        return PartitionDistribution(tuple(float(doc[k]) for k in PARTITIONS))

    @staticmethod
    def point(name: str) -> "PartitionDistribution":
        probs = [0.0] * 5
        probs[PARTITIONS.index(name)] = 1.0
        return PartitionDistribution(tuple(probs))

    @staticmethod
    def uniform() -> "PartitionDistribution":
        return PartitionDistribution((0.2,) * 5)


def q1(P: PartitionDistribution) -> float:
    """Probability that B1 is connected to at least one other vertex."""
    return P.probs[1] + P.probs[3] + P.probs[4]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        self.parent[self.find(i)] = self.find(j)


def _glue_partitions(ids: tuple[int, int, int]) -> int:
    """Partition of {B1,B2,B3} induced by glueing three child partitions."""
    uf = _UnionFind(6)
    for child, pid in enumerate(ids):
        for block in _PARTITION_BLOCKS[pid]:
            anchor = _CHILD_VERTEX[child][block[0]]
            for slot in block[1:]:
                uf.union(anchor, _CHILD_VERTEX[child][slot])
    r1, r2, r3 = uf.find(0), uf.find(1), uf.find(2)
    if r1 == r2 == r3:
        return 4  # together
    if r1 == r2:
        return 1  # pair12
    if r2 == r3:
        return 2  # pair23
    if r3 == r1:
        return 3  # pair31
    return 0  # singletons


_THETA_TABLE = {
    ids: _glue_partitions(ids) for ids in itertools.product(range(5), repeat=3)
}


def theta_sigma(P: PartitionDistribution) -> PartitionDistribution:
    """Exact pushforward over the 125 child-partition triples."""
    out = [0.0] * 5
    p = P.probs
    for ids, target in _THETA_TABLE.items():
        out[target] += p[ids[0]] * p[ids[1]] * p[ids[2]]
    total = sum(out)
    return PartitionDistribution(tuple(v / total for v in out))


def theta_sigma_orbit(
    P0: PartitionDistribution, n_steps: int, tol: float = 1e-9
) -> tuple[list[PartitionDistribution], str]:
    """Iterate theta_Sigma; classify the limit extreme or report unresolved."""
    traj = [P0]
    current = P0
    for _ in range(n_steps):
        for name, prob in zip(PARTITIONS, current.probs):
            if prob >= 1.0 - tol:
                return traj, name
        current = theta_sigma(current)
        traj.append(current)
    for name, prob in zip(PARTITIONS, current.probs):
        if prob >= 1.0 - tol:
            return traj, name
    return traj, "unresolved"
