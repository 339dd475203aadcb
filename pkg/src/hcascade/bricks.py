"""Brick graphs and their combinatorics.

A brick is a finite multigraph with two marked vertices I and O.  It
induces three objects used everywhere else in the package:

* the min-plus functional rho: edge lengths -> IO-distance, the minimum
  over simple IO-paths (paths crossing every edge at most once) of the
  summed lengths;
* the pivotal classification of edges (shortcut / bridge / non-pivotal);
* the exact percolation function theta(p) = P(I connected to O when each
  edge is kept independently with probability p) and its fixed points.

Edges are stored oriented (the hierarchical substitution is oriented)
but traversal is undirected: glued metrics are symmetric, and the
distance recursions are orientation-independent.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass

import numpy as np

EDGE_GUARD = 24
PATH_GUARD = 10**6


class GraphError(ValueError):
    """Invalid brick-graph document or guard violation."""


class BracketError(RuntimeError):
    """A fixed-point candidate could not be bracketed or refined."""


@dataclass(frozen=True)
class BrickGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]  # (tail, head), parallel edges allowed
    in_vertex: str
    out_vertex: str

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class PathFunctional:
    graph: BrickGraph
    paths: tuple[frozenset[int], ...]  # edge-index sets, each a simple IO-path
    io_graph_distance: int  # min path cardinality d(I, O)

    @property
    def n_edges(self) -> int:
        return self.graph.n_edges


@dataclass(frozen=True)
class EdgeClass:
    per_edge: tuple[str, ...]  # "shortcut" | "bridge" | "non-pivotal"
    graph_label: str  # "non-pivotal" | "has-bridge" | "has-shortcut"


@dataclass(frozen=True)
class FixedPoint:
    value: float
    stability: str  # "attracting" | "repelling" | "super-attracting"
    derivative: float


@dataclass(frozen=True)
class ThetaAnalysis:
    graph: BrickGraph
    fixed_points: tuple[FixedPoint, ...]


# ---------------------------------------------------------------------------
# construction and validation


def _enumerate_edge_simple_paths(graph: BrickGraph) -> list[frozenset[int]]:
    """All IO-paths crossing every edge at most once (undirected DFS)."""
    incident: dict[str, list[tuple[int, str]]] = {v: [] for v in graph.vertices}
    for i, (a, b) in enumerate(graph.edges):
        incident[a].append((i, b))
        incident[b].append((i, a))

    found: set[frozenset[int]] = set()
    used = [False] * len(graph.edges)

    def dfs(v: str, trail: list[int]) -> None:
        if v == graph.out_vertex and trail:
            found.add(frozenset(trail))
            if len(found) > PATH_GUARD:
                raise GraphError(f"more than {PATH_GUARD} simple IO-paths")
            # a path may continue through O and come back, but any such
            # extension revisits O, where a shorter prefix already ended;
            # min-plus only needs the distinct edge sets, so keep going
        for i, w in incident[v]:
            if not used[i]:
                used[i] = True
                trail.append(i)
                dfs(w, trail)
                trail.pop()
                used[i] = False

    dfs(graph.in_vertex, [])
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def validate(graph: BrickGraph) -> PathFunctional:
    """Check all brick invariants; returns the compiled path functional."""
    if graph.in_vertex == graph.out_vertex:
        raise GraphError("in and out vertices coincide")
    if graph.in_vertex not in graph.vertices or graph.out_vertex not in graph.vertices:
        raise GraphError("marked vertex not in vertex list")
    if len(set(graph.vertices)) != len(graph.vertices):
        raise GraphError("duplicate vertex ids")
    for a, b in graph.edges:
        if a not in graph.vertices or b not in graph.vertices:
            raise GraphError(f"edge ({a},{b}) references unknown vertex")
    if graph.n_edges == 0:
        raise GraphError("no edges (no IO-path)")
    if graph.n_edges > EDGE_GUARD:
        raise GraphError(f"edge count {graph.n_edges} exceeds guard {EDGE_GUARD}")
    io = {graph.in_vertex, graph.out_vertex}
    if graph.n_edges == 1 and set(graph.edges[0]) == io:
        raise GraphError("brick is a single IO-edge")

    paths = _enumerate_edge_simple_paths(graph)
    if not paths:
        raise GraphError("no simple IO-path")
    covered = frozenset().union(*paths)
    missing = [i for i in range(graph.n_edges) if i not in covered]
    if missing:
        raise GraphError(f"edges {missing} lie on no simple IO-path")
    return PathFunctional(
        graph=graph,
        paths=tuple(paths),
        io_graph_distance=min(len(p) for p in paths),
    )


def parse_graph(text) -> BrickGraph:
    """Parse and validate a graph document (JSON text or parsed dict)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise GraphError(f"malformed graph document: {e}") from e
    else:
        doc = text
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    try:
        vertices = tuple(str(v) for v in doc["vertices"])
        edges = tuple((str(a), str(b)) for a, b in doc["edges"])
        in_vertex = str(doc["in"])
        out_vertex = str(doc["out"])
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"malformed graph document: {e}") from e
    graph = BrickGraph(vertices, edges, in_vertex, out_vertex)
    validate(graph)
    return graph


def preset(name: str) -> BrickGraph:
    """Bundled bricks: eight, diamond, interval<d>, parallel2, racket."""
    if name == "eight":
        doc = {
            "vertices": ["I", "v", "O"],
            "edges": [["I", "v"], ["I", "v"], ["v", "O"], ["v", "O"]],
            "in": "I",
            "out": "O",
        }
    elif name == "diamond":
        doc = {
            "vertices": ["I", "a", "b", "O"],
            "edges": [["I", "a"], ["a", "O"], ["I", "b"], ["b", "O"]],
            "in": "I",
            "out": "O",
        }
    elif name == "parallel2":
        doc = {
            "vertices": ["I", "O"],
            "edges": [["I", "O"], ["I", "O"]],
            "in": "I",
            "out": "O",
        }
    elif name == "racket":
        doc = {
            "vertices": ["I", "v", "O"],
            "edges": [["I", "v"], ["v", "O"], ["v", "O"]],
            "in": "I",
            "out": "O",
        }
    elif m := re.fullmatch(r"interval-?(\d+)", name):
        d = int(m.group(1))
        if d < 2:
            raise GraphError("interval preset needs at least 2 edges")
        verts = ["I"] + [f"v{i}" for i in range(1, d)] + ["O"]
        doc = {
            "vertices": verts,
            "edges": [[verts[i], verts[i + 1]] for i in range(d)],
            "in": "I",
            "out": "O",
        }
    else:
        raise GraphError(f"unknown preset {name!r}")
    return parse_graph(doc)


@functools.lru_cache(maxsize=256)
def path_functional(graph: BrickGraph) -> PathFunctional:
    return validate(graph)


# ---------------------------------------------------------------------------
# the min-plus functional


def eval_rho(pf: PathFunctional, lengths) -> float:
    """min over simple IO-paths of the summed edge lengths (inf-safe)."""
    x = np.asarray(lengths, dtype=float)
    if x.shape != (pf.n_edges,):
        raise ValueError(f"expected {pf.n_edges} edge lengths, got shape {x.shape}")
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ValueError("edge lengths must lie in [0, +inf]")
    return float(min(x[list(p)].sum() for p in pf.paths))


def rho_many(pf: PathFunctional, lengths: np.ndarray) -> np.ndarray:
    """Vectorized eval_rho over rows of an (N, n_edges) array."""
    best = None
    for p in pf.paths:
        s = lengths[:, list(p)].sum(axis=1)
        best = s if best is None else np.minimum(best, s)
    return best


def classify_edges(pf: PathFunctional) -> EdgeClass:
    g = pf.graph
    io = {g.in_vertex, g.out_vertex}
    on_all = frozenset.intersection(*pf.paths)
    labels = []
    for i, e in enumerate(g.edges):
        if set(e) == io:
            labels.append("shortcut")
        elif i in on_all:
            labels.append("bridge")
        else:
            labels.append("non-pivotal")
    if "shortcut" in labels:
        graph_label = "has-shortcut"
    elif "bridge" in labels:
        graph_label = "has-bridge"
    else:
        graph_label = "non-pivotal"
    return EdgeClass(per_edge=tuple(labels), graph_label=graph_label)


# ---------------------------------------------------------------------------
# exact percolation function


@functools.lru_cache(maxsize=256)
def _reliability_counts(graph: BrickGraph) -> tuple[int, ...]:
    """N_k = number of k-edge subsets in which I is connected to O.

    A subset connects I to O iff it contains the edge set of some simple
    IO-path, so the check reduces to bitmask containment over all 2^#E
    subsets (guarded by EDGE_GUARD).
    """
    pf = path_functional(graph)
    ne = graph.n_edges
    subsets = np.arange(1 << ne, dtype=np.uint32)
    connected = np.zeros(subsets.shape, dtype=bool)
    for p in pf.paths:
        mask = np.uint32(sum(1 << i for i in p))
        connected |= (subsets & mask) == mask
    sizes = np.bitwise_count(subsets[connected])
    return tuple(int(c) for c in np.bincount(sizes, minlength=ne + 1))


def _theta_poly(graph: BrickGraph, parr: np.ndarray) -> np.ndarray:
    counts = _reliability_counts(graph)
    ne = graph.n_edges
    out = np.zeros_like(parr)
    for k, c in enumerate(counts):
        if c:
            out = out + c * parr**k * (1.0 - parr) ** (ne - k)
    return out


def theta_exact(graph: BrickGraph, p) -> np.ndarray | float:
    """theta(p): exact Bernoulli-percolation IO-connection probability."""
    parr = np.asarray(p, dtype=float)
    if np.any((parr < 0) | (parr > 1)):
        raise ValueError("p must lie in [0, 1]")
    out = _theta_poly(graph, parr)
    return float(out) if np.isscalar(p) or parr.ndim == 0 else out


_FP_GRID = 10_000
_DERIV_STEP = 1e-6
_SUPER_TOL = 1e-6


def _theta_derivative(graph: BrickGraph, p: float) -> float:
    # central difference on the polynomial itself, so endpoints are fine
    lo, hi = np.asarray(p - _DERIV_STEP), np.asarray(p + _DERIV_STEP)
    return float(_theta_poly(graph, hi) - _theta_poly(graph, lo)) / (2 * _DERIV_STEP)


def theta_fixed_points(graph: BrickGraph, tol: float = 1e-12) -> ThetaAnalysis:
    """All roots of theta(p) = p in [0,1] with stability labels.

    theta(0)=0 and theta(1)=1 always hold, so the endpoints are included
    a priori; interior roots come from sign changes of theta(p)-p on a
    uniform grid, refined by bisection; grid points where |theta(p)-p|
    dips below tol without a sign change are probed as tangencies.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = np.linspace(0.0, 1.0, _FP_GRID + 1)
    f = theta_exact(graph, grid) - grid

    roots = [0.0, 1.0]
    interior = f[1:-1]
    signs = np.sign(interior)
    for j in np.nonzero(np.diff(signs) != 0)[0]:
        lo, hi = grid[j + 1], grid[j + 2]
        flo = f[j + 1]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = float(theta_exact(graph, mid)) - mid
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    # tangency probe: near-zero local minima of |f| with no sign change
    absf = np.abs(interior)
    for j in np.nonzero(
        (absf < tol) & (np.r_[True, absf[1:] <= absf[:-1]] & np.r_[absf[:-1] <= absf[1:], True])
    )[0]:
        cand = float(grid[j + 1])
        if all(abs(cand - r) > 10 * tol for r in roots):
            if abs(float(theta_exact(graph, cand)) - cand) > tol:
                raise BracketError(f"tangency candidate at p={cand} did not refine")
            roots.append(cand)

    deduped: list[float] = []
    for r in sorted(roots):
        if not deduped or r - deduped[-1] > 10 * tol:
            deduped.append(r)
    fps = []
    for r in deduped:
        d = _theta_derivative(graph, r)
        if abs(d) < _SUPER_TOL:
            stability = "super-attracting"
        elif d < 1.0:
            stability = "attracting"
        else:
            stability = "repelling"
        fps.append(FixedPoint(value=r, stability=stability, derivative=d))
    return ThetaAnalysis(graph=graph, fixed_points=tuple(fps))
