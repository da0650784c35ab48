"""Directed weighted graphs, Laplacian algebra and the pinning hypothesis.

Edge convention: ``weights[i, j] > 0`` means a link from node ``j`` to node
``i`` (node ``j`` influences node ``i``).  With this convention the Laplacian
is literally ``L = diag(W @ 1) - W``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, EmptyPinSet, GraphFormatError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise DomainError(f"weight matrix must be square and non-empty, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and nonnegative")
        if np.any(np.diag(w) != 0):
            raise DomainError("self-loops are not allowed (nonzero diagonal)")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        return isinstance(other, DirectedGraph) and np.array_equal(self.weights, other.weights)

    def edges(self) -> list[tuple[int, int, float]]:
        """``(i, j, w)`` triples for every link ``j -> i``, sorted by ``(i, j)``."""
        ii, jj = np.nonzero(self.weights)
        return [(int(i), int(j), float(self.weights[i, j])) for i, j in zip(ii, jj)]

    @classmethod
    def from_edges(cls, n: int, edges) -> "DirectedGraph":
        w = np.zeros((n, n))
        for i, j, wt in edges:
            w[i, j] = wt
        return cls(w)


@dataclass(frozen=True, eq=False)
class LaplacianSystem:
    """``L`` with its split ``L = diag(K) - A``."""

    L: np.ndarray
    K: np.ndarray
    A: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class PinSet:
    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        members = tuple(sorted(int(i) for i in self.members))
        if len(set(members)) != len(members):
            raise DomainError(f"duplicate pinned node in {members}")
        for i in members:
            if not 0 <= i < self.n:
                raise DomainError(f"pinned node {i} out of range [0, {self.n})")
        object.__setattr__(self, "members", members)

    @property
    def m(self) -> int:
        return len(self.members)

    def indicator(self) -> np.ndarray:
        d = np.zeros(self.n)
        d[list(self.members)] = 1.0
        return d

    def matrix(self) -> np.ndarray:
        return np.diag(self.indicator())

    def __contains__(self, i) -> bool:
        return i in self.members


@dataclass(frozen=True)
class PinningProblem:
    system: LaplacianSystem
    pins: PinSet
    c: float
    tau_r: float = 0.0
    tau_p: float = 0.0
    s: float = 0.0

    def __post_init__(self):
        for name in ("c", "tau_r", "tau_p"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and nonnegative, got {v}")
        if self.pins.n != self.system.n:
            raise DomainError(f"pin set is for n={self.pins.n}, system has n={self.system.n}")

    @property
    def n(self) -> int:
        return self.system.n

    @property
    def tau_m(self) -> float:
        return max(self.tau_r, self.tau_p)


def erdos_renyi(n: int, p: float, seed: int) -> DirectedGraph:
    """Undirected binary G(n, p) graph.

    Uses ``numpy.random.Generator(PCG64(seed))``; one uniform draw per
    unordered pair ``(i, j), i < j`` in row-major order, and the pair is
    linked (both directions, weight 1) iff the draw is ``< p``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must be in [0, 1], got {p}")
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    w = np.zeros((n, n))
    w[iu[keep], ju[keep]] = 1.0
    w[ju[keep], iu[keep]] = 1.0
    return DirectedGraph(w)


def random_pins(n: int, m: int, seed: int) -> PinSet:
    """``m`` distinct nodes drawn uniformly with ``PCG64(seed)``."""
    if not 0 <= m <= n:
        raise DomainError(f"cannot pin {m} of {n} nodes")
    rng = np.random.Generator(np.random.PCG64(seed))
    return PinSet(tuple(rng.choice(n, size=m, replace=False).tolist()), n)


def laplacian(g: DirectedGraph) -> LaplacianSystem:
    w = g.weights
    K = w.sum(axis=1)
    L = np.diag(K) - w
    return LaplacianSystem(_frozen(L), _frozen(K), _frozen(w))


def normalized(g: DirectedGraph, l: float = 1.0) -> DirectedGraph:
    """Rescale each node's incoming weights so every in-degree equals ``l``.

    Nodes without incoming links are left untouched.
    """
    w = np.array(g.weights)
    deg = w.sum(axis=1)
    nz = deg > 0
    w[nz] *= (l / deg[nz])[:, None]
    return DirectedGraph(w)


@dataclass(frozen=True)
class ComponentReport:
    components: tuple[tuple[int, ...], ...]
    sources: tuple[bool, ...]

    @property
    def source_components(self) -> list[tuple[int, ...]]:
        return [c for c, s in zip(self.components, self.sources) if s]


def strongly_connected_components(g: DirectedGraph) -> ComponentReport:
    """Strong components sorted by smallest member, flagged when they have no
    incoming link from outside (sources of the condensation)."""
    _, labels = connected_components(g.weights.T, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for node, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(node)
    comps = sorted((tuple(v) for v in groups.values()), key=lambda c: c[0])
    sources = []
    for comp in comps:
        inside = np.zeros(g.n, dtype=bool)
        inside[list(comp)] = True
        incoming = g.weights[np.ix_(inside, ~inside)]
        sources.append(not np.any(incoming > 0))
    return ComponentReport(tuple(comps), tuple(sources))


def is_strongly_connected(g: DirectedGraph) -> bool:
    return len(strongly_connected_components(g).components) == 1


def check_hypothesis_H(g: DirectedGraph, pins: PinSet) -> bool:
    """True iff every source strong component contains a pinned node."""
    rep = strongly_connected_components(g)
    return all(any(i in pins for i in comp) for comp in rep.source_components)


def has_spanning_tree(g: DirectedGraph) -> bool:
    # a root reaching every node exists iff the condensation has a single source
    return len(strongly_connected_components(g).source_components) == 1


# -- file format -----------------------------------------------------------

def graph_to_dict(g: DirectedGraph) -> dict:
    return {"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges()]}


def graph_from_dict(data) -> DirectedGraph:
    if not isinstance(data, dict):
        raise GraphFormatError("graph file must hold a JSON object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphFormatError(f"field 'n': expected a positive integer, got {n!r}")
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise GraphFormatError("field 'edges': expected a list")
    w = np.zeros((n, n))
    seen = set()
    for k, e in enumerate(edges):
        where = f"edges[{k}]"
        if not isinstance(e, (list, tuple)) or len(e) != 3:
            raise GraphFormatError(f"{where}: expected [i, j, w], got {e!r}")
        i, j, wt = e
        for name, v in (("i", i), ("j", j)):
            if not isinstance(v, int) or isinstance(v, bool):
                raise GraphFormatError(f"{where}: index {name}={v!r} is not an integer")
            if not 0 <= v < n:
                raise GraphFormatError(f"{where}: index {name}={v} out of range [0, {n})")
        if i == j:
            raise GraphFormatError(f"{where}: self-loop on node {i}")
        if not isinstance(wt, (int, float)) or isinstance(wt, bool) or not math.isfinite(wt) or wt <= 0:
            raise GraphFormatError(f"{where}: weight must be a positive finite number, got {wt!r}")
        if (i, j) in seen:
            raise GraphFormatError(f"{where}: duplicate edge ({i}, {j})")
        seen.add((i, j))
        w[i, j] = float(wt)
    return DirectedGraph(w)


def save_graph(g: DirectedGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g), indent=1) + "\n", encoding="utf-8")


def load_graph(path) -> DirectedGraph:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return graph_from_dict(data)


def complete_graph(n: int) -> DirectedGraph:
    return DirectedGraph(np.ones((n, n)) - np.eye(n))


def empty_graph(n: int) -> DirectedGraph:
    return DirectedGraph(np.zeros((n, n)))


def chain_graph(n: int) -> DirectedGraph:
    """Directed chain ``0 -> 1 -> ... -> n-1`` with unit weights."""
    w = np.zeros((n, n))
    for k in range(n - 1):
        w[k + 1, k] = 1.0
    return DirectedGraph(w)


def random_connected_graph(n: int, seed: int, p: float = 0.5, weighted: bool = False,
                           max_tries: int = 1000) -> DirectedGraph:
    """Undirected connected graph: the first seeded G(n, p) draw that is
    connected, optionally with symmetric weights in [0.5, 2)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    iu, ju = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < p
        vals = rng.uniform(0.5, 2.0, iu.size) if weighted else np.ones(iu.size)
        w = np.zeros((n, n))
        w[iu[keep], ju[keep]] = vals[keep]
        w[ju[keep], iu[keep]] = vals[keep]
        g = DirectedGraph(w)
        if n == 1 or is_strongly_connected(g):
            return g
    raise DomainError(f"no connected G({n}, {p}) draw in {max_tries} tries")


def require_pins(pins: PinSet) -> None:
    if pins.m == 0:
        raise EmptyPinSet("at least one pinned node is required")
