"""Undirected social networks: representation, generators and degree statistics.

Nodes are dense integers ``0..N-1``.  A :class:`Graph` stores one sorted
neighbour array per node and a degree cap ``max_degree`` (the bound on all
degrees that sizes every per-degree array downstream).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np


class GraphError(ValueError):
    """Invalid graph data or an unrealisable generator request."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    Attributes:
        n_nodes: number of nodes N.
        neighbors: tuple of sorted int arrays, one per node.
        max_degree: degree cap; every degree is at most this value.
    """

    n_nodes: int
    neighbors: tuple
    max_degree: int

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        edges: Iterable[Sequence[int]],
        max_degree: Optional[int] = None,
        strict: bool = True,
    ) -> "Graph":
        """Build a graph from an undirected edge list.

        Args:
            n_nodes: number of nodes.
            edges: pairs ``(u, v)``; each undirected edge listed once.
            max_degree: degree cap; defaults to the largest degree present.
            strict: reject self-loops and repeated edges instead of dropping them.

        Returns:
            The graph.

        Raises:
            GraphError: bad node ids, self-loops or duplicates (strict), or a
                degree above ``max_degree``.
        """
        if n_nodes < 0:
            raise GraphError("node count must be nonnegative")
        adj = [set() for _ in range(n_nodes)]
        for k, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if not (0 <= u < n_nodes and 0 <= v < n_nodes):
                raise GraphError(f"edge {k}: node id out of range 0..{n_nodes - 1}: ({u}, {v})")
            if u == v:
                if strict:
                    raise GraphError(f"edge {k}: self-loop at node {u}")
                continue
            if v in adj[u]:
                if strict:
                    raise GraphError(f"edge {k}: duplicate edge ({u}, {v})")
                continue
            adj[u].add(v)
            adj[v].add(u)
        nbrs = tuple(np.array(sorted(a), dtype=np.int64) for a in adj)
        top = max((len(a) for a in adj), default=0)
        if max_degree is None:
            max_degree = top
        elif top > max_degree:
            raise GraphError(f"degree {top} exceeds cap {max_degree}")
        return cls(n_nodes=n_nodes, neighbors=nbrs, max_degree=int(max_degree))

    @property
    def degrees(self) -> np.ndarray:
        return np.array([a.size for a in self.neighbors], dtype=np.int64)

    @property
    def n_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> np.ndarray:
        """All edges as an ``(E, 2)`` array with ``u < v``, sorted."""
        out = [(u, v) for u, a in enumerate(self.neighbors) for v in a if u < v]
        return np.array(out, dtype=np.int64).reshape(-1, 2)

    def has_edge(self, u: int, v: int) -> bool:
        a = self.neighbors[u]
        i = np.searchsorted(a, v)
        return bool(i < a.size and a[i] == v)

    def subgraph(self, nodes: Sequence[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on ``nodes``; returns it and the old ids of the new nodes."""
        nodes = np.array(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        index = {int(v): k for k, v in enumerate(nodes)}
        edges = [
            (index[int(u)], index[int(v)])
            for u in nodes
            for v in self.neighbors[u]
            if u < v and int(v) in index
        ]
        return Graph.from_edges(len(nodes), edges, max_degree=self.max_degree), nodes


@dataclass(frozen=True)
class DegreeDistribution:
    """Degree pmf ``P(d)`` and counts ``N(d)`` for ``d = 0..max_degree``."""

    probabilities: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.counts.sum())

    @property
    def max_degree(self) -> int:
        return self.probabilities.size - 1

    def mean_degree(self) -> float:
        return float(np.arange(self.probabilities.size) @ self.probabilities)


def degree_distribution(graph: Graph) -> DegreeDistribution:
    counts = np.bincount(graph.degrees, minlength=graph.max_degree + 1).astype(np.int64)
    n = max(graph.n_nodes, 1)
    return DegreeDistribution(probabilities=counts / n, counts=counts)


def total_variation(p: Sequence[float], q: Sequence[float]) -> float:
    """Total-variation distance between two pmfs (zero-padded to equal length)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    k = max(p.size, q.size)
    p = np.pad(p, (0, k - p.size))
    q = np.pad(q, (0, k - q.size))
    return 0.5 * float(np.abs(p - q).sum())


# ----------------------------------------------------------------- generators
@dataclass(frozen=True)
class ErdosRenyi:
    n_nodes: int
    p: float
    max_degree: Optional[int] = None


@dataclass(frozen=True)
class PowerLaw:
    """Configuration model with degrees drawn from ``P(d) ∝ d^-gamma`` on ``[min_degree, max_degree]``."""

    n_nodes: int
    gamma: float
    max_degree: int
    min_degree: int = 1


@dataclass(frozen=True)
class Configuration:
    """Configuration model with i.i.d. degrees from ``pmf`` (indexed by degree)."""

    n_nodes: int
    pmf: tuple
    max_degree: Optional[int] = None


GraphSpec = Union[ErdosRenyi, PowerLaw, Configuration]

REWIRE_RETRIES = 1000


def power_law_pmf(gamma: float, max_degree: int, min_degree: int = 1) -> np.ndarray:
    """Truncated power-law pmf indexed by degree ``0..max_degree``."""
    if not 1 <= min_degree <= max_degree:
        raise GraphError("need 1 <= min_degree <= max_degree")
    d = np.arange(max_degree + 1, dtype=float)
    w = np.zeros(max_degree + 1)
    w[min_degree:] = d[min_degree:] ** (-gamma)
    return w / w.sum()


def generate_graph(spec: GraphSpec, seed: int) -> Graph:
    """Sample a simple graph from ``spec``; deterministic in ``seed``.

    Raises:
        GraphError: invalid parameters.
    """
    rng = np.random.default_rng(seed)
    if isinstance(spec, ErdosRenyi):
        return _erdos_renyi(spec, rng)
    if isinstance(spec, PowerLaw):
        pmf = power_law_pmf(spec.gamma, spec.max_degree, spec.min_degree)
        return _configuration_from_pmf(spec.n_nodes, pmf, spec.max_degree, rng)
    if isinstance(spec, Configuration):
        pmf = np.asarray(spec.pmf, dtype=float)
        cap = spec.max_degree if spec.max_degree is not None else pmf.size - 1
        return _configuration_from_pmf(spec.n_nodes, pmf, cap, rng)
    raise GraphError(f"unknown graph spec {spec!r}")


def _erdos_renyi(spec: ErdosRenyi, rng: np.random.Generator) -> Graph:
    n, p = spec.n_nodes, spec.p
    if not 0.0 <= p <= 1.0:
        raise GraphError("edge probability must lie in [0, 1]")
    edges = []
    for u in range(n - 1):
        k = rng.binomial(n - u - 1, p)
        if k:
            vs = u + 1 + rng.choice(n - u - 1, size=k, replace=False)
            edges.extend((u, int(v)) for v in np.sort(vs))
    if spec.max_degree is not None:
        # enforce the cap by dropping edges, visiting them in random order
        deg = np.zeros(n, dtype=np.int64)
        kept = []
        for i in rng.permutation(len(edges)):
            u, v = edges[i]
            if deg[u] < spec.max_degree and deg[v] < spec.max_degree:
                deg[u] += 1
                deg[v] += 1
                kept.append((u, v))
        edges = sorted(kept)
    return Graph.from_edges(n, edges, max_degree=spec.max_degree)


def _configuration_from_pmf(n: int, pmf: np.ndarray, cap: int, rng: np.random.Generator) -> Graph:
    if n < 0:
        raise GraphError("node count must be nonnegative")
    if np.any(pmf < 0) or not np.isclose(pmf.sum(), 1.0, atol=1e-9):
        raise GraphError("degree pmf must be nonnegative and sum to 1")
    if cap < pmf.size - 1 and np.any(pmf[cap + 1 :] > 0):
        raise GraphError("degree pmf puts mass above the degree cap")
    support = np.arange(pmf.size)
    degrees = rng.choice(support, size=n, p=pmf)
    if n and degrees.sum() % 2:
        # redraw one node until the stub count is even
        odd = support[support % 2 == 1]
        even = support[support % 2 == 0]
        flip_to = even if degrees[-1] % 2 else odd
        mass = pmf[flip_to]
        if mass.sum() == 0:
            raise GraphError("pmf only supports odd stub totals")
        degrees[-1] = rng.choice(flip_to, p=mass / mass.sum())
    return configuration_graph(degrees, rng, cap)


def configuration_graph(degrees: Sequence[int], rng: np.random.Generator, max_degree: Optional[int] = None) -> Graph:
    """Pair stubs uniformly, then rewire self-loops and multi-edges.

    Each defective edge gets up to ``REWIRE_RETRIES`` double-edge swaps with a
    random partner edge; if all fail the edge is dropped, which lowers two
    degrees by one.

    Raises:
        GraphError: odd stub total or negative degrees.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    if np.any(degrees < 0):
        raise GraphError("degrees must be nonnegative")
    if degrees.sum() % 2:
        raise GraphError(f"odd stub total {int(degrees.sum())}: no graph has this degree sequence")
    n = degrees.size
    stubs = np.repeat(np.arange(n), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)
    edges = [(int(min(a, b)), int(max(a, b))) for a, b in pairs]
    count: dict = {}
    for e in edges:
        count[e] = count.get(e, 0) + 1

    def bad(e):
        return e[0] == e[1] or count[e] > 1

    def key(a, b):
        return (a, b) if a < b else (b, a)

    m = len(edges)
    dropped = []
    for i in range(m):
        if not bad(edges[i]):
            continue
        for _ in range(REWIRE_RETRIES):
            j = int(rng.integers(m))
            if j == i or j in dropped:
                continue
            (a, b), (c, d) = edges[i], edges[j]
            if rng.random() < 0.5:
                c, d = d, c
            e1, e2 = key(a, c), key(b, d)
            if e1[0] == e1[1] or e2[0] == e2[1] or e1 == e2 or count.get(e1, 0) or count.get(e2, 0):
                continue
            for e in (edges[i], edges[j]):
                count[e] -= 1
            edges[i], edges[j] = e1, e2
            count[e1] = 1
            count[e2] = 1
            break
        else:
            count[edges[i]] -= 1
            dropped.append(i)
    drop = set(dropped)
    final = sorted(e for k, e in enumerate(edges) if k not in drop)
    cap = int(degrees.max(initial=0)) if max_degree is None else int(max_degree)
    return Graph.from_edges(n, final, max_degree=cap)


# ---------------------------------------------------------------------- I/O
def read_edge_list(path: Union[str, Path], n_nodes: Optional[int] = None, max_degree: Optional[int] = None) -> Graph:
    """Load ``u v`` lines (0-based ids); blank lines and ``#`` comments are skipped.

    Raises:
        GraphError: malformed line (with its number), self-loop or duplicate edge.
    """
    edges = []
    top = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'u v', got {line.rstrip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError(f"line {lineno}: node ids must be integers") from None
            if u < 0 or v < 0:
                raise GraphError(f"line {lineno}: negative node id")
            edges.append((u, v))
            top = max(top, u, v)
    n = top + 1 if n_nodes is None else n_nodes
    seen = set()
    for lineno, (u, v) in enumerate(edges, 1):
        if u == v:
            raise GraphError(f"edge {lineno}: self-loop at node {u}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise GraphError(f"edge {lineno}: duplicate edge {e}")
        seen.add(e)
    return Graph.from_edges(n, edges, max_degree=max_degree)


def write_edge_list(graph: Graph, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")


def is_connected(graph: Graph) -> bool:
    if graph.n_nodes == 0:
        return True
    seen = np.zeros(graph.n_nodes, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in graph.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return bool(seen.all())


def is_bipartite(graph: Graph) -> bool:
    """Two-colouring by breadth-first search over every component."""
    colour = np.full(graph.n_nodes, -1)
    for s in range(graph.n_nodes):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = [s]
        while queue:
            u = queue.pop(0)
            for v in graph.neighbors[u]:
                if colour[v] < 0:
                    colour[v] = 1 - colour[u]
                    queue.append(int(v))
                elif colour[v] == colour[u]:
                    return False
    return True
