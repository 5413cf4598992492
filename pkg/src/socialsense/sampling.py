"""Estimating the distribution of node values (sentiment) from samples.

Three schemes are provided:

* uniform sampling of nodes within one degree class;
* social sampling, where each respondent reports its neighbours' values
  weighted by the reciprocal of the neighbours' degrees;
* respondent-driven sampling (RDS), a weighted random walk whose visits are
  reweighted by the inverse stationary probability.

Values are integer codes ``0..Y-1``.  All sampling is with replacement.
"""
from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .network import Graph, is_bipartite, is_connected


class SamplingError(ValueError):
    """Invalid sampling request (empty population, bad walk graph, ...)."""


@dataclass(frozen=True)
class SentimentEstimate:
    """Estimated pmf over values ``0..Y-1``.

    Attributes:
        pmf: estimated probabilities.
        sample_count: number of sampled nodes (respondents or walk visits).
        degree: the degree class sampled, or None for the whole graph.
    """

    pmf: np.ndarray
    sample_count: int
    degree: Optional[int] = None


EdgeWeights = Mapping[tuple, float]


@dataclass(frozen=True)
class WalkConfig:
    """Recruitment-walk settings.

    Attributes:
        walk_length: number of recorded visits after burn-in.
        burn_in: discarded initial steps; defaults to ``walk_length // 10``.
        start_node: first node (id in the full graph); defaults to the
            lowest-numbered node of the walk's population.
        edge_weights: symmetric weights keyed by node pairs; missing edges
            get weight 1.
    """

    walk_length: int
    burn_in: Optional[int] = None
    start_node: Optional[int] = None
    edge_weights: Optional[EdgeWeights] = None

    @property
    def effective_burn_in(self) -> int:
        return self.walk_length // 10 if self.burn_in is None else self.burn_in


def _values(graph: Graph, node_values: Sequence[int], n_values: Optional[int]) -> tuple[np.ndarray, int]:
    y = np.asarray(node_values)
    if y.shape != (graph.n_nodes,):
        raise SamplingError(f"expected {graph.n_nodes} node values, got shape {y.shape}")
    if y.size and (np.any(y < 0) or np.any(y != np.round(y))):
        raise SamplingError("node values must be nonnegative integer codes")
    y = y.astype(np.int64)
    top = int(y.max(initial=-1)) + 1
    Y = top if n_values is None else int(n_values)
    if Y < top or Y < 1:
        raise SamplingError(f"n_values={Y} too small for the largest value code {top - 1}")
    return y, Y


def census(graph: Graph, node_values: Sequence[int], degree: Optional[int] = None, n_values: Optional[int] = None) -> np.ndarray:
    """Exact value pmf over all nodes, or over the nodes of one degree."""
    y, Y = _values(graph, node_values, n_values)
    if degree is not None:
        y = y[graph.degrees == degree]
    if y.size == 0:
        raise SamplingError("census over an empty population")
    return np.bincount(y, minlength=Y) / y.size


def uniform_sample(
    graph: Graph,
    node_values: Sequence[int],
    degree: int,
    sample_size: int,
    seed: int,
    n_values: Optional[int] = None,
) -> SentimentEstimate:
    """Empirical value pmf from i.i.d. uniform draws among degree-``degree`` nodes.

    Raises:
        SamplingError: no node has this degree, or ``sample_size < 1``.
    """
    y, Y = _values(graph, node_values, n_values)
    pool = np.flatnonzero(graph.degrees == degree)
    if pool.size == 0:
        raise SamplingError(f"no nodes of degree {degree}")
    if sample_size < 1:
        raise SamplingError("sample_size must be at least 1")
    rng = np.random.default_rng(seed)
    picks = pool[rng.integers(pool.size, size=sample_size)]
    return SentimentEstimate(np.bincount(y[picks], minlength=Y) / sample_size, sample_size, degree)


def social_sample(
    graph: Graph,
    node_values: Sequence[int],
    sample_size: int,
    seed: int,
    n_values: Optional[int] = None,
) -> SentimentEstimate:
    """Degree-corrected social sampling.

    Respondents are drawn uniformly from nodes with at least one neighbour.
    Respondent m reports ``s_m(y) = sum over neighbours n of 1{y_n = y} / d(n)``.
    Averaged over a uniform respondent each node n is counted with total
    weight ``1/N``, so the ratio ``sum_l s_l / sum_l |s_l|`` targets the census
    over nodes of positive degree; hubs are not over-represented.

    Raises:
        SamplingError: the graph has no edges, or ``sample_size < 1``.
    """
    y, Y = _values(graph, node_values, n_values)
    deg = graph.degrees
    pool = np.flatnonzero(deg > 0)
    if pool.size == 0:
        raise SamplingError("social sampling needs a graph with edges")
    if sample_size < 1:
        raise SamplingError("sample_size must be at least 1")
    # per-node report, precomputed once
    inv = 1.0 / np.maximum(deg, 1)
    reports = np.zeros((graph.n_nodes, Y))
    for m in pool:
        nb = graph.neighbors[m]
        reports[m] = np.bincount(y[nb], weights=inv[nb], minlength=Y)
    rng = np.random.default_rng(seed)
    picks = pool[rng.integers(pool.size, size=sample_size)]
    total = reports[picks].sum(axis=0)
    return SentimentEstimate(total / total.sum(), sample_size, None)


# --------------------------------------------------------------------- RDS
@dataclass(frozen=True)
class WalkGraph:
    """The population an RDS walk moves on, with its transition weights.

    Attributes:
        graph: graph on local ids ``0..n-1``.
        nodes: full-graph id of each local node.
        weights: per local node, weights aligned with ``graph.neighbors``.
    """

    graph: Graph
    nodes: np.ndarray
    weights: tuple

    def stationary(self) -> np.ndarray:
        """``pi(m) = sum_n w(m, n) / sum_{m, n} w(m, n)``."""
        strength = np.array([w.sum() for w in self.weights])
        return strength / strength.sum()

    def transition_matrix(self) -> np.ndarray:
        """Dense ``P[m, n] = w(m, n) / sum_k w(m, k)`` (for small graphs)."""
        n = self.graph.n_nodes
        P = np.zeros((n, n))
        for m, (nb, w) in enumerate(zip(self.graph.neighbors, self.weights)):
            P[m, nb] = w / w.sum()
        return P


def walk_graph(graph: Graph, degree: Optional[int] = None, edge_weights: Optional[EdgeWeights] = None) -> WalkGraph:
    """Build and validate the graph an RDS walk runs on.

    Args:
        graph: full social graph.
        degree: restrict the walk to the subgraph induced by nodes of this
            degree; None walks on the whole graph.
        edge_weights: symmetric positive weights keyed by ``(u, v)`` in
            full-graph ids; unlisted edges weigh 1.

    Raises:
        SamplingError: weights on non-edges, asymmetric or nonpositive
            weights, zero total weight, or a disconnected or bipartite walk
            graph (the walk would be reducible or periodic).
    """
    if degree is None:
        sub, nodes = graph, np.arange(graph.n_nodes)
    else:
        nodes = np.flatnonzero(graph.degrees == degree)
        if nodes.size == 0:
            raise SamplingError(f"no nodes of degree {degree}")
        sub, nodes = graph.subgraph(nodes)
    lookup = {}
    for (u, v), w in (edge_weights or {}).items():
        u, v = int(u), int(v)
        if not graph.has_edge(u, v):
            raise SamplingError(f"weight given for non-edge ({u}, {v})")
        if not w > 0:
            raise SamplingError(f"edge weight for ({u}, {v}) must be positive")
        key = (min(u, v), max(u, v))
        if key in lookup and lookup[key] != w:
            raise SamplingError(f"asymmetric weights on edge {key}")
        lookup[key] = float(w)
    weights = []
    for m, nb in enumerate(sub.neighbors):
        gm = int(nodes[m])
        weights.append(np.array([lookup.get((min(gm, int(nodes[n])), max(gm, int(nodes[n]))), 1.0) for n in nb]))
    if sum(w.sum() for w in weights) <= 0:
        raise SamplingError("total edge weight is zero: the walk cannot move")
    if not is_connected(sub):
        raise SamplingError("walk graph is disconnected (chain not irreducible)")
    if is_bipartite(sub):
        raise SamplingError("walk graph is bipartite (chain is periodic)")
    return WalkGraph(sub, nodes, tuple(weights))


def rds_walk(wg: WalkGraph, walk: WalkConfig, seed: int) -> np.ndarray:
    """Local ids of the recorded visits of a recruitment walk."""
    if walk.walk_length < 1:
        raise SamplingError("walk_length must be at least 1")
    burn = walk.effective_burn_in
    if burn < 0:
        raise SamplingError("burn_in must be nonnegative")
    if walk.start_node is None:
        m = 0
    else:
        where = np.flatnonzero(wg.nodes == walk.start_node)
        if where.size == 0:
            raise SamplingError(f"start node {walk.start_node} is not in the walk population")
        m = int(where[0])
    nbrs = [a.tolist() for a in wg.graph.neighbors]
    cum = [np.cumsum(w).tolist() for w in wg.weights]
    total = burn + walk.walk_length
    coins = np.random.default_rng(seed).random(total).tolist()
    out = np.empty(walk.walk_length, dtype=np.int64)
    for k in range(total):
        c = cum[m]
        m = nbrs[m][min(bisect_right(c, coins[k] * c[-1]), len(c) - 1)]
        if k >= burn:
            out[k - burn] = m
    return out


def rds_pmf(
    graph: Graph,
    node_values: Sequence[int],
    walk: WalkConfig,
    seed: int,
    degree: Optional[int] = None,
    n_values: Optional[int] = None,
) -> SentimentEstimate:
    """Inverse-stationary-weighted value pmf from one recruitment walk."""
    y, Y = _values(graph, node_values, n_values)
    wg = walk_graph(graph, degree, walk.edge_weights)
    visits = rds_walk(wg, walk, seed)
    inv = 1.0 / wg.stationary()[visits]
    pmf = np.bincount(y[wg.nodes[visits]], weights=inv, minlength=Y)
    return SentimentEstimate(pmf / inv.sum(), visits.size, degree)


def rds_estimate(
    graph: Graph,
    node_values: Sequence[int],
    walk: WalkConfig,
    value: int,
    seed: int,
    degree: Optional[int] = None,
) -> float:
    """Ratio estimate of the fraction of nodes holding ``value``.

    Computes ``sum_l 1{y(m_l) = value} / pi(m_l)  /  sum_l 1 / pi(m_l)`` over
    the recorded visits ``m_l`` of the walk.

    Args:
        graph: full social graph.
        node_values: value code per node.
        walk: walk settings.
        value: the value whose frequency is estimated.
        seed: RNG seed.
        degree: restrict the walk to degree-``degree`` nodes.

    Raises:
        SamplingError: see :func:`walk_graph`.
    """
    y, Y = _values(graph, node_values, None)
    est = rds_pmf(graph, y, walk, seed, degree, max(Y, int(value) + 1))
    return float(est.pmf[int(value)])


def detailed_balance_gap(wg: WalkGraph) -> float:
    """``max |pi(m) P(m, n) - pi(n) P(n, m)|`` over all pairs."""
    P = wg.transition_matrix()
    flow = wg.stationary()[:, None] * P
    return float(np.abs(flow - flow.T).max(initial=0.0))


# ---------------------------------------------------------------------- I/O
def read_node_values(path: Union[str, Path], n_nodes: Optional[int] = None) -> np.ndarray:
    """Read a ``node,value`` CSV (header required) into a value vector.

    Raises:
        SamplingError: malformed rows (with line numbers), duplicate or
            missing nodes.
    """
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SamplingError(f"{path}: empty file")
        if [h.strip() for h in header] != ["node", "value"]:
            raise SamplingError(f"{path}: line 1: expected header 'node,value'")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise SamplingError(f"{path}: line {line}: expected 2 columns, got {len(row)}")
            try:
                node, value = int(row[0]), int(row[1])
            except ValueError:
                raise SamplingError(f"{path}: line {line}: node and value must be integers") from None
            if node < 0 or value < 0:
                raise SamplingError(f"{path}: line {line}: negative node or value")
            if node in rows:
                raise SamplingError(f"{path}: line {line}: duplicate node {node}")
            rows[node] = value
    n = (max(rows) + 1 if rows else 0) if n_nodes is None else n_nodes
    missing = sorted(set(range(n)) - rows.keys())
    if missing:
        raise SamplingError(f"{path}: no value for node {missing[0]}")
    if any(k >= n for k in rows):
        raise SamplingError(f"{path}: node id beyond graph size {n}")
    return np.array([rows[k] for k in range(n)], dtype=np.int64)
