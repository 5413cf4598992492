"""Information-flow DAGs and data-incest removal.

Nodes are 0-based and topologically numbered: an edge ``j -> i`` requires
``j < i``.  ``A[m, n] = 1`` means node m's action reaches node n directly;
``T[m, n] = 1`` means some directed path (possibly empty) leads from m to n.

For node n the fair rating is the posterior given every action that can
reach n.  It is a weighted sum of the earlier public log-beliefs with
integer weights ``w = T[:n, :n]^{-1} T[:n, n]``; negative weights subtract
information that arrived along more than one path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .social_learning import (
    _log,
    as_belief,
    check_costs,
    check_observation_model,
    myopic_action,
    normalize_log,
    private_belief,
    social_learning_filter,
)


class IncestError(ValueError):
    """Invalid DAG, or a fair rating that the graph cannot deliver."""

    def __init__(self, message: str, witness: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.witness = [] if witness is None else [int(j) for j in witness]


@dataclass
class FlowDag:
    """Append-only information-flow DAG.

    Attributes:
        adjacency: ``(n, n)`` 0/1 matrix, strictly upper triangular.
        agents: agent label of each node (``-1`` when unknown).
        epochs: time index of each node (``-1`` when unknown).
    """

    adjacency: np.ndarray
    agents: np.ndarray = field(default=None)
    epochs: np.ndarray = field(default=None)

    def __post_init__(self):
        A = np.asarray(self.adjacency)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise IncestError("adjacency must be square")
        if np.any((A != 0) & (A != 1)):
            raise IncestError("adjacency entries must be 0 or 1")
        if np.any(np.tril(A)):
            i, j = np.argwhere(np.tril(A))[0]
            raise IncestError(f"edge {j} -> {i} does not go forward in time (need j < i)")
        self.adjacency = A.astype(np.int8)
        n = A.shape[0]
        self.agents = np.full(n, -1, dtype=np.int64) if self.agents is None else np.asarray(self.agents, dtype=np.int64)
        self.epochs = np.full(n, -1, dtype=np.int64) if self.epochs is None else np.asarray(self.epochs, dtype=np.int64)
        if self.agents.shape != (n,) or self.epochs.shape != (n,):
            raise IncestError("agents and epochs need one entry per node")

    @classmethod
    def from_edges(
        cls,
        n_nodes: int,
        edges: Sequence[Sequence[int]],
        agents: Optional[Sequence[int]] = None,
        epochs: Optional[Sequence[int]] = None,
    ) -> "FlowDag":
        """Build from ``(j, i)`` pairs meaning ``j -> i``.

        Raises:
            IncestError: ids out of range, ``j >= i``, or repeated edges.
        """
        A = np.zeros((n_nodes, n_nodes), dtype=np.int8)
        for k, (j, i) in enumerate(edges):
            j, i = int(j), int(i)
            if not (0 <= j < n_nodes and 0 <= i < n_nodes):
                raise IncestError(f"edge {k}: node id out of range in ({j}, {i})")
            if j >= i:
                raise IncestError(f"edge {k}: {j} -> {i} must satisfy j < i")
            if A[j, i]:
                raise IncestError(f"edge {k}: duplicate edge {j} -> {i}")
            A[j, i] = 1
        return cls(A, agents, epochs)

    @classmethod
    def from_schedule(cls, n_agents: int, n_epochs: int, edges: Sequence[Sequence[int]]) -> "FlowDag":
        """Nodes for agents ``s`` at epochs ``k`` numbered ``n = s + S k``."""
        n = n_agents * n_epochs
        idx = np.arange(n)
        return cls.from_edges(n, edges, agents=idx % n_agents, epochs=idx // n_agents)

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    def edges(self) -> list:
        return [(int(j), int(i)) for j, i in np.argwhere(self.adjacency)]

    def add_node(self, parents: Sequence[int], agent: int = -1, epoch: int = -1) -> int:
        """Append a node fed by ``parents``; returns its id.  Earlier blocks are unchanged."""
        n = self.n_nodes
        if any(not 0 <= int(p) < n for p in parents):
            raise IncestError(f"parents must be existing nodes 0..{n - 1}")
        A = np.zeros((n + 1, n + 1), dtype=np.int8)
        A[:n, :n] = self.adjacency
        A[list(map(int, parents)), n] = 1
        self.adjacency = A
        self.agents = np.append(self.agents, agent)
        self.epochs = np.append(self.epochs, epoch)
        return n

    def prefix(self, n: int) -> "FlowDag":
        """The DAG on the first ``n`` nodes."""
        return FlowDag(self.adjacency[:n, :n].copy(), self.agents[:n].copy(), self.epochs[:n].copy())


def node_id(agent: int, epoch: int, n_agents: int) -> int:
    """0-based node index of agent ``agent`` at epoch ``epoch``."""
    return agent + n_agents * epoch


# ------------------------------------------------------------------ closure
def closure(dag: FlowDag) -> np.ndarray:
    """Reachability matrix ``T`` (boolean Warshall), ones on the diagonal."""
    T = dag.adjacency.astype(bool) | np.eye(dag.n_nodes, dtype=bool)
    for k in range(dag.n_nodes):
        T |= np.outer(T[:, k], T[k, :])
    return T


def neighbor_sets(dag: FlowDag, n: int, T: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """``H_n`` (one-hop predecessors) and ``F_n`` (all ancestors) of node n."""
    if not 0 <= n < dag.n_nodes:
        raise IncestError(f"node {n} out of range")
    T = closure(dag) if T is None else T
    H = np.flatnonzero(dag.adjacency[:n, n])
    F = np.flatnonzero(T[:n, n])
    return H, F


def incest_weights(dag: FlowDag, n: int, exact: bool = True, T: Optional[np.ndarray] = None) -> np.ndarray:
    """Solve ``T[:n, :n] w = T[:n, n]`` by back-substitution.

    Args:
        dag: the information-flow graph.
        n: node index; the result has length n (one weight per earlier node).
        exact: integer arithmetic (the system is unit upper triangular with
            0/1 entries, so ``w`` is integral); otherwise float64.
        T: precomputed closure.

    Returns:
        ``w`` as int64 (exact) or float64 array.
    """
    if not 0 <= n < dag.n_nodes:
        raise IncestError(f"node {n} out of range")
    T = closure(dag) if T is None else T
    M = T[:n, :n]
    t = T[:n, n]
    if exact:
        w = [0] * n
        for i in range(n - 1, -1, -1):
            acc = int(t[i])
            for j in np.flatnonzero(M[i, i + 1 :]) + i + 1:
                acc -= w[j]
            w[i] = acc
        return np.array(w, dtype=np.int64)
    Mf = M.astype(float)
    w = np.zeros(n)
    for i in range(n - 1, -1, -1):
        w[i] = t[i] - Mf[i, i + 1 :] @ w[i + 1 :]
    return w


def achievable(dag: FlowDag, n: int, T: Optional[np.ndarray] = None, tol: float = 1e-9) -> tuple[bool, np.ndarray]:
    """Whether node n can form its fair rating from its one-hop predecessors.

    Returns:
        ``(ok, witness)`` where ``witness`` lists nodes j with ``w(j) != 0``
        but no direct edge ``j -> n``.
    """
    w = incest_weights(dag, n, T=T)
    bad = np.flatnonzero((np.abs(w) > tol) & (dag.adjacency[:n, n] == 0))
    return bad.size == 0, bad


def make_achievable(dag: FlowDag) -> FlowDag:
    """Add a direct edge from every witness node.

    A witness j already reaches n (the weights vanish off the ancestor set),
    so the new edges leave the closure, and hence the weights, unchanged.
    """
    A = dag.adjacency.copy()
    T = closure(dag)
    for n in range(dag.n_nodes):
        _, bad = achievable(dag, n, T=T)
        A[bad, n] = 1
    return FlowDag(A, dag.agents.copy(), dag.epochs.copy())


# ------------------------------------------------------------------- fusion
def fair_rating(log_beliefs: np.ndarray, w: Sequence[float], log_prior: Optional[np.ndarray] = None) -> np.ndarray:
    """Fair log-rating ``l_{n-} = log pi0 + sum_m w(m) (l_m - log pi0)``.

    Each ``l_m`` (row m) is the log of node m's public belief, up to an
    additive constant.  With ``log_prior`` omitted the plain combination
    ``sum_m w(m) l_m`` is returned, which matches the corrected form up to a
    constant whenever the prior is uniform.  A state that any weighted node
    has ruled out (``-inf``) stays ruled out.

    Returns:
        Unnormalised log-belief.
    """
    w = np.asarray(w, dtype=float)
    L = np.asarray(log_beliefs, dtype=float)
    if L.size == 0:
        L = L.reshape(0, 0 if log_prior is None else np.size(log_prior))
    if L.ndim != 2 or L.shape[0] != w.size:
        raise IncestError(f"need one log-belief row per weight ({w.size}), got shape {L.shape}")
    base = np.zeros(L.shape[1]) if log_prior is None else np.asarray(log_prior, dtype=float)
    used, wu = L[w != 0], w[w != 0]
    dead = np.isneginf(base) | np.any(np.isneginf(used), axis=0)
    finite_base = np.where(np.isneginf(base), 0.0, base)
    out = finite_base + wu @ (np.where(np.isneginf(used), 0.0, used) - finite_base)
    out[dead] = -np.inf
    return out


def naive_fusion(beliefs: Sequence[Sequence[float]]) -> np.ndarray:
    """Normalised product of the given beliefs (double counts shared information)."""
    P = np.atleast_2d(np.asarray(beliefs, dtype=float))
    if P.shape[0] == 0:
        raise IncestError("naive fusion of an empty set of beliefs")
    return normalize_log(_log(P).sum(axis=0))


# --------------------------------------------------------------- simulation
@dataclass
class ReputationRun:
    """Per-node record of a reputation-network run.

    Attributes:
        observations: private observation of each node.
        actions: action broadcast by each node.
        prior_beliefs: belief each node formed from its predecessors
            (fair rating or naive fusion).
        public_beliefs: belief after the node's own action.
    """

    observations: np.ndarray
    actions: np.ndarray
    prior_beliefs: np.ndarray
    public_beliefs: np.ndarray


MODES = ("fair", "naive")


def propagate(
    dag: FlowDag,
    B,
    costs,
    observations: Sequence[int],
    mode: str = "fair",
    prior=None,
    require_achievable: bool = True,
) -> ReputationRun:
    """Run the protocol on a DAG for a given observation vector.

    Each node fuses what reaches it, updates on its own observation, acts
    myopically and publishes the post-action public belief.

    Args:
        dag: information-flow graph.
        B: observation model ``B[i, y]``.
        costs: cost matrix ``c[i, a]``.
        observations: one observation per node.
        mode: ``"fair"`` (incest weights) or ``"naive"`` (product of the
            one-hop predecessors' beliefs).
        prior: common prior; uniform when omitted.
        require_achievable: in fair mode, refuse nodes whose fair rating
            needs beliefs beyond their one-hop predecessors.  When False the
            fair rating is computed from all earlier public beliefs, as a
            network administrator would.

    Raises:
        IncestError: unknown mode, wrong observation count, or a
            non-achievable node (``witness`` lists the offending nodes).
    """
    if mode not in MODES:
        raise IncestError(f"mode must be one of {MODES}, got {mode!r}")
    B = check_observation_model(B)
    c = check_costs(costs)
    X = B.shape[0]
    pi0 = as_belief(np.full(X, 1.0 / X) if prior is None else prior)
    log_pi0 = _log(pi0)
    ys = np.asarray(observations, dtype=np.int64)
    n_nodes = dag.n_nodes
    if ys.shape != (n_nodes,):
        raise IncestError(f"need {n_nodes} observations, got {ys.size}")
    T = closure(dag)
    L = np.empty((n_nodes, X))
    prior_b = np.empty((n_nodes, X))
    public = np.empty((n_nodes, X))
    actions = np.empty(n_nodes, dtype=np.int64)
    for n in range(n_nodes):
        if mode == "fair":
            w = incest_weights(dag, n, T=T)
            if require_achievable:
                ok, bad = achievable(dag, n, T=T)
                if not ok:
                    raise IncestError(f"node {n}: fair rating not achievable from one-hop beliefs", bad)
            before = normalize_log(fair_rating(L[:n], w, log_pi0))
        else:
            H = np.flatnonzero(dag.adjacency[:n, n])
            before = naive_fusion(public[H]) if H.size else pi0.copy()
        eta = private_belief(before, B, int(ys[n]))
        actions[n] = myopic_action(eta, c)
        public[n] = social_learning_filter(before, int(actions[n]), B, c)
        prior_b[n] = before
        L[n] = _log(public[n])
    return ReputationRun(ys, actions, prior_b, public)


def simulate_reputation(
    dag: FlowDag,
    B,
    costs,
    true_state: int,
    mode: str,
    seed: int,
    prior=None,
    require_achievable: bool = True,
) -> ReputationRun:
    """Draw one observation per node from ``B[true_state]`` and run :func:`propagate`."""
    B = check_observation_model(B)
    if not 0 <= true_state < B.shape[0]:
        raise IncestError(f"true state {true_state} out of range")
    rng = np.random.default_rng(seed)
    ys = rng.choice(B.shape[1], size=dag.n_nodes, p=B[true_state])
    return propagate(dag, B, costs, ys, mode, prior, require_achievable)


# ------------------------------------------------------------ generators/IO
def random_dag(n_nodes: int, edge_prob: float, rng: np.random.Generator) -> FlowDag:
    """Each forward pair ``j < i`` linked independently with ``edge_prob``."""
    A = np.triu(rng.random((n_nodes, n_nodes)) < edge_prob, 1).astype(np.int8)
    return FlowDag(A)


def seven_node_example() -> FlowDag:
    """Two agents; ``A[0, 2] = 1`` etc.  Node 6 has ``H = {0, 4, 5}`` and ``F = {0..5}``."""
    edges = [(0, 2), (0, 3), (0, 6), (1, 3), (2, 4), (3, 5), (4, 6), (5, 6)]
    return FlowDag.from_edges(7, edges, agents=[0, 1, 0, 1, 0, 1, 0], epochs=[0, 0, 1, 1, 2, 2, 3])


def selective_memory_example() -> FlowDag:
    """The seven-node graph with nodes 0, 2, 3 and 6 belonging to one individual.

    At node 6 that individual recalls nodes 4 and 0 but not node 2.
    """
    dag = seven_node_example()
    return FlowDag(dag.adjacency.copy(), agents=[0, 1, 0, 0, 2, 3, 0], epochs=dag.epochs.copy())


def double_path_example() -> FlowDag:
    """The seven-node graph without the direct edge ``0 -> 6``.

    Node 0 reaches node 6 along two paths and node 6 has no way to subtract
    the duplicate, so the fair rating at node 6 is not achievable.
    """
    dag = seven_node_example()
    A = dag.adjacency.copy()
    A[0, 6] = 0
    return FlowDag(A, dag.agents.copy(), dag.epochs.copy())


FIXTURES = {
    "seven_node": seven_node_example,
    "selective_memory": selective_memory_example,
    "double_path": double_path_example,
}


def load_dag(path: Union[str, Path]) -> FlowDag:
    """Read ``{"nodes": [{"id", "agent", "epoch"}...], "edges": [[j, i]...]}``.

    Raises:
        IncestError: malformed JSON, ids not ``0..n-1``, or ``j >= i``.
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IncestError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) - {"nodes", "edges"} or "nodes" not in data:
        raise IncestError(f"{path}: expected an object with keys 'nodes' and 'edges'")
    nodes = sorted(data["nodes"], key=lambda d: d.get("id", -1))
    ids = [d.get("id") for d in nodes]
    if ids != list(range(len(nodes))):
        raise IncestError(f"{path}: node ids must be 0..{len(nodes) - 1}")
    return FlowDag.from_edges(
        len(nodes),
        data.get("edges", []),
        agents=[int(d.get("agent", -1)) for d in nodes],
        epochs=[int(d.get("epoch", -1)) for d in nodes],
    )


def save_dag(dag: FlowDag, path: Union[str, Path]) -> None:
    nodes = [{"id": k, "agent": int(a), "epoch": int(e)} for k, (a, e) in enumerate(zip(dag.agents, dag.epochs))]
    Path(path).write_text(json.dumps({"nodes": nodes, "edges": [list(e) for e in dag.edges()]}, indent=1) + "\n")
