"""SIS diffusion on a network and its mean-field approximation.

The agent-level model updates one uniformly chosen node per step.  A
susceptible node of degree ``d`` with ``a`` infected neighbours becomes
infected with probability ``p01[s, d, a]``; an infected one recovers with
probability ``p10[s, d, a]``, where ``s`` is the state of an exogenous target
process.  The mean-field recursion replaces the true neighbour count with a
binomial draw whose success probability is the infected-link probability
``alpha``.

All per-degree arrays are indexed by degree ``0..max_degree``.  Degree-0
nodes never change state and entry 0 of every ``rho`` vector is kept at 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Optional, Sequence, Union

import numpy as np

from .network import DegreeDistribution, Graph, degree_distribution


class DiffusionError(ValueError):
    pass


@dataclass(frozen=True)
class TargetChain:
    """Finite Markov chain driving the kernel (row-stochastic ``transition``)."""

    transition: np.ndarray
    initial_state: int = 0

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DiffusionError("transition matrix must be square")
        if np.any(P < 0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
            raise DiffusionError("transition rows must be nonnegative and sum to 1")
        if not 0 <= self.initial_state < P.shape[0]:
            raise DiffusionError("initial state out of range")
        object.__setattr__(self, "transition", P)

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    def sample_path(self, steps: int, rng: np.random.Generator) -> np.ndarray:
        """States ``s_0..s_steps``; the chain moves once per diffusion step."""
        path = np.empty(steps + 1, dtype=np.int64)
        path[0] = self.initial_state
        cum = np.cumsum(self.transition, axis=1)
        u = rng.random(steps)
        for k in range(steps):
            path[k + 1] = min(int(np.searchsorted(cum[path[k]], u[k], side="right")), self.n_states - 1)
        return path


@dataclass(frozen=True)
class TransitionKernel:
    """Flip probabilities ``p01[s, d, a]`` and ``p10[s, d, a]`` for ``a <= d``."""

    p01: np.ndarray
    p10: np.ndarray

    def __post_init__(self):
        p01 = np.asarray(self.p01, dtype=float)
        p10 = np.asarray(self.p10, dtype=float)
        if p01.shape != p10.shape or p01.ndim != 3 or p01.shape[1] != p01.shape[2]:
            raise DiffusionError("kernel arrays must share shape (states, D+1, D+1)")
        valid = np.tril(np.ones(p01.shape[1:], dtype=bool))
        for name, p in (("p01", p01), ("p10", p10)):
            v = p[:, valid]
            if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
                raise DiffusionError(f"{name} must lie in [0, 1]")
        object.__setattr__(self, "p01", p01)
        object.__setattr__(self, "p10", p10)

    @property
    def max_degree(self) -> int:
        return self.p01.shape[1] - 1

    @property
    def n_states(self) -> int:
        return self.p01.shape[0]


def adoption_kernel(max_degree: int, thresholds: Sequence[float], p_forget: float) -> TransitionKernel:
    """Threshold adoption: ``p01 = min(a / C(s), 1)`` and ``p10 = p_forget``.

    Args:
        max_degree: degree cap D.
        thresholds: ``C(s)`` for each target state.
        p_forget: constant recovery probability.
    """
    C = np.asarray(thresholds, dtype=float)
    if np.any(C <= 0):
        raise DiffusionError("adoption thresholds must be positive")
    a = np.arange(max_degree + 1, dtype=float)
    row = np.minimum(a[None, :] / C[:, None], 1.0)  # (S, a)
    p01 = np.broadcast_to(row[:, None, :], (C.size, max_degree + 1, max_degree + 1)).copy()
    p10 = np.full_like(p01, float(p_forget))
    mask = np.tril(np.ones((max_degree + 1, max_degree + 1), dtype=bool))
    p01[:, ~mask] = 0.0
    p10[:, ~mask] = 0.0
    return TransitionKernel(p01, p10)


def constant_kernel(max_degree: int, p01: float, p10: float, n_states: int = 1) -> TransitionKernel:
    shape = (n_states, max_degree + 1, max_degree + 1)
    return TransitionKernel(np.full(shape, float(p01)), np.full(shape, float(p10)))


def linear_kernel(max_degree: int, beta: float, p10: float) -> TransitionKernel:
    """Infection probability ``beta * a / d`` (fraction of infected neighbours)."""
    d = np.arange(max_degree + 1, dtype=float)
    a = np.arange(max_degree + 1, dtype=float)
    frac = np.where(d[:, None] > 0, a[None, :] / np.maximum(d[:, None], 1.0), 0.0)
    p01 = np.clip(beta * frac, 0.0, 1.0)
    p01 = np.tril(p01)[None]
    return TransitionKernel(p01, np.full_like(p01, float(p10)))


# ------------------------------------------------------------------ helpers
def infected_link_probability(rho: np.ndarray, dist: DegreeDistribution) -> float:
    """Probability that a uniformly chosen edge end is infected.

    Raises:
        DiffusionError: every node has degree zero.
    """
    rho = np.asarray(rho, dtype=float)
    d = np.arange(dist.probabilities.size, dtype=float)
    weight = d * dist.probabilities
    total = weight.sum()
    if total <= 0:
        raise DiffusionError("infected-link probability undefined: no edges")
    return float(weight @ rho[: weight.size] / total)


def binomial_weights(max_degree: int, alpha: float) -> np.ndarray:
    """``W[d, a] = C(d, a) alpha^a (1 - alpha)^(d - a)`` for ``a <= d``, zero above."""
    D = max_degree
    a = np.arange(D + 1)
    d = a[:, None]
    C = _binomial_table(D)
    with np.errstate(invalid="ignore"):
        W = C * alpha ** a[None, :] * (1.0 - alpha) ** np.maximum(d - a[None, :], 0)
    W[a[None, :] > d] = 0.0
    return W


@lru_cache(maxsize=32)
def _binomial_table(D: int) -> np.ndarray:
    table = np.array([[comb(i, j) if j <= i else 0 for j in range(D + 1)] for i in range(D + 1)], dtype=float)
    table.flags.writeable = False
    return table


# ------------------------------------------------------------------- states
@dataclass
class DiffusionState:
    """Node states plus cached per-degree infected counts.

    ``infected_neighbors[m]`` is the number of infected neighbours of node m.
    """

    node_states: np.ndarray
    degrees: np.ndarray
    class_sizes: np.ndarray
    infected_counts: np.ndarray
    infected_neighbors: np.ndarray
    time: int = 0

    @classmethod
    def from_nodes(cls, graph: Graph, node_states: Sequence[int]) -> "DiffusionState":
        x = np.asarray(node_states, dtype=np.int8).copy()
        if x.size != graph.n_nodes or np.any((x != 0) & (x != 1)):
            raise DiffusionError("node_states must be a 0/1 vector of length N")
        deg = graph.degrees
        sizes = np.bincount(deg, minlength=graph.max_degree + 1)
        counts = np.bincount(deg, weights=x, minlength=graph.max_degree + 1).astype(np.int64)
        nb = np.array([int(x[a].sum()) for a in graph.neighbors], dtype=np.int64)
        return cls(x, deg, sizes, counts, nb)

    @property
    def rho(self) -> np.ndarray:
        """Infected fraction per degree; 0 for empty classes and for degree 0."""
        out = np.zeros(self.class_sizes.size)
        ok = self.class_sizes > 0
        out[ok] = self.infected_counts[ok] / self.class_sizes[ok]
        out[0] = 0.0
        return out

    def check(self, graph: Graph) -> None:
        """Recompute the caches from scratch and compare (debug aid)."""
        fresh = DiffusionState.from_nodes(graph, self.node_states)
        assert np.array_equal(fresh.infected_counts, self.infected_counts)
        assert np.array_equal(fresh.infected_neighbors, self.infected_neighbors)


def sis_step(
    state: DiffusionState,
    graph: Graph,
    kernel: TransitionKernel,
    target_state: int,
    rng: np.random.Generator,
) -> DiffusionState:
    """Resample one uniformly chosen node in place; returns ``state``."""
    u = int(rng.integers(graph.n_nodes))
    _apply(state, graph, kernel, target_state, u, rng.random())
    state.time += 1
    return state


def _apply(state, graph, kernel, s, u, coin):
    d = state.degrees[u]
    if d == 0:
        return 0
    a = state.infected_neighbors[u]
    if state.node_states[u]:
        if coin < kernel.p10[s, d, a]:
            _flip(state, graph, u, -1)
            return -1
    elif coin < kernel.p01[s, d, a]:
        _flip(state, graph, u, 1)
        return 1
    return 0


def _flip(state, graph, u, delta):
    state.node_states[u] += delta
    state.infected_counts[state.degrees[u]] += delta
    state.infected_neighbors[graph.neighbors[u]] += delta


def expected_increment(state: DiffusionState, kernel: TransitionKernel, target_state: int, n_nodes: int) -> np.ndarray:
    """Exact one-step drift of ``N * rho(d)`` given the current configuration.

    This is the conditional mean of ``N (rho_{k+1}(d) - rho_k(d))`` using the
    true neighbour counts, i.e. the quantity the binomial mean-field drift
    approximates.
    """
    s = target_state
    out = np.zeros(state.class_sizes.size)
    d = state.degrees
    a = state.infected_neighbors
    x = state.node_states.astype(bool)
    up = np.where(~x, kernel.p01[s, d, a], 0.0)
    down = np.where(x, kernel.p10[s, d, a], 0.0)
    net = np.bincount(d, weights=up - down, minlength=out.size)
    ok = state.class_sizes > 0
    out[ok] = net[ok] / state.class_sizes[ok]
    out[0] = 0.0
    return out


# --------------------------------------------------------------- simulation
@dataclass
class SisTrajectory:
    """Per-step record of a simulation run (row k is the state after k steps)."""

    rho: np.ndarray
    alpha: np.ndarray
    target: np.ndarray
    class_sizes: np.ndarray
    final_state: Optional[DiffusionState] = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return self.rho.shape[0] - 1

    def overall_fraction(self) -> np.ndarray:
        """Infected fraction over nodes of positive degree."""
        sizes = self.class_sizes.astype(float).copy()
        sizes[0] = 0.0
        return self.rho @ sizes / sizes.sum()


TargetLike = Union[TargetChain, Sequence[int], np.ndarray]


def target_path(target: TargetLike, steps: int, rng: np.random.Generator) -> np.ndarray:
    """States ``s_0..s_steps`` from a chain or an explicit schedule."""
    if isinstance(target, TargetChain):
        return target.sample_path(steps, rng)
    path = np.asarray(target, dtype=np.int64)
    if path.size < steps + 1:
        raise DiffusionError(f"target schedule has {path.size} entries, need {steps + 1}")
    return path[: steps + 1].copy()


def switching_schedule(steps: int, switches: Sequence[int], states: Sequence[int]) -> np.ndarray:
    """Deterministic target path: ``states[j]`` from ``switches[j-1]`` onwards."""
    if len(states) != len(switches) + 1:
        raise DiffusionError("need one more state than switch times")
    path = np.full(steps + 1, states[0], dtype=np.int64)
    for k, s in zip(switches, states[1:]):
        path[k:] = s
    return path


def initial_state(graph: Graph, fraction: float, rng: np.random.Generator) -> DiffusionState:
    """Infect ``round(fraction * N)`` nodes chosen uniformly without replacement."""
    if not 0.0 <= fraction <= 1.0:
        raise DiffusionError("initial infected fraction must lie in [0, 1]")
    k = int(round(fraction * graph.n_nodes))
    x = np.zeros(graph.n_nodes, dtype=np.int8)
    x[rng.choice(graph.n_nodes, size=k, replace=False)] = 1
    return DiffusionState.from_nodes(graph, x)


def simulate_sis(
    graph: Graph,
    kernel: TransitionKernel,
    target: TargetLike,
    initial_infected_fraction: float,
    steps: int,
    seed: int,
) -> SisTrajectory:
    """Run ``steps`` single-node updates; deterministic in ``seed``.

    The target state used for the update from step k to k+1 is ``s_k``.
    """
    if steps < 0:
        raise DiffusionError("steps must be nonnegative")
    if kernel.max_degree < graph.max_degree:
        raise DiffusionError("kernel degree range is smaller than the graph's degree cap")
    rng = np.random.default_rng(seed)
    state = initial_state(graph, initial_infected_fraction, rng)
    path = target_path(target, steps, rng)
    picks = rng.integers(graph.n_nodes, size=steps)
    coins = rng.random(steps)
    # local bindings for the hot loop
    deg = state.degrees.tolist()
    x = state.node_states.tolist()
    nb = state.infected_neighbors.tolist()
    nbrs = [a.tolist() for a in graph.neighbors]
    p01 = kernel.p01.tolist()
    p10 = kernel.p10.tolist()
    ev_k, ev_d, ev_v = [], [], []
    for k in range(steps):
        u = int(picks[k])
        d = deg[u]
        if d == 0:
            continue
        s = int(path[k])
        if x[u]:
            if coins[k] < p10[s][d][nb[u]]:
                x[u] = 0
                for v in nbrs[u]:
                    nb[v] -= 1
                ev_k.append(k)
                ev_d.append(d)
                ev_v.append(-1)
        elif coins[k] < p01[s][d][nb[u]]:
            x[u] = 1
            for v in nbrs[u]:
                nb[v] += 1
            ev_k.append(k)
            ev_d.append(d)
            ev_v.append(1)
    D = graph.max_degree
    delta = np.zeros((steps + 1, D + 1), dtype=np.int64)
    if ev_k:
        np.add.at(delta, (np.asarray(ev_k) + 1, np.asarray(ev_d)), np.asarray(ev_v))
    counts = state.infected_counts[None, :] + np.cumsum(delta, axis=0)
    sizes = state.class_sizes
    rho = np.zeros(counts.shape)
    ok = sizes > 0
    ok[0] = False
    rho[:, ok] = counts[:, ok] / sizes[ok]
    dist = degree_distribution(graph)
    dd = np.arange(D + 1, dtype=float) * dist.probabilities
    alpha = rho @ dd / dd.sum() if dd.sum() > 0 else np.zeros(steps + 1)
    final = DiffusionState(
        np.asarray(x, dtype=np.int8),
        state.degrees,
        sizes,
        counts[-1].copy(),
        np.asarray(nb, dtype=np.int64),
        time=steps,
    )
    return SisTrajectory(rho=rho, alpha=alpha, target=path, class_sizes=sizes, final_state=final)


# --------------------------------------------------------------- mean field
@dataclass
class MeanFieldState:
    rho_bar: np.ndarray
    time: int = 0
    clamps: int = 0


def mean_field_drift(
    rho_bar: np.ndarray, kernel: TransitionKernel, dist: DegreeDistribution, target_state: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """Scaled rates ``(rho01(d), rho10(d), alpha)`` at ``rho_bar``."""
    D = dist.max_degree
    alpha = infected_link_probability(rho_bar, dist)
    W = binomial_weights(D, alpha)
    s = target_state
    up = (1.0 - rho_bar) * np.einsum("da,da->d", W, kernel.p01[s, : D + 1, : D + 1])
    down = rho_bar * np.einsum("da,da->d", W, kernel.p10[s, : D + 1, : D + 1])
    up[0] = down[0] = 0.0
    return up, down, alpha


def mean_field_step(
    mf: MeanFieldState,
    kernel: TransitionKernel,
    dist: DegreeDistribution,
    target_state: int,
    n_nodes: int,
) -> MeanFieldState:
    """One step of the mean-field recursion with step size ``1 / n_nodes``.

    Coordinates leaving ``[0, 1]`` are clamped and counted in ``clamps``.
    """
    up, down, _ = mean_field_drift(mf.rho_bar, kernel, dist, target_state)
    nxt = mf.rho_bar + (up - down) / n_nodes
    clipped = np.clip(nxt, 0.0, 1.0)
    n_clamped = int(np.count_nonzero(clipped != nxt))
    return MeanFieldState(clipped, mf.time + 1, mf.clamps + n_clamped)


@dataclass
class MeanFieldTrajectory:
    rho_bar: np.ndarray
    alpha: np.ndarray
    clamps: int


def run_mean_field(
    kernel: TransitionKernel,
    dist: DegreeDistribution,
    target_path_: Sequence[int],
    rho0: np.ndarray,
    steps: int,
    n_nodes: Optional[int] = None,
) -> MeanFieldTrajectory:
    """Iterate the mean-field recursion for ``steps`` steps from ``rho0``."""
    N = dist.n_nodes if n_nodes is None else n_nodes
    mf = MeanFieldState(np.asarray(rho0, dtype=float).copy())
    mf.rho_bar[0] = 0.0
    rows = np.empty((steps + 1, mf.rho_bar.size))
    alpha = np.empty(steps + 1)
    rows[0] = mf.rho_bar
    alpha[0] = infected_link_probability(mf.rho_bar, dist)
    for k in range(steps):
        mf = mean_field_step(mf, kernel, dist, int(target_path_[k]), N)
        rows[k + 1] = mf.rho_bar
        alpha[k + 1] = infected_link_probability(mf.rho_bar, dist)
    return MeanFieldTrajectory(rows, alpha, mf.clamps)


def deviation(sim_rho: np.ndarray, mf_rho: np.ndarray, class_sizes: Optional[np.ndarray] = None) -> float:
    """``max_k max_d |rho_k(d) - rho_bar_k(d)|``.

    Args:
        sim_rho: simulated trajectory, shape ``(K, D+1)``.
        mf_rho: mean-field trajectory of the same shape.
        class_sizes: when given, only degrees ``d >= 1`` with ``N(d) > 0`` count.

    Raises:
        DiffusionError: shape mismatch.
    """
    a = np.asarray(sim_rho, dtype=float)
    b = np.asarray(mf_rho, dtype=float)
    if a.shape != b.shape:
        raise DiffusionError(f"trajectory shapes differ: {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    if class_sizes is not None:
        keep = np.asarray(class_sizes) > 0
        keep[0] = False
        diff = diff[:, keep]
    return float(diff.max(initial=0.0))


# ------------------------------------------------- switching-threshold scenario
@dataclass
class ScenarioResult:
    sim: SisTrajectory
    mf: MeanFieldTrajectory
    graph: Graph


def run_adoption_scenario(
    graph: Graph,
    seed: int,
    steps: int = 700,
    switches: Sequence[int] = (200, 500),
    thresholds: Sequence[float] = (1.0, 10.0),
    schedule_states: Sequence[int] = (0, 1, 0),
    p_forget: float = 0.3,
    initial_fraction: float = 0.05,
) -> ScenarioResult:
    """Adoption kernel with a threshold that switches on a fixed schedule.

    The mean-field run starts from the simulation's initial ``rho``.
    """
    kernel = adoption_kernel(graph.max_degree, thresholds, p_forget)
    path = switching_schedule(steps, switches, schedule_states)
    sim = simulate_sis(graph, kernel, path, initial_fraction, steps, seed)
    dist = degree_distribution(graph)
    mf = run_mean_field(kernel, dist, path, sim.rho[0], steps, graph.n_nodes)
    return ScenarioResult(sim, mf, graph)
