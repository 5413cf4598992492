"""Bayesian social learning: private updates, myopic actions, the public
belief filter, herding detection and the structural checks behind ordinal
(monotone) decisions.

The state of nature ``x`` takes values ``0..X-1`` and does not change.  An
observation model ``B`` has ``B[i, y] = P(y | x = i)``; a cost matrix ``c``
has ``c[i, a]`` = cost of action ``a`` in state ``i``.  Beliefs are 1-D pmfs.
Ties between actions go to the smallest action index, both for agents and
inside the public filter, so both always use the same policy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


class LearningError(ValueError):
    """Invalid belief, model, or an update that is impossible under the model."""


NO_ACTION = -1  # policy entry for observations with zero predictive probability

# observation model and costs fitted to the two-state lab experiment
FITTED_B = ((0.61, 0.39), (0.41, 0.59))
FITTED_COSTS = ((0.0, 2.0), (2.0, 0.0))


def as_belief(p, tol: float = 1e-10) -> np.ndarray:
    """Validate a pmf and return it as a float array.

    Raises:
        LearningError: negative entries or a sum off 1 by more than ``tol``.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(~np.isfinite(p)) or np.any(p < 0):
        raise LearningError(f"belief must be a nonnegative vector, got {p}")
    if abs(p.sum() - 1.0) > tol:
        raise LearningError(f"belief sums to {p.sum()}, not 1")
    return p


def normalize_log(logp: np.ndarray) -> np.ndarray:
    """Belief from unnormalised log-probabilities (``-inf`` allowed)."""
    logp = np.asarray(logp, dtype=float)
    top = logp.max()
    if not np.isfinite(top):
        raise LearningError("all log-probabilities are -inf")
    w = np.exp(logp - top)
    return w / w.sum()


def _log(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def check_observation_model(B) -> np.ndarray:
    """Validate a row-stochastic likelihood matrix."""
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or np.any(~np.isfinite(B)) or np.any(B < 0):
        raise LearningError("observation model must be a nonnegative matrix")
    if np.any(np.abs(B.sum(axis=1) - 1.0) > 1e-12):
        raise LearningError("observation model rows must sum to 1")
    return B


def check_costs(costs) -> np.ndarray:
    c = np.asarray(costs, dtype=float)
    if c.ndim != 2 or np.any(~np.isfinite(c)):
        raise LearningError("cost matrix must be a finite 2-D array")
    return c


# ------------------------------------------------------------- agent steps
def private_belief(public, B, y: int) -> np.ndarray:
    """Posterior after a private observation: ``eta(i) ∝ B[i, y] pi(i)``.

    Raises:
        LearningError: ``y`` out of range or impossible under ``public``.
    """
    pi = as_belief(public)
    B = np.asarray(B, dtype=float)
    if not 0 <= y < B.shape[1]:
        raise LearningError(f"observation {y} out of range 0..{B.shape[1] - 1}")
    logp = _log(pi) + _log(B[:, y])
    if not np.isfinite(logp.max()):
        raise LearningError(f"observation {y} has zero probability under the prior")
    return normalize_log(logp)


def myopic_action(belief, costs) -> int:
    """``argmin_a sum_i c[i, a] eta(i)``; the smallest index wins ties."""
    eta = np.asarray(belief, dtype=float)
    c = np.asarray(costs, dtype=float)
    return int(np.argmin(eta @ c))


def action_policy(public, B, costs) -> np.ndarray:
    """Action taken for each observation ``y`` at public belief ``public``.

    Observations with zero predictive probability get :data:`NO_ACTION`.
    """
    pi = as_belief(public)
    B = np.asarray(B, dtype=float)
    out = np.full(B.shape[1], NO_ACTION, dtype=np.int64)
    for y in range(B.shape[1]):
        if pi @ B[:, y] > 0:
            out[y] = myopic_action(private_belief(pi, B, y), costs)
    return out


def is_herding(public, B, costs) -> bool:
    """True when the policy ignores the observation (an information cascade)."""
    acts = action_policy(public, B, costs)
    return np.unique(acts[acts != NO_ACTION]).size <= 1


def action_likelihood(public, action: int, B, costs) -> np.ndarray:
    """``P(a | x = i, pi) = sum_y 1{policy(y) = a} B[i, y]`` for each state."""
    acts = action_policy(public, B, costs)
    return np.asarray(B, dtype=float)[:, acts == action].sum(axis=1)


def social_learning_filter(public, action: int, B, costs) -> np.ndarray:
    """Public belief after observing ``action``.

    ``pi'(i) ∝ P(a | x = i, pi) pi(i)``, computed in the log domain.  When the
    policy does not depend on ``y`` the input belief is returned unchanged.

    Raises:
        LearningError: the action has probability zero under the policy.
    """
    pi = as_belief(public)
    acts = action_policy(pi, B, costs)
    live = acts[acts != NO_ACTION]
    if live.size and np.all(live == action):
        return pi.copy()
    lik = np.asarray(B, dtype=float)[:, acts == action].sum(axis=1)
    sigma = float(lik @ pi)
    if sigma <= 0:
        raise LearningError(f"action {action} is inconsistent with the policy at belief {pi}")
    return normalize_log(_log(pi) + _log(lik))


# ----------------------------------------------------------------- protocol
@dataclass
class ProtocolRun:
    """Outcome of one run of the sequential protocol.

    Attributes:
        observations: ``y_k`` for agents ``k = 0..horizon-1``.
        actions: ``a_k``.
        public_beliefs: ``pi_k`` before agent k acts; row ``horizon`` is the
            belief after the last agent.
        cascade_time: first agent index whose action ignores its
            observation, or None.
    """

    observations: np.ndarray
    actions: np.ndarray
    public_beliefs: np.ndarray
    cascade_time: Optional[int]


def run_protocol(
    true_state: int,
    B,
    costs,
    horizon: int,
    seed: int,
    prior=None,
) -> ProtocolRun:
    """Simulate agents acting in sequence on the public belief.

    Agent k draws ``y_k ~ B[x, :]``, forms its private belief from ``pi_k``,
    takes the myopic action, and everyone updates ``pi_{k+1}`` with the
    social learning filter.

    Args:
        true_state: the state of nature x.
        B: observation model.
        costs: cost matrix.
        horizon: number of agents (at least 1).
        seed: RNG seed.
        prior: initial public belief; uniform when omitted.
    """
    B = check_observation_model(B)
    c = check_costs(costs)
    X, Y = B.shape
    if c.shape[0] != X:
        raise LearningError("cost matrix and observation model disagree on the number of states")
    if horizon < 1:
        raise LearningError("horizon must be at least 1")
    if not 0 <= true_state < X:
        raise LearningError(f"true state {true_state} out of range")
    pi = as_belief(np.full(X, 1.0 / X) if prior is None else prior)
    rng = np.random.default_rng(seed)
    ys = rng.choice(Y, size=horizon, p=B[true_state])
    beliefs = np.empty((horizon + 1, X))
    actions = np.empty(horizon, dtype=np.int64)
    beliefs[0] = pi
    for k in range(horizon):
        policy = action_policy(pi, B, c)
        live = policy[policy != NO_ACTION]
        if np.unique(live).size <= 1:
            # herding: the filter is at a fixed point, so the rest is determined
            actions[k:] = live[0]
            beliefs[k + 1 :] = pi
            return ProtocolRun(ys, actions, beliefs, k)
        if policy[ys[k]] == NO_ACTION:
            raise LearningError(f"agent {k}: observation {ys[k]} impossible under the public belief")
        actions[k] = policy[ys[k]]
        pi = social_learning_filter(pi, int(actions[k]), B, c)
        beliefs[k + 1] = pi
    return ProtocolRun(ys, actions, beliefs, None)


# -------------------------------------------------------- structural checks
def is_tp2(B, tol: float = 1e-12) -> bool:
    """All adjacent 2x2 minors nonnegative: ``B[i+1,y] B[i,y+1] <= B[i,y] B[i+1,y+1]``."""
    B = np.asarray(B, dtype=float)
    if B.shape[0] < 2 or B.shape[1] < 2:
        return True
    lhs = B[1:, :-1] * B[:-1, 1:]
    rhs = B[:-1, :-1] * B[1:, 1:]
    return bool(np.all(lhs <= rhs + tol))


def is_submodular(costs, tol: float = 1e-12) -> bool:
    """Literal increment test ``c(x, a+1) - c(x, a) <= c(x+1, a+1) - c(x+1, a)``.

    Under this inequality the cost of moving to a higher action grows with
    the state, so minimisers move *down* as the state rises.  The cost
    matrix ``[[0, 2], [2, 0]]`` fails it (2 <= -2 is false) even though it
    favours matching the action to the state; use
    :func:`has_decreasing_differences` for the condition that yields
    actions increasing in the state.
    """
    c = np.asarray(costs, dtype=float)
    if c.shape[0] < 2 or c.shape[1] < 2:
        return True
    inc = np.diff(c, axis=1)
    return bool(np.all(inc[:-1] <= inc[1:] + tol))


def has_decreasing_differences(costs, tol: float = 1e-12) -> bool:
    """``c(x, a+1) - c(x, a)`` nonincreasing in x (minimiser increasing in x)."""
    c = np.asarray(costs, dtype=float)
    if c.shape[0] < 2 or c.shape[1] < 2:
        return True
    inc = np.diff(c, axis=1)
    return bool(np.all(inc[1:] <= inc[:-1] + tol))


def mlr_dominates(p, q) -> bool:
    """Monotone likelihood ratio order: p puts relatively more mass on high states.

    True iff ``p_i q_j <= q_i p_j`` for all ``i < j``.  For positive vectors
    this is ``log p_i - log p_{i+1} <= log q_i - log q_{i+1}`` for every i;
    the product form also handles zero coordinates.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise LearningError("beliefs must have the same length")
    lhs = p[:, None] * q[None, :]
    rhs = q[:, None] * p[None, :]
    upper = np.triu(np.ones(lhs.shape, dtype=bool), 1)
    return bool(np.all(lhs[upper] <= rhs[upper] + 1e-15))
