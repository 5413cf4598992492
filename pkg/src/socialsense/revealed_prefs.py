"""Revealed preferences: GARP, Afriat certificates, and Nash rationality.

A consumer dataset holds prices ``p_t`` (strictly positive) and responses
``x_t`` for ``t = 0..T-1``.  Afriat's theorem says the following are
equivalent:

* the data satisfy GARP;
* there are ``u_t`` and ``lambda_t > 0`` with
  ``u_tau - u_t - lambda_t p_t.(x_tau - x_t) <= 0`` for all ``t, tau``;
* a concave, monotone, piecewise-linear utility rationalises the data.

The multi-agent version replaces the utility by a potential
``V(x^1..x^n)`` with one multiplier per agent and observation.  The
inequalities are homogeneous in the unknowns, so the strict condition
``lambda > 0`` is imposed as ``lambda >= lambda_floor`` with a default floor
of 1; any positive floor gives the same verdict after rescaling.
"""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .lp import LE, LinearProgram, solve

LAMBDA_FLOOR = 1.0
GARP_RTOL = 1e-9


class RevealedPreferenceError(ValueError):
    """Invalid dataset or request (nonpositive prices, bad budgets, ...)."""


# ------------------------------------------------------------------ datasets
@dataclass
class ConsumerDataset:
    """Single-agent data ``{(p_t, x_t)}``.

    Attributes:
        prices: ``(T, m)`` strictly positive.
        responses: ``(T, m)`` nonnegative.
        budgets: ``(T,)``; defaults to the expenditure ``p_t . x_t``.
    """

    prices: np.ndarray
    responses: np.ndarray
    budgets: Optional[np.ndarray] = None

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.prices, dtype=float))
        x = np.atleast_2d(np.asarray(self.responses, dtype=float))
        _check_prices(p)
        if x.shape != p.shape:
            raise RevealedPreferenceError(f"responses shape {x.shape} differs from prices {p.shape}")
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise RevealedPreferenceError("responses must be finite and nonnegative")
        self.prices, self.responses = p, x
        self.budgets = np.einsum("tj,tj->t", p, x) if self.budgets is None else np.asarray(self.budgets, dtype=float)
        if self.budgets.shape != (p.shape[0],):
            raise RevealedPreferenceError("need one budget per observation")

    @property
    def n_obs(self) -> int:
        return self.prices.shape[0]

    @property
    def n_goods(self) -> int:
        return self.prices.shape[1]


@dataclass
class MultiAgentDataset:
    """Joint responses ``{(p_t, x_t^1..x_t^n)}`` to a common price.

    Attributes:
        prices: ``(T, m)`` strictly positive.
        responses: ``(n, T, m)`` nonnegative.
        budgets: ``(n, T)``; defaults to ``p_t . x_t^i``.
    """

    prices: np.ndarray
    responses: np.ndarray
    budgets: Optional[np.ndarray] = None

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.prices, dtype=float))
        x = np.asarray(self.responses, dtype=float)
        _check_prices(p)
        if x.ndim != 3 or x.shape[1:] != p.shape:
            raise RevealedPreferenceError(f"responses must have shape (n, {p.shape[0]}, {p.shape[1]}), got {x.shape}")
        if np.any(~np.isfinite(x)) or np.any(x < 0):
            raise RevealedPreferenceError("responses must be finite and nonnegative")
        self.prices, self.responses = p, x
        if self.budgets is None:
            self.budgets = np.einsum("tj,itj->it", p, x)
        else:
            self.budgets = np.asarray(self.budgets, dtype=float)
        if self.budgets.shape != x.shape[:2]:
            raise RevealedPreferenceError("need one budget per agent and observation")

    @property
    def n_agents(self) -> int:
        return self.responses.shape[0]

    @property
    def n_obs(self) -> int:
        return self.prices.shape[0]

    @property
    def n_goods(self) -> int:
        return self.prices.shape[1]

    def agent(self, i: int) -> ConsumerDataset:
        """The single-agent slice ``{(p_t, x_t^i)}``."""
        return ConsumerDataset(self.prices, self.responses[i], self.budgets[i])

    @classmethod
    def from_single(cls, data: ConsumerDataset) -> "MultiAgentDataset":
        return cls(data.prices, data.responses[None], data.budgets[None])


def _check_prices(p: np.ndarray) -> None:
    if p.ndim != 2 or p.size == 0:
        raise RevealedPreferenceError("prices must be a nonempty (T, m) array")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        t = int(np.argwhere(~(p > 0))[0][0]) if np.any(~(p > 0)) else 0
        raise RevealedPreferenceError(f"prices must be strictly positive (observation {t})")


# --------------------------------------------------------------------- GARP
@dataclass
class GarpResult:
    """GARP verdict.

    Attributes:
        passed: no strict revealed-preference cycle.
        cycle: observation indices ``[t0, t1, ..., tk]`` of a shortest
            violating cycle (``t0`` directly revealed preferred to ``t1`` ...,
            ``tk`` strictly directly revealed preferred to ``t0``), or None.
        relation: transitive revealed-preference relation ``R``.
    """

    passed: bool
    cycle: Optional[list]
    relation: np.ndarray


def _direct_relations(data: ConsumerDataset, rtol: float) -> tuple[np.ndarray, np.ndarray]:
    E = data.prices @ data.responses.T  # E[t, tau] = p_t . x_tau
    e = np.diag(E).copy()
    tol = rtol * (1.0 + np.abs(e))
    weak = e[:, None] >= E - tol[:, None]
    strict = e[:, None] > E + tol[:, None]
    return weak, strict


def warshall(R0: np.ndarray) -> np.ndarray:
    """Transitive closure of a boolean relation (``O(T^3)``)."""
    R = R0.astype(bool).copy()
    for k in range(R.shape[0]):
        R |= np.outer(R[:, k], R[k, :])
    return R


def garp_check(data: ConsumerDataset, rtol: float = GARP_RTOL) -> GarpResult:
    """Test the generalised axiom of revealed preference.

    ``t R0 tau`` when ``p_t.x_t >= p_t.x_tau`` (within ``rtol (1 + |p_t.x_t|)``);
    GARP fails when ``t R tau`` (closure) while ``p_tau.x_tau > p_tau.x_t``
    beyond tolerance.

    Raises:
        RevealedPreferenceError: invalid dataset.
    """
    if not isinstance(data, ConsumerDataset):
        raise RevealedPreferenceError("garp_check expects a ConsumerDataset")
    weak, strict = _direct_relations(data, rtol)
    R = warshall(weak)
    bad = R & strict.T  # bad[t, tau]: t R tau and tau P0 t
    if not bad.any():
        return GarpResult(True, None, R)
    return GarpResult(False, _shortest_cycle(weak, strict), R)


def _shortest_cycle(weak: np.ndarray, strict: np.ndarray) -> list:
    T = weak.shape[0]
    best = None
    for t in range(T):
        # breadth-first search along weak edges from t
        parent = {t: None}
        queue = deque([t])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(weak[u]):
                v = int(v)
                if v not in parent:
                    parent[v] = u
                    queue.append(v)
        for tau in parent:
            if strict[tau, t]:
                path = [tau]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                if best is None or len(path) < len(best):
                    best = path
    return best


# ---------------------------------------------------------- Afriat / Nash LP
@dataclass
class AfriatCertificate:
    """Outcome of the Afriat feasibility test.

    Attributes:
        feasible: the inequalities have a solution.
        utilities: ``u_t`` (feasible only).
        multipliers: ``lambda_t`` (feasible only).
        witness: a GARP-violating cycle when infeasible.
        farkas: the LP infeasibility certificate when infeasible.
    """

    feasible: bool
    utilities: Optional[np.ndarray] = None
    multipliers: Optional[np.ndarray] = None
    witness: Optional[list] = None
    farkas: Optional[np.ndarray] = None


@dataclass
class PotentialCertificate:
    """Outcome of the Nash rationality test.

    Attributes:
        feasible: the inequalities have a solution.
        potentials: ``v_t``.
        multipliers: ``lambda_t^i`` with shape ``(n, T)``.
        witness: ``{"agent": i, "cycle": [...]}`` when an agent's own data
            fail GARP, or ``{"farkas": y}`` when only the joint LP fails.
    """

    feasible: bool
    potentials: Optional[np.ndarray] = None
    multipliers: Optional[np.ndarray] = None
    witness: Optional[dict] = None


def _nash_lp(data: MultiAgentDataset, floor: float) -> LinearProgram:
    n, T = data.n_agents, data.n_obs
    p, x = data.prices, data.responses
    # D[i, t, tau] = p_t . (x_tau^i - x_t^i)
    E = np.einsum("tj,isj->its", p, x)
    D = E - np.diagonal(E, axis1=1, axis2=2)[:, :, None]
    rows = []
    for t in range(T):
        for tau in range(T):
            if t == tau:
                continue
            a = np.zeros(T + n * T)
            a[tau] += 1.0
            a[t] -= 1.0
            a[T + np.arange(n) * T + t] = -D[:, t, tau]
            rows.append(a)
    A = np.array(rows).reshape(-1, T + n * T)
    lower = np.r_[np.full(T, -np.inf), np.full(n * T, float(floor))]
    return LinearProgram(c=np.zeros(T + n * T), A=A, b=np.zeros(A.shape[0]), relations=[LE] * A.shape[0], lower=lower)


def nash_rationality_test(data: MultiAgentDataset, lambda_floor: float = LAMBDA_FLOOR, precheck: bool = True) -> PotentialCertificate:
    """Search for ``v_t`` and ``lambda_t^i >= lambda_floor`` satisfying
    ``v_tau - v_t - sum_i lambda_t^i p_t.(x_tau^i - x_t^i) <= 0``.

    Args:
        data: joint responses.
        lambda_floor: lower bound standing in for strict positivity.
        precheck: run GARP on every agent's own data first and reject on
            any failure.  This is a condition of its own: the joint
            inequalities can stay feasible when one agent's slice fails GARP.

    Raises:
        LPNumericalError: the LP solver broke down (not an infeasibility).
    """
    if not isinstance(data, MultiAgentDataset):
        raise RevealedPreferenceError("nash_rationality_test expects a MultiAgentDataset")
    if not lambda_floor > 0:
        raise RevealedPreferenceError("lambda_floor must be positive")
    if precheck:
        for i in range(data.n_agents):
            g = garp_check(data.agent(i))
            if not g.passed:
                return PotentialCertificate(False, witness={"agent": i, "cycle": g.cycle})
    T, n = data.n_obs, data.n_agents
    if T == 1:
        return PotentialCertificate(True, np.zeros(1), np.full((n, 1), float(lambda_floor)))
    res = solve(_nash_lp(data, lambda_floor))
    if res.status == "infeasible":
        return PotentialCertificate(False, witness={"farkas": res.certificate})
    if res.status != "optimal":
        raise RevealedPreferenceError(f"unexpected LP status {res.status!r} for a feasibility problem")
    v = res.x[:T] - res.x[0]
    lam = res.x[T:].reshape(n, T)
    return PotentialCertificate(True, v, lam)


def afriat_feasible(data: ConsumerDataset, lambda_floor: float = LAMBDA_FLOOR) -> AfriatCertificate:
    """Solve the Afriat inequalities with the internal LP.

    The LP alone decides the verdict; GARP is only consulted to attach a
    violating cycle to an infeasible answer.

    Raises:
        LPNumericalError: the LP solver broke down (not an infeasibility).
    """
    if not isinstance(data, ConsumerDataset):
        raise RevealedPreferenceError("afriat_feasible expects a ConsumerDataset")
    cert = nash_rationality_test(MultiAgentDataset.from_single(data), lambda_floor, precheck=False)
    if cert.feasible:
        return AfriatCertificate(True, cert.potentials, cert.multipliers[0])
    return AfriatCertificate(False, witness=garp_check(data).cycle, farkas=cert.witness.get("farkas"))


def certificate_violation(cert, data) -> float:
    """Largest violation of the (multi-agent) Afriat inequalities by a certificate."""
    if isinstance(data, ConsumerDataset):
        data = MultiAgentDataset.from_single(data)
        v, lam = cert.utilities, cert.multipliers[None]
    else:
        v, lam = cert.potentials, cert.multipliers
    E = np.einsum("tj,isj->its", data.prices, data.responses)
    D = E - np.diagonal(E, axis1=1, axis2=2)[:, :, None]
    lhs = v[None, :] - v[:, None] - np.einsum("it,its->ts", lam, D)
    return float(max(lhs.max(), 0.0))


# ------------------------------------------------------- utility / potential
@dataclass
class PiecewiseLinear:
    """Concave function ``min_t { level_t + grad_t . (z - z_t) }``.

    Attributes:
        levels: ``(T,)``.
        gradients: ``(T, d)``.
        anchors: ``(T, d)`` points ``z_t``.
    """

    levels: np.ndarray
    gradients: np.ndarray
    anchors: np.ndarray

    def planes(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float).reshape(-1, self.anchors.shape[1])
        offsets = self.levels - np.einsum("td,td->t", self.gradients, self.anchors)
        return z @ self.gradients.T + offsets

    def __call__(self, z) -> Union[float, np.ndarray]:
        z = np.asarray(z, dtype=float)
        vals = self.planes(z).min(axis=1)
        return float(vals[0]) if z.size == self.anchors.shape[1] else vals

    def active(self, z, tol: float = 1e-9) -> np.ndarray:
        """Indices of the planes attaining the minimum at one point."""
        vals = self.planes(z)[0]
        return np.flatnonzero(vals <= vals.min() + tol * (1 + abs(vals.min())))


def build_utility(cert: AfriatCertificate, data: ConsumerDataset) -> PiecewiseLinear:
    """``u(x) = min_t { u_t + lambda_t p_t . (x - x_t) }``.

    Raises:
        RevealedPreferenceError: the certificate is infeasible.
    """
    if not cert.feasible:
        raise RevealedPreferenceError("cannot build a utility from an infeasible certificate")
    grads = cert.multipliers[:, None] * data.prices
    return PiecewiseLinear(np.asarray(cert.utilities, float), grads, data.responses.copy())


@dataclass
class Potential(PiecewiseLinear):
    """Potential over stacked responses ``z = (x^1, ..., x^n)``."""

    n_agents: int = 1


def build_potential(cert: PotentialCertificate, data: MultiAgentDataset) -> Potential:
    """``V(x^1..x^n) = min_t { v_t + sum_i lambda_t^i p_t . (x^i - x_t^i) }``.

    Evaluate with a stacked vector of length ``n m`` or an ``(n, m)`` array.
    """
    if not cert.feasible:
        raise RevealedPreferenceError("cannot build a potential from an infeasible certificate")
    n, T, m = data.responses.shape
    grads = (cert.multipliers[:, :, None] * data.prices[None]).transpose(1, 0, 2).reshape(T, n * m)
    anchors = data.responses.transpose(1, 0, 2).reshape(T, n * m)
    return Potential(np.asarray(cert.potentials, float), grads, anchors, n_agents=n)


# --------------------------------------------------------------- prediction
@dataclass
class Prediction:
    """Responses maximising the reconstructed potential on new budgets.

    Attributes:
        responses: ``(n, m)``.
        value: attained potential ``z``.
    """

    responses: np.ndarray
    value: float


def predict_response(cert: PotentialCertificate, data: MultiAgentDataset, price, budgets) -> Prediction:
    """Solve ``max z`` s.t. ``z <= V-plane_t(x)`` for all t and ``p.x^i <= I^i``, ``x >= 0``.

    Args:
        cert: feasible Nash-rationality certificate.
        data: the data the certificate was built from.
        price: new price vector (strictly positive).
        budgets: one budget per agent (nonnegative).

    Raises:
        RevealedPreferenceError: infeasible certificate, bad price or budgets.
    """
    V = build_potential(cert, data)
    n, m = data.n_agents, data.n_goods
    p = np.asarray(price, dtype=float).reshape(-1)
    I = np.atleast_1d(np.asarray(budgets, dtype=float))
    if p.shape != (m,) or np.any(~(p > 0)):
        raise RevealedPreferenceError(f"price must be a strictly positive vector of length {m}")
    if I.shape != (n,) or np.any(~np.isfinite(I)) or np.any(I < 0):
        raise RevealedPreferenceError(f"need {n} nonnegative budgets")
    T = data.n_obs
    nv = n * m + 1
    offsets = V.levels - np.einsum("td,td->t", V.gradients, V.anchors)
    # z - grad_t . x <= offset_t
    A_planes = np.hstack([-V.gradients, np.ones((T, 1))])
    A_budget = np.zeros((n, nv))
    for i in range(n):
        A_budget[i, i * m : (i + 1) * m] = p
    c = np.zeros(nv)
    c[-1] = 1.0
    lp = LinearProgram(
        c=c,
        A=np.vstack([A_planes, A_budget]),
        b=np.r_[offsets, I],
        relations=[LE] * (T + n),
        lower=np.r_[np.zeros(n * m), -np.inf],
        maximize=True,
    )
    res = solve(lp)
    if res.status != "optimal":
        raise RevealedPreferenceError(f"prediction LP returned {res.status!r}")
    return Prediction(res.x[:-1].reshape(n, m), float(res.x[-1]))


@dataclass
class MrsResult:
    """Marginal rate of substitution at a point.

    Attributes:
        value: ratio of marginal values of the two goods.
        smooth: exactly one plane is active (otherwise gradients were averaged).
        active: indices of the active planes.
    """

    value: float
    smooth: bool
    active: np.ndarray


def marginal_rate_substitution(potential: PiecewiseLinear, z, agent: int = 0, goods: tuple = (0, 1), tol: float = 1e-9) -> MrsResult:
    """``dV/dx_j^i / dV/dx_k^i`` from the active plane(s) at ``z``.

    For a single active plane this is ``p_t(j) / p_t(k)``.
    """
    n = getattr(potential, "n_agents", 1)
    m = potential.anchors.shape[1] // n
    j, k = goods
    if not (0 <= agent < n and 0 <= j < m and 0 <= k < m) or j == k:
        raise RevealedPreferenceError("invalid agent or goods for MRS")
    z = np.asarray(z, dtype=float).reshape(-1)
    act = potential.active(z, tol)
    g = potential.gradients[act].mean(axis=0)
    return MrsResult(float(g[agent * m + j] / g[agent * m + k]), act.size == 1, act)


# --------------------------------------------------------------- generators
def cobb_douglas_dataset(T: int, m: int, rng: np.random.Generator, alpha=None) -> ConsumerDataset:
    """Demands of a Cobb-Douglas maximiser, ``x_t(j) = alpha_j I_t / p_t(j)``."""
    a = rng.dirichlet(np.ones(m)) if alpha is None else np.asarray(alpha, dtype=float)
    p = rng.uniform(0.5, 2.0, size=(T, m))
    I = rng.uniform(1.0, 3.0, size=T)
    x = a[None, :] * I[:, None] / p
    return ConsumerDataset(p, x, I)


def random_dataset(T: int, m: int, rng: np.random.Generator) -> ConsumerDataset:
    """Prices and responses drawn independently (often violate GARP)."""
    return ConsumerDataset(rng.uniform(0.5, 2.0, size=(T, m)), rng.uniform(0.0, 3.0, size=(T, m)))


@dataclass
class LogPotentialGame:
    """Concave potential ``V = sum_ij a_ij log x_j^i + beta sum_j log(sum_i x_j^i)``.

    Agent i's payoff is V itself, so any maximiser of V under the agents'
    budgets is a Nash equilibrium.
    """

    weights: np.ndarray
    beta: float

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float((self.weights * np.log(x)).sum() + self.beta * np.log(x.sum(axis=0)).sum())

    def equilibrium(self, price, budgets, tol: float = 1e-13, max_rounds: int = 10_000) -> np.ndarray:
        """Maximise V under ``p.x^i = I^i`` by exact block best responses."""
        p = np.asarray(price, dtype=float)
        I = np.asarray(budgets, dtype=float)
        a = self.weights
        n, m = a.shape
        x = a / a.sum(axis=1, keepdims=True) * I[:, None] / p[None, :]
        for _ in range(max_rounds):
            old = x.copy()
            for i in range(n):
                x[i] = self._best_response(a[i], x.sum(axis=0) - x[i], p, I[i])
            if np.abs(x - old).max() <= tol * (1 + np.abs(x).max()):
                break
        return x

    def _best_response(self, a, other, p, budget):
        b = self.beta

        def demand(mu):
            # root of mu p x (x + o) = a (x + o) + b x, positive branch
            q = mu * p
            B1 = q * other - a - b
            return (-B1 + np.sqrt(B1 * B1 + 4 * q * a * other)) / (2 * q)

        lo, hi = 1e-12, 1.0
        while demand(hi) @ p > budget:
            hi *= 2
        while demand(lo) @ p < budget:
            lo /= 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if demand(mid) @ p > budget:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        return demand(0.5 * (lo + hi))


def potential_game_dataset(
    game: LogPotentialGame, T: int, rng: np.random.Generator
) -> MultiAgentDataset:
    """Equilibrium responses of ``game`` at random prices and budgets."""
    n, m = game.weights.shape
    p = rng.uniform(0.5, 2.0, size=(T, m))
    I = rng.uniform(1.0, 3.0, size=(n, T))
    x = np.stack([game.equilibrium(p[t], I[:, t]) for t in range(T)], axis=1)
    return MultiAgentDataset(p, x, I)


# ---------------------------------------------------------------------- CSV
def read_dataset(path: Union[str, Path]) -> MultiAgentDataset:
    """Read ``t,p_1..p_m,agent,x_1..x_m`` rows (header required).

    Every agent must appear once per observation and prices must agree
    across agents at the same t.

    Raises:
        RevealedPreferenceError: malformed file, with line numbers.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise RevealedPreferenceError(f"{path}: empty file")
        header = [h.strip() for h in header]
        m = (len(header) - 2) // 2
        expected = ["t"] + [f"p_{j + 1}" for j in range(m)] + ["agent"] + [f"x_{j + 1}" for j in range(m)]
        if m < 1 or header != expected:
            raise RevealedPreferenceError(f"{path}: line 1: expected header {','.join(expected) if m >= 1 else 't,p_1,agent,x_1'}")
        records = {}
        prices = {}
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise RevealedPreferenceError(f"{path}: line {line}: expected {len(header)} columns, got {len(row)}")
            try:
                t, agent = int(row[0]), int(row[m + 1])
                p = np.array([float(v) for v in row[1 : m + 1]])
                x = np.array([float(v) for v in row[m + 2 :]])
            except ValueError:
                col = next(k for k, v in enumerate(row, 1) if not _is_number(v))
                raise RevealedPreferenceError(f"{path}: line {line} column {col}: not a number: {row[col - 1]!r}") from None
            if (t, agent) in records:
                raise RevealedPreferenceError(f"{path}: line {line}: duplicate row for t={t}, agent={agent}")
            if t in prices and not np.array_equal(prices[t], p):
                raise RevealedPreferenceError(f"{path}: line {line}: prices for t={t} differ between agents")
            prices[t] = p
            records[(t, agent)] = x
    if not records:
        raise RevealedPreferenceError(f"{path}: no data rows")
    ts = sorted(prices)
    agents = sorted({a for _, a in records})
    if ts != list(range(len(ts))) or agents != list(range(len(agents))):
        raise RevealedPreferenceError(f"{path}: t and agent must be consecutive integers from 0")
    missing = [(t, a) for t in ts for a in agents if (t, a) not in records]
    if missing:
        raise RevealedPreferenceError(f"{path}: no row for t={missing[0][0]}, agent={missing[0][1]}")
    x = np.array([[records[(t, a)] for t in ts] for a in agents])
    return MultiAgentDataset(np.array([prices[t] for t in ts]), x)


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def write_dataset(data: Union[ConsumerDataset, MultiAgentDataset], path: Union[str, Path]) -> None:
    if isinstance(data, ConsumerDataset):
        data = MultiAgentDataset.from_single(data)
    m = data.n_goods
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"p_{j + 1}" for j in range(m)] + ["agent"] + [f"x_{j + 1}" for j in range(m)])
        for t in range(data.n_obs):
            for i in range(data.n_agents):
                w.writerow([t] + [repr(float(v)) for v in data.prices[t]] + [i] + [repr(float(v)) for v in data.responses[i, t]])
