"""Dense linear programming: two-phase revised simplex with Bland's rule.

Problems are stated in general form::

    minimize (or maximize)  c'x
    subject to              A[i] x  (<= | = | >=)  b[i]
                            lower <= x <= upper

and converted internally to standard equality form with nonnegative
variables.  The solver is meant for the small dense systems that arise from
revealed-preference tests (a few hundred variables, a few thousand rows).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)


class LPError(ValueError):
    """Malformed linear program (shapes, NaN/Inf, unknown relations)."""


class LPNumericalError(RuntimeError):
    """The simplex iterations broke down numerically.

    Distinct from an infeasible or unbounded verdict: the answer is unknown.
    """


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    relations: Sequence[str]
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        self.A = A
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.relations = list(self.relations)
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).ravel()
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).ravel()
        m = self.b.size
        if self.A.ndim != 2 or self.A.shape != (m, n):
            raise LPError(f"constraint matrix has shape {self.A.shape}, expected {(m, n)}")
        if len(self.relations) != m:
            raise LPError(f"{len(self.relations)} relations for {m} rows")
        if self.lower.size != n or self.upper.size != n:
            raise LPError("bounds must have one entry per variable")
        bad = [r for r in self.relations if r not in _RELATIONS]
        if bad:
            raise LPError(f"unknown relation(s) {sorted(set(bad))}")
        for name in ("c", "A", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise LPError(f"{name} contains NaN or Inf")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise LPError("bounds contain NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise LPError("lower bound +inf or upper bound -inf")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size


@dataclass
class LPResult:
    """Outcome of :func:`solve`.

    ``status`` is ``"optimal"``, ``"infeasible"`` or ``"unbounded"``.  For an
    infeasible problem ``certificate`` holds one multiplier per row (see
    :func:`check_farkas`); for an unbounded one ``ray`` is a direction of
    unbounded improvement from ``x``.  For an optimal one ``duals`` holds a
    multiplier per row for the minimisation form (``-c`` when maximising):
    <= 0 on "<=" rows, >= 0 on ">=" rows.
    """

    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    certificate: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    iterations: int = 0
    duals: Optional[np.ndarray] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _StandardForm:
    """min c'z  s.t.  Az = b, z >= 0, plus the map back to the original x."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        cols = []  # (orig var, sign) for every structural column of z
        offset = np.zeros(n)
        ub_rows = []  # (z column, bound)
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    ub_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        nz = len(cols)
        M = np.zeros((n, nz))
        for k, (j, s) in enumerate(cols):
            M[j, k] = s
        self.M = M
        self.offset = offset
        self.n_struct = nz

        A_z = lp.A @ M
        b_z = lp.b - lp.A @ offset
        # orient every inequality as "<=" (sign stored per original row)
        orient = np.array([-1.0 if r == GE else 1.0 for r in lp.relations])
        A_z = A_z * orient[:, None]
        b_z = b_z * orient
        is_ineq = np.array([r != EQ for r in lp.relations], dtype=bool)
        if ub_rows:
            extra = np.zeros((len(ub_rows), nz))
            for r, (k, _) in enumerate(ub_rows):
                extra[r, k] = 1.0
            A_z = np.vstack([A_z, extra])
            b_z = np.concatenate([b_z, [u for _, u in ub_rows]])
            is_ineq = np.concatenate([is_ineq, np.ones(len(ub_rows), dtype=bool)])
            orient = np.concatenate([orient, np.ones(len(ub_rows))])
        m = b_z.size
        slack_rows = np.flatnonzero(is_ineq)
        S = np.zeros((m, slack_rows.size))
        S[slack_rows, np.arange(slack_rows.size)] = 1.0
        A_std = np.hstack([A_z, S])
        # only equality rows are negated; inequality rows keep their slack at +1
        flip = np.where((b_z < 0) & ~is_ineq, -1.0, 1.0)
        self.A = A_std * flip[:, None]
        self.b = b_z * flip
        self.flip = flip
        self.orient = orient
        self.n_orig_rows = lp.n_rows
        self.slack_of_row = np.full(m, -1)
        self.slack_of_row[slack_rows] = nz + np.arange(slack_rows.size)
        c_z = M.T @ lp.c
        self.c = np.concatenate([c_z, np.zeros(slack_rows.size)])
        self.c0 = float(lp.c @ offset)

    def to_x(self, z: np.ndarray) -> np.ndarray:
        return self.M @ z[: self.n_struct] + self.offset


class _Simplex:
    """Revised simplex with a partitioned basis.

    Column ``j < n_dense`` is a general column of ``A``; every later column is
    a signed unit vector (slack or artificial) described by ``unit_row`` and
    ``unit_sign``.  A basis therefore splits into unit columns covering rows
    ``U`` and dense columns ``J``; with ``K`` the remaining rows, every solve
    reduces to the small square block ``A[K, J]``.  For tall systems the
    work per iteration is O(m n + n^3) instead of O(m^2).
    """

    def __init__(self, A, unit_row, unit_sign, b, basis, tol, max_iter):
        self.A = A
        self.n_dense = A.shape[1]
        self.unit_row = np.asarray(unit_row, dtype=int)
        self.unit_sign = np.asarray(unit_sign, dtype=float)
        self.b = b
        self.live = np.ones(b.size, dtype=bool)
        self.basis = list(basis)
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0
        self._factor()

    @property
    def n_cols(self) -> int:
        return self.n_dense + self.unit_row.size

    def _factor(self):
        nd = self.n_dense
        basis = np.asarray(self.basis, dtype=int)
        dense = basis < nd
        self._pos_dense = np.flatnonzero(dense)
        self._pos_unit = np.flatnonzero(~dense)
        self._J = basis[dense]
        units = basis[~dense] - nd
        self._U = self.unit_row[units]
        self._sU = self.unit_sign[units]
        covered = np.zeros(self.b.size, dtype=bool)
        covered[self._U] = True
        self._K = np.flatnonzero(self.live & ~covered)
        if self._K.size != self._J.size:
            raise LPNumericalError("basis matrix became singular")
        block = self.A[np.ix_(self._K, self._J)]
        try:
            self._Minv = np.linalg.inv(block) if block.size else block
        except np.linalg.LinAlgError as exc:
            raise LPNumericalError("basis matrix became singular") from exc
        self.xB = self.ftran(self.b)

    def ftran(self, a: np.ndarray) -> np.ndarray:
        """Solve B d = a; ``d`` is indexed by basis position."""
        zJ = self._Minv @ a[self._K]
        full = np.zeros(self.n_dense)
        full[self._J] = zJ
        d = np.empty(len(self.basis))
        d[self._pos_dense] = zJ
        d[self._pos_unit] = self._sU * (a[self._U] - (self.A @ full)[self._U])
        return d

    def btran(self, cB: np.ndarray) -> np.ndarray:
        """Solve y'B = cB'; ``y`` has one entry per row (zero on dropped rows)."""
        y = np.zeros(self.b.size)
        yU = self._sU * cB[self._pos_unit]
        y[self._U] = yU
        y[self._K] = (cB[self._pos_dense] - (y @ self.A)[self._J]) @ self._Minv
        return y

    def column(self, j: int) -> np.ndarray:
        if j < self.n_dense:
            return self.A[:, j]
        a = np.zeros(self.b.size)
        a[self.unit_row[j - self.n_dense]] = self.unit_sign[j - self.n_dense]
        return a

    def row_of_inverse_times_A(self, r: int) -> np.ndarray:
        """Row ``r`` of B^{-1}[A | units], one entry per column."""
        e = np.zeros(len(self.basis))
        e[r] = 1.0
        return self.pricing_row(self.btran(e))

    def pricing_row(self, y: np.ndarray) -> np.ndarray:
        out = np.empty(self.n_cols)
        out[: self.n_dense] = y @ self.A
        out[self.n_dense :] = y[self.unit_row] * self.unit_sign
        return out

    def run(self, cost: np.ndarray, allowed: np.ndarray, stop_at: float = -np.inf):
        """Iterate to optimality for ``cost``; returns ("optimal"|"unbounded", entering, d).

        Iteration also stops once the objective falls to ``stop_at``.
        """
        tol = self.tol
        allowed = allowed.copy()
        allowed[self.n_dense :] &= self.live[self.unit_row]
        while True:
            if self.iterations >= self.max_iter:
                raise LPNumericalError(f"iteration limit {self.max_iter} reached")
            cB = cost[self.basis]
            if float(cB @ self.xB) <= stop_at:
                return "optimal", None, None
            reduced = cost - self.pricing_row(self.btran(cB))
            reduced[self.basis] = 0.0
            candidates = np.flatnonzero((reduced < -tol) & allowed)
            if candidates.size == 0:
                return "optimal", None, None
            j = int(candidates[0])  # Bland: lowest index
            d = self.ftran(self.column(j))
            # ignore entries that are tiny relative to the column to keep the basis well conditioned
            pos = np.flatnonzero(d > max(tol, 1e-9 * float(np.abs(d).max())))
            if pos.size == 0:
                return "unbounded", j, d
            xB = np.maximum(self.xB[pos], 0.0)
            # Harris pass: allow a step that leaves basics at most tol below zero,
            # then drop pivots far smaller than the largest admissible one
            theta = ((xB + tol) / d[pos]).min()
            ties = pos[xB / d[pos] <= theta]
            ties = ties[d[ties] >= 1e-3 * d[ties].max()]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, j, d)

    def pivot(self, r, j, d):
        self.iterations += 1
        if abs(d[r]) < 1e-11:
            raise LPNumericalError(f"pivot element {d[r]:.3e} too small")
        self.basis[r] = j
        self._factor()

    def drop_row(self, r):
        """Remove the redundant row held by the unit column at basis position ``r``."""
        self.live[self.unit_row[self.basis[r] - self.n_dense]] = False
        del self.basis[r]
        self._factor()


def solve(
    lp: LinearProgram,
    tol: float = 1e-9,
    max_iter: int = 50_000,
) -> LPResult:
    """Solve ``lp`` with the two-phase revised simplex method and Bland's rule.

    Bland's rule (lowest-index entering column, lowest-index leaving variable
    among ratio ties) guarantees termination on degenerate problems and makes
    the returned vertex a deterministic function of the input.

    Args:
        lp: the problem.
        tol: pricing and feasibility tolerance.
        max_iter: iteration cap across both phases.

    Returns:
        An :class:`LPResult`.

    Raises:
        LPError: malformed problem.
        LPNumericalError: the basis became singular or the iteration limit hit.
    """
    if not isinstance(lp, LinearProgram):
        raise LPError("expected a LinearProgram")
    if np.any(lp.lower > lp.upper):
        return LPResult("infeasible", certificate=np.zeros(lp.n_rows))
    return _solve_primal(lp, tol, max_iter)


def _solve_primal(lp: LinearProgram, tol: float, max_iter: int) -> LPResult:

    sf = _StandardForm(lp)
    m, nstd = sf.A.shape
    sign = -1.0 if lp.maximize else 1.0

    if m == 0:
        # only bounds: every structural z at its lower bound 0 unless cost pulls it
        c = sign * sf.c
        if np.any(c < -tol):
            j = int(np.flatnonzero(c < -tol)[0])
            z = np.zeros(nstd)
            ray_z = np.zeros(nstd)
            ray_z[j] = 1.0
            return LPResult("unbounded", x=sf.to_x(z), ray=sf.M @ ray_z[: sf.n_struct])
        z = np.zeros(nstd)
        x = sf.to_x(z)
        return LPResult("optimal", x=x, objective=float(lp.c @ x), duals=np.zeros(0))

    # Columns seen by the simplex: structural z, then (if some inequality row
    # starts infeasible) one composite artificial column, then the slack unit
    # columns, then one unit artificial per equality row.
    nd = sf.n_struct
    slack_rows = np.flatnonzero(sf.slack_of_row >= 0)
    eq_rows = np.flatnonzero(sf.slack_of_row < 0)
    neg_rows = slack_rows[sf.b[slack_rows] < -tol]
    dense = sf.A[:, :nd]
    n_comp = int(neg_rows.size > 0)
    if n_comp:
        comp = np.zeros((m, 1))
        comp[neg_rows, 0] = -1.0
        dense = np.hstack([dense, comp])
    n_dense = nd + n_comp
    unit_row = np.concatenate([slack_rows, eq_rows]).astype(int)
    unit_sign = np.ones(unit_row.size)
    n_cols = n_dense + unit_row.size
    is_art = np.zeros(n_cols, dtype=bool)
    is_art[nd:n_dense] = True
    is_art[n_dense + slack_rows.size :] = True
    basis = np.empty(m, dtype=int)
    basis[unit_row] = n_dense + np.arange(unit_row.size)

    scale = max(1.0, float(np.abs(sf.b).max(initial=0.0)))
    simplex = _Simplex(dense, unit_row, unit_sign, sf.b.copy(), basis, tol, max_iter)
    if is_art.any():
        if n_comp:
            # one pivot makes every inequality row feasible
            r = int(np.flatnonzero(unit_row == neg_rows[np.argmin(sf.b[neg_rows])])[0])
            r = simplex.basis.index(n_dense + r)
            simplex.pivot(r, nd, simplex.ftran(simplex.column(nd)))
        cost1 = is_art.astype(float)
        simplex.run(cost1, np.ones(n_cols, dtype=bool), stop_at=tol * scale)
        phase1 = float(cost1[simplex.basis] @ simplex.xB)
        if phase1 > tol * scale * 10:
            y = simplex.btran(cost1[simplex.basis])
            return LPResult(
                "infeasible",
                certificate=_farkas_from_phase1(sf, y, simplex),
                iterations=simplex.iterations,
            )
        _drive_out_artificials(simplex, is_art, tol)

    cost2 = np.zeros(n_cols)
    cost2[:nd] = sign * sf.c[:nd]
    status, j, d = simplex.run(cost2, ~is_art)
    z = np.zeros(n_cols)
    z[simplex.basis] = simplex.xB
    z = np.maximum(z[:nd], 0.0)
    x = sf.M @ z + sf.offset
    if status == "unbounded":
        ray = np.zeros(n_cols)
        ray[j] = 1.0
        ray[simplex.basis] = -d
        return LPResult(
            "unbounded",
            x=x,
            ray=sf.M @ ray[:nd],
            iterations=simplex.iterations,
        )
    y = simplex.btran(cost2[simplex.basis])
    duals = (y * sf.flip * sf.orient)[: sf.n_orig_rows]
    obj = float(lp.c @ x)
    return LPResult("optimal", x=x, objective=obj, iterations=simplex.iterations, duals=duals)


def _drive_out_artificials(simplex: _Simplex, is_art: np.ndarray, tol: float):
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    r = 0
    while r < len(simplex.basis):
        if not is_art[simplex.basis[r]]:
            r += 1
            continue
        row = simplex.row_of_inverse_times_A(r)
        row[simplex.basis] = 0.0
        row[is_art] = 0.0
        row[simplex.n_dense :][~simplex.live[simplex.unit_row]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-9:
            d = simplex.ftran(simplex.column(j))
            simplex.pivot(r, j, d)
            r += 1
        elif simplex.basis[r] < simplex.n_dense:
            raise LPNumericalError("composite artificial could not leave the basis")
        else:
            simplex.drop_row(r)


def _farkas_from_phase1(sf: _StandardForm, y: np.ndarray, simplex: _Simplex) -> np.ndarray:
    """Map the phase-1 dual to one multiplier per original row.

    Convention (see :func:`check_farkas`): multipliers are >= 0 on "<=" rows,
    <= 0 on ">=" rows, free on "=" rows.
    """
    # rows may have been dropped only after phase 1, so y aligns with sf rows
    mu = -(y * sf.flip)  # multipliers on the "<=" oriented rows
    mu = mu[: sf.n_orig_rows]
    return mu * sf.orient[: sf.n_orig_rows]


def check_farkas(lp: LinearProgram, y: np.ndarray, tol: float = 1e-7) -> bool:
    """Verify an infeasibility certificate independently of the solver.

    For every feasible x, sum_i y_i (A_i x - b_i) <= 0 by the sign convention.
    The certificate is valid when the minimum of that expression over the
    variable bounds is strictly positive.
    """
    y = np.asarray(y, dtype=float)
    for yi, rel in zip(y, lp.relations):
        if rel == LE and yi < -tol:
            return False
        if rel == GE and yi > tol:
            return False
    g = lp.A.T @ y
    total = -float(y @ lp.b)
    for j, gj in enumerate(g):
        if abs(gj) <= tol:
            continue
        bound = lp.lower[j] if gj > 0 else lp.upper[j]
        if not np.isfinite(bound):
            return False
        total += gj * bound
    if np.any(lp.lower > lp.upper):
        return True
    return total > tol


def primal_feasible(lp: LinearProgram, x: np.ndarray, tol: float = 1e-7) -> bool:
    x = np.asarray(x, dtype=float)
    if np.any(x < lp.lower - tol) or np.any(x > lp.upper + tol):
        return False
    r = lp.A @ x - lp.b
    scale = tol * (1 + np.abs(lp.b))
    for ri, si, rel in zip(r, scale, lp.relations):
        if rel == LE and ri > si:
            return False
        if rel == GE and ri < -si:
            return False
        if rel == EQ and abs(ri) > si:
            return False
    return True
