"""Independent reference computations used by the test-suite.

Nothing here imports the code under test except for plain data containers
and the agent policy functions, so each oracle checks its target by a
separate route (tableau simplex, exact enumeration, rational elimination).
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------- LP oracle
def tableau_simplex(c, A, b, tol=1e-10, max_iter=5000):
    """Textbook two-phase tableau simplex for ``max c'x, Ax <= b, x >= 0``.

    Returns (status, x, value).  Rows with negative right-hand side get an
    artificial variable; phase 1 minimises the artificial sum.
    """
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    m, n = A.shape
    neg = b < 0
    n_art = int(neg.sum())
    # columns: x (n), slacks (m), artificials (n_art), rhs
    T = np.zeros((m, n + m + n_art + 1))
    T[:, :n] = A
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b
    basis = list(range(n, n + m))
    k = 0
    for i in range(m):
        if neg[i]:
            T[i, :-1] *= -1
            T[i, -1] *= -1
            T[i, n + m + k] = 1.0
            basis[i] = n + m + k
            k += 1

    def pivot(r, j):
        T[r] /= T[r, j]
        for i in range(m):
            if i != r and T[i, j] != 0:
                T[i] -= T[i, j] * T[r]
        basis[r] = j

    def optimise(cost, allowed):
        # cost is a "maximise" row vector over all columns
        for _ in range(max_iter):
            cb = cost[basis]
            z = cb @ T[:, :-1] - cost
            cand = [j for j in range(T.shape[1] - 1) if allowed[j] and z[j] < -tol]
            if not cand:
                return "optimal"
            j = cand[0]
            col = T[:, j]
            rows = [i for i in range(m) if col[i] > tol]
            if not rows:
                return "unbounded"
            ratios = [T[i, -1] / col[i] for i in rows]
            best = min(ratios)
            r = min((i for i, q in zip(rows, ratios) if q <= best + tol), key=lambda i: basis[i])
            pivot(r, j)
        raise RuntimeError("tableau simplex did not converge")

    ncol = T.shape[1] - 1
    if n_art:
        cost1 = np.zeros(ncol)
        cost1[n + m:] = -1.0
        optimise(cost1, np.ones(ncol, bool))
        if -(cost1[basis] @ T[:, -1]) > 1e-7:
            return "infeasible", None, None
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(n + m):
                    if abs(T[i, j]) > 1e-9:
                        pivot(i, j)
                        break
    cost2 = np.zeros(ncol)
    cost2[:n] = c
    allowed = np.ones(ncol, bool)
    allowed[n + m:] = False
    status = optimise(cost2, allowed)
    if status == "unbounded":
        return "unbounded", None, None
    x = np.zeros(ncol)
    x[basis] = T[:, -1]
    return "optimal", x[:n], float(c @ x[:n])


# ------------------------------------------------------ closure oracle
def exact_closure(A):
    """sgn((I - A)^{-1}) by Gauss-Jordan elimination over the rationals."""
    n = len(A)
    M = [[Fraction(int(i == j) - int(A[i][j])) for j in range(n)] for i in range(n)]
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    return np.array([[1 if v != 0 else 0 for v in row] for row in inv], dtype=int)


# -------------------------------------------- Bayesian network oracle
def brute_force_posteriors(adjacency, prior, B, costs, policy):
    """Exact posteriors P(x | actions reaching node n) for every node.

    Enumerates every joint observation vector y (one per node) and the state
    x, lets each node act on the exact posterior given the actions of all its
    ancestors (computed by the same enumeration), and returns a function
    ``posterior(n, y_vector)`` plus the action table.

    ``policy(belief, y)`` must return the node's action.
    """
    A = np.asarray(adjacency, dtype=int)
    n = A.shape[0]
    X, Y = B.shape
    reach = np.eye(n, dtype=bool)
    # plain DFS reachability, independent of any closure routine
    for src in range(n):
        stack = [src]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(A[u]):
                if not reach[src, v]:
                    reach[src, v] = True
                    stack.append(v)
    ancestors = [[m for m in range(n) if m != j and reach[m, j]] for j in range(n)]
    ys = list(itertools.product(range(Y), repeat=n))
    weights = np.array([[prior[x] * np.prod([B[x, y[i]] for i in range(n)]) for y in ys] for x in range(X)])
    actions = np.zeros((len(ys), n), dtype=int)
    post_tables = []
    for j in range(n):
        keys = [tuple(actions[k, m] for m in ancestors[j]) for k in range(len(ys))]
        table = {}
        for k, key in enumerate(keys):
            table.setdefault(key, np.zeros(X))
            table[key] += weights[:, k]
        for key in table:
            table[key] = table[key] / table[key].sum()
        post_tables.append((keys, table))
        for k, y in enumerate(ys):
            actions[k, j] = policy(table[keys[k]], y[j])
    index = {y: k for k, y in enumerate(ys)}

    def posterior(j, y):
        keys, table = post_tables[j]
        return table[keys[index[tuple(y)]]]

    def acts(y):
        return actions[index[tuple(y)]]

    return posterior, acts


# ------------------------------------------------ cascade oracle
def exact_correct_cascade_probability(B, costs, prior, true_state, policy, filt, horizon=200, floor=1e-14):
    """Probability that the sequential protocol herds on the correct action.

    Explores public-belief histories breadth-first, merging identical
    beliefs, until every branch has cascaded or the horizon is reached.
    ``filt(pi, a)`` is the public update, ``policy(pi, y)`` the agent action.
    Returns (P(cascade on action matching the state), P(no cascade)).
    """
    X, Y = B.shape
    frontier = {tuple(np.round(prior, 15)): (np.asarray(prior, float), 1.0)}
    correct = 0.0
    for _ in range(horizon):
        nxt = {}
        for key, (pi, mass) in frontier.items():
            acts = [policy(pi, y) for y in range(Y)]
            if len(set(acts)) == 1:
                if acts[0] == true_state:
                    correct += mass
                continue
            for y in range(Y):
                p = B[true_state, y] * mass
                if p < floor:
                    continue
                new = filt(pi, acts[y])
                k2 = tuple(np.round(new, 15))
                if k2 in nxt:
                    nxt[k2] = (nxt[k2][0], nxt[k2][1] + p)
                else:
                    nxt[k2] = (new, p)
        frontier = nxt
        if not frontier:
            break
    remaining = sum(m for _, m in frontier.values())
    return correct, remaining


# ------------------------------------------------ stochastic dominance
def fosd(p, q):
    """True if p first-order stochastically dominates q (upper tails)."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    tp = np.cumsum(p[::-1])[::-1]
    tq = np.cumsum(q[::-1])[::-1]
    return bool(np.all(tp >= tq - 1e-12))
