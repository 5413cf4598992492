import numpy as np
import pytest

from socialsense.lp import (
    EQ,
    GE,
    LE,
    LinearProgram,
    LPError,
    check_farkas,
    primal_feasible,
    solve,
)

from oracles import tableau_simplex


def assert_kkt(lp, res, tol=1e-7):
    """Optimality check from the returned point and row multipliers only."""
    assert primal_feasible(lp, res.x, tol)
    c = -lp.c if lp.maximize else lp.c
    mu = res.duals
    slack = lp.A @ res.x - lp.b
    scale = 1 + np.abs(lp.b)
    for mi, si, rel, sc in zip(mu, slack, lp.relations, scale):
        if rel == LE:
            assert mi <= tol
        if rel == GE:
            assert mi >= -tol
        # complementary slackness on rows
        assert abs(mi * si) <= tol * sc * max(1.0, abs(mi))
    reduced = c - lp.A.T @ mu
    for j, rj in enumerate(reduced):
        at_lo = np.isfinite(lp.lower[j]) and abs(res.x[j] - lp.lower[j]) <= tol
        at_hi = np.isfinite(lp.upper[j]) and abs(res.x[j] - lp.upper[j]) <= tol
        if at_lo and at_hi:
            continue
        if at_lo:
            assert rj >= -tol * max(1.0, np.abs(c).max())
        elif at_hi:
            assert rj <= tol * max(1.0, np.abs(c).max())
        else:
            assert abs(rj) <= 1e-6 * max(1.0, np.abs(c).max())


class TestSmallCases:
    def test_single_bounded_variable(self):
        lp = LinearProgram(c=[1.0], A=[[1.0]], b=[1.0], relations=[LE], maximize=True)
        res = solve(lp)
        assert res.status == "optimal"
        assert res.x[0] == pytest.approx(1.0, abs=1e-12)
        assert_kkt(lp, res)

    def test_infeasible_pair_has_certificate(self):
        lp = LinearProgram(c=[0.0], A=[[1.0]], b=[-1.0], relations=[LE])
        res = solve(lp)
        assert res.status == "infeasible"
        assert check_farkas(lp, res.certificate)

    def test_unbounded_ray(self):
        lp = LinearProgram(c=[1.0, 1.0], A=[[1.0, -1.0]], b=[1.0], relations=[LE], maximize=True)
        res = solve(lp)
        assert res.status == "unbounded"
        assert lp.c @ res.ray > 0
        assert np.all(lp.A @ res.ray <= 1e-12)

    def test_equality_and_free_variables(self):
        # min x0 + 2 x1, x0 + x1 = 3, x0 - x1 >= -1, x0 free, x1 in [0, 5]
        lp = LinearProgram(
            c=[1.0, 2.0],
            A=[[1.0, 1.0], [1.0, -1.0]],
            b=[3.0, -1.0],
            relations=[EQ, GE],
            lower=[-np.inf, 0.0],
            upper=[np.inf, 5.0],
        )
        res = solve(lp)
        assert res.status == "optimal"
        np.testing.assert_allclose(res.x, [3.0, 0.0], atol=1e-10)
        assert_kkt(lp, res)

    def test_redundant_equalities(self):
        lp = LinearProgram(
            c=[1.0, 1.0],
            A=[[1.0, 1.0], [2.0, 2.0]],
            b=[2.0, 4.0],
            relations=[EQ, EQ],
        )
        res = solve(lp)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(2.0)

    def test_crossed_bounds_infeasible(self):
        lp = LinearProgram(c=[0.0], A=np.zeros((0, 1)), b=[], relations=[], lower=[2.0], upper=[1.0])
        assert solve(lp).status == "infeasible"

    def test_degenerate_cycling_example(self):
        # Beale's example cycles under the largest-coefficient rule
        c = [0.75, -150.0, 0.02, -6.0]
        A = [[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]]
        lp = LinearProgram(c=c, A=A, b=[0.0, 0.0, 1.0], relations=[LE] * 3, maximize=True)
        res = solve(lp)
        assert res.status == "optimal"
        assert res.objective == pytest.approx(0.05)
        assert_kkt(lp, res)


class TestValidation:
    def test_shape_mismatch(self):
        with pytest.raises(LPError):
            LinearProgram(c=[1.0, 2.0], A=[[1.0]], b=[1.0], relations=[LE])

    def test_nan_rejected(self):
        with pytest.raises(LPError):
            LinearProgram(c=[np.nan], A=[[1.0]], b=[1.0], relations=[LE])

    def test_unknown_relation(self):
        with pytest.raises(LPError):
            LinearProgram(c=[1.0], A=[[1.0]], b=[1.0], relations=["<"])


class TestAgainstTableau:
    def test_random_programs_match_reference(self):
        rng = np.random.default_rng(2024)
        seen = set()
        for _ in range(50):
            n = int(rng.integers(2, 31))
            m = int(rng.integers(2, 61))
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m) + 0.5
            c = rng.normal(size=n)
            status, _, value = tableau_simplex(c, A, b)
            lp = LinearProgram(c=c, A=A, b=b, relations=[LE] * m, maximize=True)
            res = solve(lp)
            seen.add(status)
            assert res.status == status
            if status == "optimal":
                assert res.objective == pytest.approx(value, abs=1e-7)
                assert_kkt(lp, res)
            elif status == "infeasible":
                assert check_farkas(lp, res.certificate)
        assert "optimal" in seen

    def test_mixed_relations_match_reference(self):
        # >= rows are negated into the reference's <= form
        rng = np.random.default_rng(7)
        for _ in range(40):
            n = int(rng.integers(1, 10))
            m = int(rng.integers(1, 15))
            A = rng.normal(size=(m, n))
            b = rng.normal(size=m)
            c = rng.normal(size=n)
            rel = [LE if r else GE for r in rng.random(m) < 0.6]
            sgn = np.array([1.0 if r == LE else -1.0 for r in rel])
            status, _, value = tableau_simplex(c, A * sgn[:, None], b * sgn)
            lp = LinearProgram(c=c, A=A, b=b, relations=rel, maximize=True)
            res = solve(lp)
            assert res.status == status
            if status == "optimal":
                assert res.objective == pytest.approx(value, abs=1e-7)
                assert_kkt(lp, res)
            elif status == "infeasible":
                assert check_farkas(lp, res.certificate)


class TestDeterminism:
    def test_same_vertex_on_rerun(self):
        rng = np.random.default_rng(3)
        A = rng.integers(-3, 4, size=(30, 8)).astype(float)
        b = np.abs(rng.integers(0, 3, size=30)).astype(float)
        lp = LinearProgram(c=np.ones(8), A=A, b=b, relations=[LE] * 30, maximize=True, upper=np.full(8, 10.0))
        first = solve(lp)
        for _ in range(3):
            again = solve(lp)
            assert again.status == first.status
            np.testing.assert_array_equal(again.x, first.x)


class TestFarkasChecker:
    def test_rejects_wrong_sign(self):
        lp = LinearProgram(c=[0.0], A=[[1.0]], b=[-1.0], relations=[LE])
        assert not check_farkas(lp, np.array([-1.0]))

    def test_accepts_textbook_certificate(self):
        # x <= -1 and x >= 0
        lp = LinearProgram(c=[0.0], A=[[1.0], [1.0]], b=[-1.0, 0.0], relations=[LE, GE], lower=[-np.inf])
        assert check_farkas(lp, np.array([1.0, -1.0]))
        res = solve(lp)
        assert res.status == "infeasible"
        assert check_farkas(lp, res.certificate)
