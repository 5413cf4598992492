import numpy as np
import pytest

from socialsense.lp import LPNumericalError
from socialsense.revealed_prefs import (
    ConsumerDataset,
    LogPotentialGame,
    MultiAgentDataset,
    PotentialCertificate,
    RevealedPreferenceError,
    afriat_feasible,
    build_potential,
    build_utility,
    certificate_violation,
    cobb_douglas_dataset,
    garp_check,
    marginal_rate_substitution,
    nash_rationality_test,
    potential_game_dataset,
    predict_response,
    random_dataset,
    read_dataset,
    warshall,
    write_dataset,
)

GAME = LogPotentialGame(np.array([[1.0, 2.0], [2.0, 1.0]]), 0.5)


def warp_pair():
    # x_0 is strictly cheaper than x_1 at p_1 and vice versa
    return ConsumerDataset([[2.0, 1.0], [1.0, 2.0]], [[2.0, 0.0], [0.0, 2.0]])


def mixed_dataset(rng):
    T = int(rng.integers(1, 13))
    m = int(rng.integers(1, 5))
    if rng.random() < 0.5:
        return cobb_douglas_dataset(T, m, rng)
    return random_dataset(T, m, rng)


def reachability(R0):
    R = R0.copy()
    for _ in range(R.shape[0]):
        R = R | ((R.astype(int) @ R0.astype(int)) > 0)
    return R


class TestDatasets:
    def test_default_budgets(self):
        d = ConsumerDataset([[1.0, 2.0]], [[3.0, 1.0]])
        np.testing.assert_allclose(d.budgets, [5.0])

    @pytest.mark.parametrize("price", [0.0, -1.0, np.nan])
    def test_nonpositive_price(self, price):
        with pytest.raises(RevealedPreferenceError, match="strictly positive"):
            ConsumerDataset([[1.0, price]], [[1.0, 1.0]])

    def test_shape_mismatch(self):
        with pytest.raises(RevealedPreferenceError):
            ConsumerDataset([[1.0, 1.0]], [[1.0, 1.0, 1.0]])
        with pytest.raises(RevealedPreferenceError):
            MultiAgentDataset([[1.0, 1.0]], [[1.0, 1.0]])

    def test_agent_slice(self):
        d = potential_game_dataset(GAME, 5, np.random.default_rng(0))
        s = d.agent(1)
        np.testing.assert_array_equal(s.responses, d.responses[1])
        np.testing.assert_array_equal(s.budgets, d.budgets[1])


class TestGarp:
    def test_single_observation(self):
        assert garp_check(ConsumerDataset([[1.0, 2.0]], [[1.0, 1.0]])).passed

    def test_symmetric_budget(self):
        d = ConsumerDataset([[1.0, 1.0], [1.0, 1.0]], [[2.0, 0.0], [0.0, 2.0]])
        assert garp_check(d).passed

    def test_cobb_douglas_passes(self):
        rng = np.random.default_rng(0)
        d = cobb_douglas_dataset(50, 2, rng, alpha=[0.3, 0.7])
        assert garp_check(d).passed

    def test_warp_violation(self):
        d = warp_pair()
        p, x = d.prices, d.responses
        # hand check: each bundle strictly affordable at the other's prices
        assert p[0] @ x[0] > p[0] @ x[1] and p[1] @ x[1] > p[1] @ x[0]
        res = garp_check(d)
        assert not res.passed
        assert sorted(res.cycle) == [0, 1]

    def test_three_cycle(self):
        # each bundle is strictly cheaper than the own bundle at the previous prices
        p = np.array([[1.0, 0.5, 4.0], [4.0, 1.0, 0.5], [0.5, 4.0, 1.0]])
        d = ConsumerDataset(p, 2 * np.eye(3))
        assert not afriat_feasible(d).feasible
        res = garp_check(d)
        assert not res.passed
        assert len(res.cycle) == 3

    def test_shortest_cycle_witness(self):
        # the 3-cycle above plus a 2-cycle at a much larger scale
        p = np.array([[1.0, 0.5, 4.0], [4.0, 1.0, 0.5], [0.5, 4.0, 1.0], [2.0, 1.0, 1.0], [1.0, 2.0, 1.0]])
        x = np.vstack([2 * np.eye(3), [[200.0, 0.0, 0.0], [0.0, 200.0, 0.0]]])
        res = garp_check(ConsumerDataset(p, x))
        assert not res.passed
        assert sorted(res.cycle) == [3, 4]

    def test_witness_is_a_violation(self):
        rng = np.random.default_rng(1)
        checked = 0
        for _ in range(200):
            d = random_dataset(int(rng.integers(2, 10)), 3, rng)
            res = garp_check(d)
            if res.passed:
                continue
            c = res.cycle
            E = d.prices @ d.responses.T
            for a, b in zip(c, c[1:]):
                assert E[a, a] >= E[a, b] - 1e-9 * (1 + E[a, a])
            assert E[c[-1], c[-1]] > E[c[-1], c[0]]
            checked += 1
        assert checked > 50

    def test_warshall_matches_reachability(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            R0 = rng.random((8, 8)) < 0.2
            np.testing.assert_array_equal(warshall(R0), reachability(R0))

    def test_ordinal_verdicts(self):
        # demands chosen on a discrete budget grid by u and by exp(u) coincide
        rng = np.random.default_rng(3)
        for _ in range(30):
            w = rng.dirichlet(np.ones(2))
            p = rng.uniform(0.5, 2.0, size=(8, 2))
            I = rng.uniform(1.0, 3.0, size=8)
            verdicts = []
            for f in (lambda u: u, np.exp, lambda u: u**3):
                x = []
                for t in range(8):
                    s = np.linspace(0.01, 0.99, 99)
                    cand = np.stack([s * I[t] / p[t, 0], (1 - s) * I[t] / p[t, 1]], axis=1)
                    u = np.log(cand) @ w
                    x.append(cand[np.argmax(f(u))])
                verdicts.append(garp_check(ConsumerDataset(p, np.array(x))).passed)
            assert len(set(verdicts)) == 1

    def test_wrong_type(self):
        with pytest.raises(RevealedPreferenceError):
            garp_check(MultiAgentDataset.from_single(warp_pair()))


class TestAfriat:
    def test_single_observation(self):
        cert = afriat_feasible(ConsumerDataset([[1.0, 2.0]], [[1.0, 1.0]]))
        assert cert.feasible
        np.testing.assert_array_equal(cert.utilities, [0.0])
        np.testing.assert_array_equal(cert.multipliers, [1.0])

    def test_cobb_douglas_feasible(self):
        d = cobb_douglas_dataset(30, 2, np.random.default_rng(4), alpha=[0.4, 0.6])
        cert = afriat_feasible(d)
        assert cert.feasible
        assert certificate_violation(cert, d) <= 1e-8
        assert np.all(cert.multipliers >= 1.0)

    def test_warp_pair_infeasible(self):
        cert = afriat_feasible(warp_pair())
        assert not cert.feasible
        assert sorted(cert.witness) == [0, 1]
        assert cert.farkas is not None

    def test_equivalence_with_garp(self):
        rng = np.random.default_rng(5)
        for _ in range(150):
            d = mixed_dataset(rng)
            cert = afriat_feasible(d)
            assert cert.feasible == garp_check(d).passed
            if cert.feasible:
                assert certificate_violation(cert, d) <= 1e-8

    def test_floor_does_not_change_verdict(self):
        rng = np.random.default_rng(6)
        for _ in range(40):
            d = mixed_dataset(rng)
            assert afriat_feasible(d, 1e-6).feasible == afriat_feasible(d, 1.0).feasible

    def test_bad_floor(self):
        with pytest.raises(RevealedPreferenceError):
            afriat_feasible(warp_pair(), 0.0)


class TestUtility:
    @pytest.fixture
    def fitted(self):
        d = cobb_douglas_dataset(20, 2, np.random.default_rng(7), alpha=[0.35, 0.65])
        return d, build_utility(afriat_feasible(d), d)

    def test_levels_at_observations(self, fitted):
        d, u = fitted
        cert = afriat_feasible(d)
        np.testing.assert_allclose(u(d.responses), cert.utilities, atol=1e-8)

    def test_monotone(self, fitted):
        _, u = fitted
        rng = np.random.default_rng(8)
        x = rng.uniform(0, 4, size=(200, 2))
        assert np.all(u(x + 0.01) > u(x))
        for j in range(2):
            step = np.zeros(2)
            step[j] = 0.05
            assert np.all(u(x + step) > u(x))

    def test_concave(self, fitted):
        _, u = fitted
        rng = np.random.default_rng(9)
        a, b = rng.uniform(0, 4, size=(2, 500, 2))
        assert np.all(u((a + b) / 2) >= (u(a) + u(b)) / 2 - 1e-12)

    def test_rationalizes_on_grid(self, fitted):
        d, u = fitted
        for t in range(0, d.n_obs, 4):
            p, I = d.prices[t], d.budgets[t]
            g1, g2 = np.meshgrid(np.linspace(0, I / p[0], 200), np.linspace(0, I / p[1], 200))
            grid = np.stack([g1.ravel(), g2.ravel()], axis=1)
            grid = grid[grid @ p <= I]
            assert u(d.responses[t]) >= u(grid).max() - 1e-8

    def test_infeasible_certificate(self):
        with pytest.raises(RevealedPreferenceError):
            build_utility(afriat_feasible(warp_pair()), warp_pair())


class TestNash:
    def test_single_agent_reduction(self):
        rng = np.random.default_rng(10)
        for _ in range(60):
            d = mixed_dataset(rng)
            multi = MultiAgentDataset.from_single(d)
            assert nash_rationality_test(multi).feasible == afriat_feasible(d).feasible
            assert nash_rationality_test(multi, precheck=False).feasible == afriat_feasible(d).feasible

    def test_potential_game_passes(self):
        d = potential_game_dataset(GAME, 15, np.random.default_rng(11))
        cert = nash_rationality_test(d)
        assert cert.feasible
        assert cert.multipliers.shape == (2, 15)
        assert certificate_violation(cert, d) <= 1e-8

    def test_agent_failing_garp(self):
        good = potential_game_dataset(GAME, 2, np.random.default_rng(12))
        x = good.responses.copy()
        x[1] = warp_pair().responses
        d = MultiAgentDataset(warp_pair().prices, x)
        cert = nash_rationality_test(d)
        assert not cert.feasible
        assert cert.witness["agent"] == 1

    def test_joint_inequalities_alone_can_absorb_an_agent(self):
        # same data: the other agent's multipliers make the joint system feasible,
        # so the per-agent check is a genuine extra condition
        good = potential_game_dataset(GAME, 2, np.random.default_rng(12))
        x = good.responses.copy()
        x[1] = warp_pair().responses
        d = MultiAgentDataset(warp_pair().prices, x)
        cert = nash_rationality_test(d, precheck=False)
        assert cert.feasible
        assert certificate_violation(cert, d) <= 1e-12

    def test_generator_is_an_equilibrium(self):
        rng = np.random.default_rng(13)
        a, beta = GAME.weights, GAME.beta
        for _ in range(10):
            p = rng.uniform(0.5, 2.0, size=2)
            I = rng.uniform(1.0, 3.0, size=2)
            x = GAME.equilibrium(p, I)
            np.testing.assert_allclose(x @ p, I, rtol=1e-12)
            grad = a / x + beta / x.sum(axis=0)
            ratio = grad / p
            np.testing.assert_allclose(ratio[:, 0], ratio[:, 1], rtol=1e-9)


class TestPotential:
    @pytest.fixture(scope="class")
    @staticmethod
    def fitted():
        d = potential_game_dataset(GAME, 15, np.random.default_rng(14))
        cert = nash_rationality_test(d)
        return d, cert, build_potential(cert, d)

    def test_levels_at_observations(self, fitted):
        d, cert, V = fitted
        for t in range(d.n_obs):
            assert V(d.responses[:, t]) == pytest.approx(cert.potentials[t], abs=1e-8)

    def test_concave(self, fitted):
        _, _, V = fitted
        rng = np.random.default_rng(15)
        a, b = rng.uniform(0, 4, size=(2, 300, 4))
        assert np.all(V((a + b) / 2) >= (V(a) + V(b)) / 2 - 1e-12)

    def test_revealed_order_matches_generator(self, fitted):
        d, cert, _ = fitted
        E = np.einsum("tj,isj->its", d.prices, d.responses)
        affordable = np.all(E <= d.budgets[:, :, None] + 1e-12, axis=0)
        truth = np.array([GAME.value(d.responses[:, t]) for t in range(d.n_obs)])
        pairs = 0
        for t, tau in zip(*np.nonzero(affordable)):
            if t != tau:
                assert cert.potentials[tau] <= cert.potentials[t] + 1e-8
                assert truth[tau] <= truth[t] + 1e-12
                pairs += 1
        assert pairs > 0


class TestPredict:
    @pytest.fixture(scope="class")
    @staticmethod
    def fitted():
        d = potential_game_dataset(GAME, 12, np.random.default_rng(16))
        return d, nash_rationality_test(d)

    def test_observed_probe(self, fitted):
        d, cert = fitted
        for t in range(d.n_obs):
            pred = predict_response(cert, d, d.prices[t], d.budgets[:, t])
            assert pred.value >= cert.potentials[t] - 1e-8
            assert np.all(pred.responses @ d.prices[t] <= d.budgets[:, t] + 1e-8)

    def test_single_plane_saturates_budget(self):
        d = MultiAgentDataset([[1.0, 2.0]], [[[1.0, 1.0]], [[2.0, 0.5]]])
        cert = nash_rationality_test(d)
        pred = predict_response(cert, d, [1.5, 0.5], [4.0, 2.0])
        np.testing.assert_allclose(pred.responses @ [1.5, 0.5], [4.0, 2.0], atol=1e-9)

    def test_single_agent_accuracy(self):
        errs = []
        alpha = np.array([0.3, 0.7])
        for trial in range(20):
            rng = np.random.default_rng(100 + trial)
            d = MultiAgentDataset.from_single(cobb_douglas_dataset(40, 2, rng, alpha))
            cert = nash_rationality_test(d)
            p, I = rng.uniform(0.5, 2.0, size=2), rng.uniform(1.0, 3.0)
            truth = alpha * I / p
            pred = predict_response(cert, d, p, [I]).responses[0]
            errs.append(np.linalg.norm(pred - truth) / np.linalg.norm(truth))
        assert np.median(errs) <= 0.15

    @pytest.mark.parametrize("price, budgets", [([1.0, 0.0], [1.0, 1.0]), ([1.0, 1.0], [1.0]), ([1.0, 1.0], [-1.0, 1.0])])
    def test_bad_probe(self, fitted, price, budgets):
        d, cert = fitted
        with pytest.raises(RevealedPreferenceError):
            predict_response(cert, d, price, budgets)

    def test_infeasible_certificate(self, fitted):
        d, _ = fitted
        with pytest.raises(RevealedPreferenceError):
            predict_response(PotentialCertificate(False), d, [1.0, 1.0], [1.0, 1.0])


class TestMrs:
    def test_single_observation(self):
        d = ConsumerDataset([[3.0, 2.0]], [[1.0, 1.0]])
        u = build_utility(afriat_feasible(d), d)
        for z in np.random.default_rng(17).uniform(0, 5, size=(20, 2)):
            res = marginal_rate_substitution(u, z)
            assert res.value == pytest.approx(1.5) and res.smooth

    def test_higher_first_prices(self):
        rng = np.random.default_rng(18)
        p2 = rng.uniform(0.5, 1.0, size=12)
        p = np.stack([p2 * rng.uniform(1.2, 2.0, size=12), p2], axis=1)
        x = np.stack([np.full(12, 1.0), np.full(12, 1.0)], axis=1) * rng.uniform(0.5, 2.0, size=(12, 1))
        d = ConsumerDataset(p, x / p * p.mean(axis=0))
        cert = afriat_feasible(d)
        assert cert.feasible
        u = build_utility(cert, d)
        for z in rng.uniform(0, 3, size=(50, 2)):
            assert marginal_rate_substitution(u, z).value > 1

    def test_price_scaling(self):
        d = cobb_douglas_dataset(10, 2, np.random.default_rng(19))
        scaled = ConsumerDataset(d.prices * 7.0, d.responses)
        u1 = build_utility(afriat_feasible(d), d)
        u2 = build_utility(afriat_feasible(scaled), scaled)
        for z in np.random.default_rng(20).uniform(0, 3, size=(20, 2)):
            a, b = marginal_rate_substitution(u1, z), marginal_rate_substitution(u2, z)
            if a.smooth and b.smooth and np.array_equal(a.active, b.active):
                assert a.value == pytest.approx(b.value, rel=1e-12)

    def test_tie_is_flagged(self):
        d = ConsumerDataset([[1.0, 1.0], [1.0, 3.0]], [[1.0, 1.0], [1.0, 1.0]])
        u = build_utility(afriat_feasible(d), d)
        res = marginal_rate_substitution(u, [1.0, 1.0])
        assert not res.smooth
        assert res.active.size == 2

    def test_potential_agent_index(self):
        d = potential_game_dataset(GAME, 1, np.random.default_rng(21))
        V = build_potential(nash_rationality_test(d), d)
        for i in range(2):
            assert marginal_rate_substitution(V, d.responses[:, 0], agent=i).value == pytest.approx(d.prices[0, 0] / d.prices[0, 1])
        with pytest.raises(RevealedPreferenceError):
            marginal_rate_substitution(V, d.responses[:, 0], agent=2)


class TestCsv:
    def test_round_trip(self, tmp_path):
        d = potential_game_dataset(GAME, 6, np.random.default_rng(22))
        write_dataset(d, tmp_path / "d.csv")
        back = read_dataset(tmp_path / "d.csv")
        np.testing.assert_array_equal(back.prices, d.prices)
        np.testing.assert_array_equal(back.responses, d.responses)

    @pytest.mark.parametrize(
        "text, message",
        [
            ("", "empty"),
            ("t,p_1,agent,y_1\n", "header"),
            ("t,p_1,agent,x_1\n0,1,0\n", "line 2"),
            ("t,p_1,agent,x_1\n0,1,0,abc\n", "line 2 column 4"),
            ("t,p_1,agent,x_1\n0,1,0,1\n0,2,1,1\n", "differ"),
            ("t,p_1,agent,x_1\n0,1,0,1\n0,1,1,1\n1,1,0,1\n", "t=1, agent=1"),
            ("t,p_1,agent,x_1\n0,-1,0,1\n", "strictly positive"),
        ],
    )
    def test_bad_files(self, tmp_path, text, message):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(RevealedPreferenceError, match=message):
            read_dataset(path)


def test_numerical_error_is_not_infeasible():
    assert not issubclass(LPNumericalError, RevealedPreferenceError)
