import numpy as np
import pytest

from socialsense.social_learning import (
    LearningError,
    action_policy,
    has_decreasing_differences,
    is_herding,
    is_submodular,
    is_tp2,
    mlr_dominates,
    myopic_action,
    private_belief,
    run_protocol,
    social_learning_filter,
)

from oracles import exact_correct_cascade_probability, fosd

B_FIT = np.array([[0.61, 0.39], [0.41, 0.59]])
C_FIT = np.array([[0.0, 2.0], [2.0, 0.0]])


def bayes(pi, B, y):
    post = np.asarray(pi) * B[:, y]
    return post / post.sum()


def hand_policy(pi, y):
    eta = bayes(pi, B_FIT, y)
    costs = [eta @ C_FIT[:, a] for a in range(2)]
    return 0 if costs[0] <= costs[1] else 1


def hand_filter(pi, a):
    lik = np.array([sum(B_FIT[i, y] for y in range(2) if hand_policy(pi, y) == a) for i in range(2)])
    post = pi * lik
    return post / post.sum()


def tp2_model(rng, X, Y):
    theta = np.sort(rng.normal(size=X))
    phi = np.sort(rng.normal(size=Y))
    B = np.exp(np.outer(theta, phi) + rng.normal(size=Y) * 0.3)
    return B / B.sum(axis=1, keepdims=True)


class TestPrivateBelief:
    def test_uninformative(self):
        pi = np.array([0.2, 0.5, 0.3])
        np.testing.assert_allclose(private_belief(pi, np.full((3, 2), 0.5), 1), pi)

    def test_identity_reveals_state(self):
        np.testing.assert_array_equal(private_belief(np.full(3, 1 / 3), np.eye(3), 2), [0, 0, 1])

    def test_fitted_model(self):
        eta = private_belief([0.5, 0.5], B_FIT, 0)
        np.testing.assert_allclose(eta, [0.61 / 1.02, 0.41 / 1.02], atol=1e-15)
        assert eta[0] == pytest.approx(0.598039, abs=1e-6)

    def test_impossible_observation(self):
        with pytest.raises(LearningError, match="zero probability"):
            private_belief([1.0, 0.0], np.eye(2), 1)

    def test_long_product_does_not_underflow(self):
        pi = np.array([0.5, 0.5])
        B = np.array([[1e-200, 1 - 1e-200], [2e-200, 1 - 2e-200]])
        for _ in range(3):
            pi = private_belief(pi, B, 0)
        np.testing.assert_allclose(pi, [1 / 9, 8 / 9])


class TestMyopicAction:
    def test_fitted_costs(self):
        assert myopic_action([0.9, 0.1], C_FIT) == 0

    def test_tie_goes_to_first_action(self):
        assert myopic_action([0.3, 0.7], np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])) == 0

    def test_affine_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            eta = rng.dirichlet(np.ones(4))
            c = rng.normal(size=(4, 3))
            a = myopic_action(eta, c)
            assert myopic_action(eta, c + 7.5) == a
            assert myopic_action(eta, 3.2 * c) == a


class TestFilter:
    def test_fitted_uniform_prior(self):
        np.testing.assert_allclose(social_learning_filter([0.5, 0.5], 0, B_FIT, C_FIT), [0.61 / 1.02, 0.41 / 1.02])

    def test_uninformative_model(self):
        pi = np.array([0.3, 0.7])
        for a in range(2):
            try:
                out = social_learning_filter(pi, a, np.full((2, 2), 0.5), C_FIT)
            except LearningError:
                continue
            np.testing.assert_array_equal(out, pi)

    def test_fixed_point_under_herding(self):
        pi = np.array([0.9, 0.1])
        assert is_herding(pi, B_FIT, C_FIT)
        assert social_learning_filter(pi, 0, B_FIT, C_FIT) is not pi
        np.testing.assert_array_equal(social_learning_filter(pi, 0, B_FIT, C_FIT), pi)

    def test_inconsistent_action(self):
        with pytest.raises(LearningError, match="action 1"):
            social_learning_filter([0.9, 0.1], 1, B_FIT, C_FIT)

    def test_matches_hand_filter(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            pi = rng.dirichlet(np.ones(2))
            for a in set(hand_policy(pi, y) for y in range(2)):
                np.testing.assert_allclose(social_learning_filter(pi, a, B_FIT, C_FIT), hand_filter(pi, a), atol=1e-12)

    def test_drift_per_step(self):
        rng = np.random.default_rng(9)
        B = tp2_model(rng, 3, 3)
        c = rng.normal(size=(3, 3))
        pi = np.full(3, 1 / 3)
        for _ in range(50):
            a = int(action_policy(pi, B, c)[rng.integers(3)])
            pi = social_learning_filter(pi, a, B, c)
            assert abs(pi.sum() - 1) < 1e-10


class TestProtocol:
    def test_identity_model_cascades_after_first_agent(self):
        run = run_protocol(1, np.eye(2), C_FIT, horizon=10, seed=0)
        assert run.cascade_time == 1
        np.testing.assert_array_equal(run.public_beliefs[1:], np.tile([0.0, 1.0], (10, 1)))
        assert np.all(run.actions == 1)

    def test_fitted_model_always_cascades(self):
        for seed in range(1000):
            run = run_protocol(seed % 2, B_FIT, C_FIT, horizon=200, seed=seed)
            assert run.cascade_time is not None
            frozen = run.public_beliefs[run.cascade_time :]
            assert np.all(frozen == frozen[0])

    @pytest.mark.parametrize("state", [0, 1])
    def test_correct_cascade_rate_matches_enumeration(self, state):
        p_correct, p_open = exact_correct_cascade_probability(
            B_FIT, C_FIT, np.array([0.5, 0.5]), state, hand_policy, hand_filter
        )
        assert p_open < 1e-9
        runs = [run_protocol(state, B_FIT, C_FIT, horizon=200, seed=s) for s in range(1000)]
        rate = np.mean([r.actions[-1] == state for r in runs])
        se = np.sqrt(p_correct * (1 - p_correct) / 1000)
        assert abs(rate - p_correct) <= 3 * se + 1e-3

    def test_seeded(self):
        a = run_protocol(0, B_FIT, C_FIT, 50, seed=3)
        b = run_protocol(0, B_FIT, C_FIT, 50, seed=3)
        np.testing.assert_array_equal(a.actions, b.actions)
        np.testing.assert_array_equal(a.public_beliefs, b.public_beliefs)

    def test_bad_horizon(self):
        with pytest.raises(LearningError):
            run_protocol(0, B_FIT, C_FIT, 0, seed=0)


class TestStructure:
    def test_tp2(self):
        assert is_tp2(B_FIT)
        assert not is_tp2([[0.4, 0.6], [0.6, 0.4]])
        assert is_tp2([[0.2, 0.3, 0.5]])

    def test_fitted_costs_literal_and_decreasing_differences(self):
        assert not is_submodular(C_FIT)
        assert has_decreasing_differences(C_FIT)

    def test_constant_costs(self):
        assert is_submodular(np.full((3, 3), 4.0))
        assert has_decreasing_differences(np.full((3, 3), 4.0))

    def test_product_costs(self):
        # increments in a equal x, which grow with x
        c = np.outer(np.arange(4), np.arange(3)).astype(float)
        assert is_submodular(c)
        assert not has_decreasing_differences(c)

    def test_ordinal_actions(self):
        rng = np.random.default_rng(12)
        checked = 0
        for _ in range(40):
            n = int(rng.integers(2, 5))
            B = tp2_model(rng, n, n)
            # c = -theta_x psi_a + g(a): increments fall in x
            c = -np.outer(np.sort(rng.normal(size=n)), np.sort(rng.normal(size=n))) + rng.normal(size=n)
            assert is_tp2(B) and has_decreasing_differences(c)
            for _ in range(100):
                pi = rng.dirichlet(np.ones(n))
                acts = [myopic_action(private_belief(pi, B, y), c) for y in range(n)]
                assert np.all(np.diff(acts) >= 0)
                checked += 1
            # the literal inequality holds for the mirrored costs and reverses the order
            assert is_submodular(c[:, ::-1])
        assert checked == 4000

    def test_mlr_examples(self):
        p = np.array([0.2, 0.3, 0.5])
        assert mlr_dominates(p, p)
        assert mlr_dominates([0.2, 0.8], [0.8, 0.2])
        assert not mlr_dominates([0.8, 0.2], [0.2, 0.8])
        assert mlr_dominates([0.0, 0.0, 1.0], [0.5, 0.5, 0.0])

    def test_mlr_implies_fosd(self):
        rng = np.random.default_rng(1)
        hits = 0
        for _ in range(20_000):
            X = int(rng.integers(2, 6))
            p, q = rng.dirichlet(np.ones(X) * 0.7, size=2)
            if rng.random() < 0.2:
                p[rng.integers(X)] = 0
                p /= p.sum()
            if mlr_dominates(p, q):
                hits += 1
                assert fosd(p, q)
        assert hits > 100
