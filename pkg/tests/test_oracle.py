import numpy as np
import pytest

from decem.builtins import load_builtin
from decem.errors import ResourceError
from decem.kernel import build_joint_chain
from decem.model import JointPolicy, init_policy, random_model
from decem.oracle import (
    enumerate_alpha_beta,
    enumerate_return,
    enumerate_return_paths,
    monte_carlo_return,
)
from decem.solver import evaluate

from conftest import make_chain, random_chain, tiny_model


class TestAlphaBeta:
    def test_t_zero(self):
        ch = random_chain(np.random.default_rng(0), 3, 0.9)
        a, b = enumerate_alpha_beta(ch, 0)
        np.testing.assert_array_equal(a, ch.initial)
        np.testing.assert_array_equal(b, ch.scaled_reward)

    def test_two_cycle(self):
        ch = make_chain([[0, 1], [1, 0]], [0.3, 0.7], [1, 0], 0.9)
        a, _ = enumerate_alpha_beta(ch, 2)
        np.testing.assert_allclose(a, [0.3, 0.7], atol=1e-15)

    @pytest.mark.parametrize("t", range(6))
    def test_matches_recursion(self, t):
        ch = random_chain(np.random.default_rng(1), 3, 0.9)
        a, b = enumerate_alpha_beta(ch, t)
        P = np.linalg.matrix_power(ch.kernel, t)
        np.testing.assert_allclose(a, P @ ch.initial, atol=1e-12, rtol=0)
        np.testing.assert_allclose(b, P.T @ ch.scaled_reward, atol=1e-12, rtol=0)

    def test_guard(self):
        ch = random_chain(np.random.default_rng(2), 4, 0.9)
        with pytest.raises(ResourceError):
            enumerate_alpha_beta(ch, 30)


class TestEnumerateReturn:
    def test_horizon_zero(self, rand3):
        model, pol = rand3
        nuj, pij = pol.joint_nu(), pol.joint_pi()
        expect = sum(
            model.initial_state[x] * nuj[z] * pij[z, a] * model.reward[x, a]
            for x in range(3) for z in range(4) for a in range(4)
        )
        assert enumerate_return(model, pol, 0) == pytest.approx(expect, abs=1e-14)

    def test_constant_reward(self):
        m = tiny_model(n_states=2, n_actions=2, n_obs=2, reward=3.0, gamma=0.8, p_stay=0.6)
        pol = init_policy(m, 2, seed=0)
        assert enumerate_return(m, pol, 7) == pytest.approx(3 * (1 - 0.8 ** 8) / 0.2, abs=1e-12)

    @pytest.mark.parametrize("horizon", [0, 1, 2])
    def test_merged_equals_literal_paths(self, horizon):
        model = random_model(5, n_states=2, discount=0.8)
        pol = init_policy(model, 2, seed=4)
        assert enumerate_return(model, pol, horizon) == pytest.approx(
            enumerate_return_paths(model, pol, horizon), abs=1e-12
        )

    def test_tail_bound(self, rand3):
        model, pol = rand3
        H = 60
        bound = model.discount ** (H + 1) * np.abs(model.reward).max() / (1 - model.discount)
        assert abs(enumerate_return(model, pol, H) - evaluate(model, pol)) <= bound

    def test_guard(self, rand3):
        model, pol = rand3
        with pytest.raises(ResourceError):
            enumerate_return(model, pol, 10, max_ops=100)


class TestMonteCarlo:
    def test_deterministic_has_zero_variance(self):
        m = tiny_model(n_states=2, n_actions=1, reward=[[1.0], [2.0]], gamma=0.5, p_stay=0.0)
        pol = JointPolicy(pi=[np.ones((1, 1))], lam=[np.ones((1, 1, 1))], nu=[np.ones(1)])
        mean, se = monte_carlo_return(m, pol, 50, 5, seed=0)
        assert se == 0.0
        assert mean == pytest.approx(enumerate_return(m, pol, 5), abs=1e-12)

    def test_single_episode_reproducible(self, rand3):
        model, pol = rand3
        assert monte_carlo_return(model, pol, 1, 10, seed=3) == monte_carlo_return(model, pol, 1, 10, seed=3)

    def test_rejects_zero_episodes(self, rand3):
        with pytest.raises(ValueError):
            monte_carlo_return(*rand3, 0, 5)

    @pytest.mark.slow
    def test_calibration_on_toy(self):
        model = load_builtin("toy2agent", gamma=0.9)
        pol = init_policy(model, 2, seed=0)
        H = 200
        mean, se = monte_carlo_return(model, pol, 100_000, H, seed=1)
        assert abs(mean - enumerate_return(model, pol, H)) <= 4 * se
        assert abs(mean - evaluate(model, pol)) <= 4 * se + 1e-6
