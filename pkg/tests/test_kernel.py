import itertools

import numpy as np
import pytest
from dataclasses import replace

from decem.errors import ModelError
from decem.kernel import (
    action_conditioned_kernel,
    build_joint_chain,
    observation_conditioned_kernel,
    scale_reward,
)
from decem.model import DecPomdpModel, JointPolicy, init_policy, random_model

from conftest import tiny_model


def naive_kernel(model, policy):
    """P[(x', z'), (x, z)] by looping over per-agent tuples."""
    N = model.num_agents
    A, Y = model.action_counts, model.observation_counts
    Z = policy.memory_sizes
    nz = int(np.prod(Z))
    nx = model.n_states
    P = np.zeros((nx * nz, nx * nz))
    zs = list(itertools.product(*[range(k) for k in Z]))
    for x, (zi, z), x2, (wi, w) in itertools.product(range(nx), enumerate(zs), range(nx), enumerate(zs)):
        total = 0.0
        for ai, a in enumerate(itertools.product(*[range(k) for k in A])):
            pa = 1.0
            for i in range(N):
                pa *= policy.pi[i][z[i], a[i]]
            for yi, y in enumerate(itertools.product(*[range(k) for k in Y])):
                pl = 1.0
                for i in range(N):
                    pl *= policy.lam[i][z[i], y[i], w[i]]
                total += pl * model.observation_fn[x2, ai, yi] * model.transition[x, ai, x2] * pa
        P[x2 * nz + wi, x * nz + zi] = total
    return P


class TestScaleReward:
    def test_unit_range_unchanged(self):
        rbar, deg = scale_reward(tiny_model(n_actions=2, reward=[0.0, 1.0]))
        np.testing.assert_array_equal(rbar, [[0.0, 1.0]])
        assert not deg

    def test_midpoint(self):
        rbar, _ = scale_reward(tiny_model(n_actions=3, reward=[-2.0, 3.0, 8.0]))
        assert rbar[0, 1] == 0.5

    def test_constant_is_degenerate(self):
        rbar, deg = scale_reward(tiny_model(n_actions=2, reward=5.0))
        assert deg
        np.testing.assert_array_equal(rbar, 0.0)


class TestBuildJointChain:
    def test_trivial_model(self):
        m = tiny_model()
        chain = build_joint_chain(m, init_policy(m, 1))
        np.testing.assert_array_equal(chain.kernel, [[1.0]])
        np.testing.assert_array_equal(chain.initial, [1.0])

    def test_flip(self):
        m = tiny_model(n_states=2, p_stay=0.0)
        chain = build_joint_chain(m, init_policy(m, 1))
        np.testing.assert_array_equal(chain.kernel, [[0.0, 1.0], [1.0, 0.0]])

    def test_matches_quadruple_loop(self, rand3):
        model, pol = rand3
        chain = build_joint_chain(model, pol)
        np.testing.assert_allclose(chain.kernel, naive_kernel(model, pol), atol=1e-12, rtol=0)

    def test_asymmetric_sizes(self):
        model = random_model(4, n_states=2, action_counts=(3, 2), observation_counts=(2, 3))
        pol = init_policy(model, [3, 2], seed=1)
        chain = build_joint_chain(model, pol)
        np.testing.assert_allclose(chain.kernel, naive_kernel(model, pol), atol=1e-12, rtol=0)

    @pytest.mark.parametrize("seed", range(20))
    def test_column_stochastic(self, seed):
        model = random_model(seed, n_states=1 + seed % 4)
        chain = build_joint_chain(model, init_policy(model, 2, seed=seed))
        np.testing.assert_allclose(chain.kernel.sum(axis=0), 1.0, atol=1e-12)
        assert (chain.kernel >= 0).all()
        assert chain.initial.sum() == pytest.approx(1.0, abs=1e-12)

    def test_initial_and_reward_layout(self, rand3):
        model, pol = rand3
        chain = build_joint_chain(model, pol)
        rbar, _ = scale_reward(model)
        nuj, pij = pol.joint_nu(), pol.joint_pi()
        for x in range(model.n_states):
            for z in range(4):
                assert chain.initial[x * 4 + z] == pytest.approx(model.initial_state[x] * nuj[z], abs=1e-15)
                assert chain.scaled_reward[x * 4 + z] == pytest.approx(rbar[x] @ pij[z], abs=1e-15)

    def test_agent_count_mismatch(self, rand3):
        model, pol = rand3
        single = JointPolicy(pol.pi[:1], pol.lam[:1], pol.nu[:1])
        with pytest.raises(ModelError):
            build_joint_chain(model, single)


class TestConditionedKernels:
    def test_action_conditioned_contracts_to_kernel(self, rand3):
        model, pol = rand3
        ac = action_conditioned_kernel(model, pol)
        P = np.einsum("xzawv,za->wvxz", ac, pol.joint_pi()).reshape(12, 12)
        np.testing.assert_allclose(P, build_joint_chain(model, pol).kernel, atol=1e-12)

    def test_observation_conditioned_contracts_to_kernel(self, rand3):
        model, pol = rand3
        oc = observation_conditioned_kernel(model, pol)
        P = np.einsum("xzwy,zyv->wvxz", oc, pol.joint_lambda()).reshape(12, 12)
        np.testing.assert_allclose(P, build_joint_chain(model, pol).kernel, atol=1e-12)

    def test_single_observation(self):
        model = random_model(2, n_states=3, action_counts=(2,), observation_counts=(1,))
        pol = init_policy(model, 2, seed=3)
        ac = action_conditioned_kernel(model, pol)
        expect = np.einsum("zv,xaw->xzawv", pol.lam[0][:, 0, :], model.transition)
        np.testing.assert_allclose(ac, expect, atol=1e-15)

    def test_identity_memory_is_block_diagonal(self, rand3):
        model, pol = rand3
        ident = tuple(np.repeat(np.eye(2)[:, None, :], 2, axis=1) for _ in range(2))
        ac = action_conditioned_kernel(model, JointPolicy(pol.pi, ident, pol.nu))
        for z in range(4):
            for v in range(4):
                if z != v:
                    assert (ac[:, z, :, :, v] == 0).all()

    def test_single_action(self):
        model = random_model(2, n_states=3, action_counts=(1,), observation_counts=(3,))
        oc = observation_conditioned_kernel(model, init_policy(model, 2, seed=3))
        expect = np.einsum("wy,xw->xwy", model.observation_fn[:, 0, :], model.transition[:, 0, :])
        for z in range(2):
            np.testing.assert_allclose(oc[:, z], expect, atol=1e-15)

    def test_observation_marginal_is_stochastic(self, rand3):
        model, pol = rand3
        oc = observation_conditioned_kernel(model, pol)
        np.testing.assert_allclose(oc.sum(axis=(2, 3)), 1.0, atol=1e-12)
