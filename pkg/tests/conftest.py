import numpy as np
import pytest

from decem.model import DecPomdpModel, init_policy, random_model


def tiny_model(n_states=1, n_actions=1, n_obs=1, reward=0.0, gamma=0.9, p_stay=1.0):
    """Single-agent model whose transition keeps the state with probability ``p_stay``."""
    T = np.zeros((n_states, n_actions, n_states))
    for x in range(n_states):
        T[x, :, x] = p_stay
        if n_states > 1:
            T[x, :, (x + 1) % n_states] += 1.0 - p_stay
    return DecPomdpModel(
        states=[f"s{i}" for i in range(n_states)],
        actions=[[f"a{i}" for i in range(n_actions)]],
        observations=[[f"o{i}" for i in range(n_obs)]],
        initial_state=np.eye(n_states)[0],
        transition=T,
        observation_fn=np.full((n_states, n_actions, n_obs), 1.0 / n_obs),
        reward=np.broadcast_to(np.asarray(reward, dtype=float), (n_states, n_actions)),
        discount=gamma,
    )


@pytest.fixture
def rand3():
    """3 states, 2 agents with 2 actions / 2 observations each, seeded 2-memory policy."""
    model = random_model(7, n_states=3, discount=0.8)
    return model, init_policy(model, 2, seed=11)


@pytest.fixture
def rand2():
    model = random_model(3, n_states=2, discount=0.9)
    return model, init_policy(model, 2, seed=5)


def make_chain(P, p0, rbar, gamma):
    """Joint chain over a bare Markov chain (one memory state)."""
    from decem.kernel import JointChain

    P = np.asarray(P, dtype=float)
    return JointChain(
        kernel=P,
        initial=np.asarray(p0, dtype=float),
        scaled_reward=np.asarray(rbar, dtype=float),
        gamma=gamma,
        n_states=P.shape[0],
        n_memory=1,
    )


def random_chain(rng, n, gamma):
    P = rng.random((n, n)) ** 3
    P /= P.sum(axis=0, keepdims=True)
    p0 = rng.random(n)
    return make_chain(P, p0 / p0.sum(), rng.random(n), gamma)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
