import numpy as np
import pytest

from decem.builtins import load_builtin
from decem.errors import ModelError
from decem.estep import bellman_solve
from decem.kernel import build_joint_chain
from decem.model import init_policy, random_model
from decem.oracle import enumerate_return
from decem.solver import SolverConfig, evaluate, expected_return, run

from conftest import tiny_model


def test_constant_reward_return():
    m = tiny_model(n_states=2, n_actions=2, reward=5.0, p_stay=0.5)
    assert evaluate(m, init_policy(m, 2, seed=0)) == pytest.approx(50.0, abs=1e-10)


def test_stay_put_return():
    m = tiny_model(n_states=2, n_actions=1, reward=[[0.0], [1.0]], p_stay=1.0)
    assert evaluate(m, init_policy(m, 1)) == 0.0


def test_return_matches_enumeration():
    model = random_model(2, n_states=3, discount=0.8)
    pol = init_policy(model, 2, seed=2)
    bound = 0.8 ** 61 * np.abs(model.reward).max() / 0.2
    assert abs(evaluate(model, pol) - enumerate_return(model, pol, 60)) <= bound


def test_two_return_forms_agree(rand3):
    model, pol = rand3
    chain = build_joint_chain(model, pol)
    res = bellman_solve(chain)
    expected_return(chain, model, pol, res.F, res.V)  # raises on disagreement


def test_invalid_model_rejected():
    with pytest.raises(ModelError):
        run(tiny_model(gamma=1.0), SolverConfig(algorithm="bem"))


def test_bad_config():
    with pytest.raises(ValueError):
        SolverConfig(algorithm="sgd")
    with pytest.raises(ValueError):
        SolverConfig(epsilon=0)


@pytest.mark.parametrize("algo", ["em", "bem", "mbem"])
def test_degenerate_converges_immediately(algo):
    m = tiny_model(n_states=2, n_actions=2, n_obs=2, reward=5.0, gamma=0.9, p_stay=0.5)
    _, traces = run(m, SolverConfig(algorithm=algo, max_iters=20, epsilon=1e-8))
    assert len(traces) == 2
    for tr in traces:
        assert tr.J == pytest.approx(50.0, abs=1e-6)


def test_engines_trace_together():
    model = random_model(11, n_states=3, discount=0.95)
    js = {}
    for algo in ("em", "bem", "mbem"):
        cfg = SolverConfig(algorithm=algo, epsilon=1e-6, max_iters=30, j_tol=0, policy_tol=0, seed=4)
        _, traces = run(model, cfg)
        js[algo] = np.array([t.J for t in traces])
    for a in js:
        np.testing.assert_allclose(js[a], js["bem"], atol=1e-5 * (1 + np.abs(js["bem"]).max()))


@pytest.mark.parametrize("seed", range(5))
def test_monotone(seed):
    model = random_model(seed, n_states=3, discount=0.9)
    cfg = SolverConfig(algorithm="bem", max_iters=40, j_tol=0, policy_tol=0, seed=seed)
    _, traces = run(model, cfg)
    assert np.diff([t.J for t in traces]).min() >= -1e-9


def test_deterministic_runs():
    model = load_builtin("toy2agent")
    for algo in ("em", "bem", "mbem"):
        cfg = SolverConfig(algorithm=algo, max_iters=5, seed=3)
        p1, t1 = run(model, cfg)
        p2, t2 = run(model, cfg)
        assert p1.distance(p2) == 0.0
        assert [t.J for t in t1] == [t.J for t in t2]
        assert [t.inner_iters for t in t1] == [t.inner_iters for t in t2]


def test_trace_fields():
    model = load_builtin("chain2")
    _, traces = run(model, SolverConfig(algorithm="mbem", max_iters=10, j_tol=0, policy_tol=0))
    assert [t.iteration for t in traces] == list(range(10))
    assert traces[0].inner_iters <= 43
    elapsed = [t.elapsed_ms for t in traces]
    assert elapsed == sorted(elapsed)
    assert all(t.algo == "mbem" for t in traces)


def test_explicit_initial_policy(rand3):
    model, pol = rand3
    _, traces = run(model, SolverConfig(algorithm="bem", max_iters=1), policy=pol)
    assert traces[0].J == pytest.approx(evaluate(model, pol), abs=1e-10)


def test_exact_j_matches_evaluate():
    model = load_builtin("chain2")
    pol = init_policy(model, 2, seed=0)
    _, traces = run(model, SolverConfig(algorithm="em", max_iters=1, exact_j=True), policy=pol)
    assert traces[0].J == pytest.approx(evaluate(model, pol), abs=1e-10)
