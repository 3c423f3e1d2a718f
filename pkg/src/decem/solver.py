"""Outer EM loop shared by the EM, BEM and MBEM variants."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericError
from .estep import EstepResult, bellman_solve, forward_backward, mbem_estep, tmax_bound
from .kernel import JointChain, build_joint_chain
from .model import DecPomdpModel, JointPolicy, init_policy, reward_bounds, validate_model
from .mstep import m_step

log = logging.getLogger(__name__)

ALGORITHMS = ("em", "bem", "mbem")


@dataclass
class SolverConfig:
    algorithm: str = "mbem"
    epsilon: float = 0.1
    max_iters: int = 100
    j_tol: float = 1e-8
    policy_tol: float = 1e-8
    memory: object = 2
    seed: int = 0
    init: str = "random"
    l_cap_factor: int = 4
    # measure J with an exact solve instead of the engine's own F (not timed)
    exact_j: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    J: float
    inner_iters: int
    elapsed_ms: float
    algo: str
    estep_ms: float = 0.0
    mstep_ms: float = 0.0


def expected_return(chain: JointChain, model: DecPomdpModel, policy: JointPolicy, F, V=None) -> float:
    """Expected discounted return in reward units.

    Contracts the unscaled reward with the frequency function:
    ``J = sum_{x,z} F(x,z) sum_a pi(a|z) r(x,a)``.  When ``V`` is given the
    likelihood form ``(r_max - r_min) <p0, V> + r_min / (1 - gamma)`` is
    evaluated as well and a ``NumericError`` is raised if the two disagree by
    more than 1e-6 relative.
    """
    r_z = model.reward @ policy.joint_pi().T
    J = float(np.dot(np.asarray(F).ravel(), r_z.ravel()))
    if V is not None:
        J2 = likelihood_return(chain, model, V)
        if abs(J - J2) > 1e-6 * max(1.0, abs(J)):
            raise NumericError(f"return mismatch: F-contraction {J!r} vs likelihood form {J2!r}")
    return J


def likelihood_return(chain: JointChain, model: DecPomdpModel, V) -> float:
    r_min, r_max = reward_bounds(model)
    lik = float(np.dot(chain.initial, np.asarray(V).ravel()))
    return (r_max - r_min) * lik + r_min / (1.0 - chain.gamma)


def run_estep(chain: JointChain, config: SolverConfig, t_max=None, warm=None) -> EstepResult:
    algo = config.algorithm
    if algo == "bem":
        return bellman_solve(chain)
    if t_max is None:
        t_max = tmax_bound(chain.gamma, config.epsilon)
    if algo == "em":
        return forward_backward(chain, t_max)
    f0, v0 = (None, None) if warm is None else warm
    return mbem_estep(chain, config.epsilon, f0, v0, l_cap=config.l_cap_factor * t_max)


def run(model: DecPomdpModel, config: SolverConfig, policy: JointPolicy | None = None):
    """Run the configured algorithm; returns ``(final_policy, traces)``.

    One trace record per outer iteration ``k`` holds ``J(theta_k)``, the inner
    iteration count of that E-step and the cumulative wall time.  The loop
    stops once both ``|J_k - J_{k-1}|`` and the policy change fall below their
    tolerances, or after ``max_iters`` iterations.
    """
    problems = validate_model(model)
    if problems:
        raise ModelError("invalid model: " + "; ".join(problems[:5]))
    if policy is None:
        policy = init_policy(model, config.memory, config.seed, config.init)
    t_max = None if config.algorithm == "bem" else tmax_bound(model.discount, config.epsilon)

    traces = []
    warm = None
    prev_J = None
    elapsed = 0.0
    for k in range(config.max_iters):
        t0 = time.perf_counter()
        chain = build_joint_chain(model, policy)
        est = run_estep(chain, config, t_max=t_max, warm=warm)
        t1 = time.perf_counter()
        new_policy = m_step(model, policy, est.F, est.V)
        t2 = time.perf_counter()
        if config.algorithm == "mbem":
            warm = (est.F, est.V)
        elapsed += (t2 - t0) * 1e3

        F_for_J = bellman_solve(chain).F if config.exact_j and config.algorithm != "bem" else est.F
        J = expected_return(chain, model, policy, F_for_J)
        if not np.isfinite(J):
            raise NumericError(f"non-finite expected return at iteration {k}")
        traces.append(
            IterationTrace(k, J, est.inner_iters, elapsed, config.algorithm, (t1 - t0) * 1e3, (t2 - t1) * 1e3)
        )
        log.debug("%s k=%d J=%.10g inner=%d", config.algorithm, k, J, est.inner_iters)

        change = new_policy.distance(policy)
        policy = new_policy
        if prev_J is not None and abs(J - prev_J) < config.j_tol and change < config.policy_tol:
            break
        prev_J = J
    return policy, traces


def evaluate(model: DecPomdpModel, policy: JointPolicy) -> float:
    """Exact expected return of a policy."""
    chain = build_joint_chain(model, policy)
    est = bellman_solve(chain)
    return expected_return(chain, model, policy, est.F, est.V)
