"""The Markov chain a controller induces on the joint space ``X x Z``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ModelError
from .model import DecPomdpModel, JointPolicy, reward_bounds


@dataclass(frozen=True, eq=False)
class JointChain:
    """Induced chain with flat index ``x * n_memory + z``.

    ``kernel[i, j]`` is the probability of moving from source ``j`` to
    destination ``i`` (columns sum to one).
    """

    kernel: np.ndarray
    initial: np.ndarray
    scaled_reward: np.ndarray
    gamma: float
    n_states: int
    n_memory: int
    reward_degenerate: bool = False

    @property
    def size(self) -> int:
        return self.n_states * self.n_memory

    def table(self, flat: np.ndarray) -> np.ndarray:
        """View a flat joint-space vector as an ``(|X|, |Z|)`` table."""
        return np.asarray(flat).reshape(self.n_states, self.n_memory)


def scale_reward(model: DecPomdpModel):
    """Affine map of the reward table onto [0, 1].

    Returns ``(rbar, degenerate)``.  A constant reward has no informative
    rescaling; it maps to all zeros with ``degenerate=True``.
    """
    r_min, r_max = reward_bounds(model)
    if r_max == r_min:
        return np.zeros_like(model.reward), True
    return (model.reward - r_min) / (r_max - r_min), False


def _check_spaces(model: DecPomdpModel, policy: JointPolicy):
    if policy.num_agents != model.num_agents:
        raise ModelError(f"policy has {policy.num_agents} agents, model has {model.num_agents}")
    for i in range(model.num_agents):
        if policy.pi[i].shape[1] != model.action_counts[i]:
            raise ModelError(
                f"agent {i}: policy has {policy.pi[i].shape[1]} actions, model has {model.action_counts[i]}"
            )
        if policy.lam[i].shape[1] != model.observation_counts[i]:
            raise ModelError(
                f"agent {i}: lambda indexes {policy.lam[i].shape[1]} observations, "
                f"model has {model.observation_counts[i]}"
            )


def build_joint_chain(model: DecPomdpModel, policy: JointPolicy) -> JointChain:
    _check_spaces(model, policy)
    pij = policy.joint_pi()
    lamj = policy.joint_lambda()
    nuj = policy.joint_nu()
    P = _kernels.build_kernel(model.transition, model.observation_fn, pij, lamj)
    rbar_xa, degenerate = scale_reward(model)
    rbar = (rbar_xa @ pij.T).ravel()
    p0 = np.outer(model.initial_state, nuj).ravel()
    for arr in (P, p0, rbar):
        arr.setflags(write=False)
    return JointChain(
        kernel=P,
        initial=p0,
        scaled_reward=rbar,
        gamma=model.discount,
        n_states=model.n_states,
        n_memory=pij.shape[0],
        reward_degenerate=degenerate,
    )


def action_conditioned_kernel(model: DecPomdpModel, policy: JointPolicy) -> np.ndarray:
    """``p(x', z' | x, z, a)`` with axes ``(x, z, a, x', z')``."""
    _check_spaces(model, policy)
    lamj = policy.joint_lambda()
    return np.einsum("zyv,way,xaw->xzawv", lamj, model.observation_fn, model.transition, optimize=True)


def observation_conditioned_kernel(model: DecPomdpModel, policy: JointPolicy) -> np.ndarray:
    """``p(x', y' | x, z)`` with axes ``(x, z, x', y')``."""
    _check_spaces(model, policy)
    pij = policy.joint_pi()
    return np.einsum("way,xaw,za->xzwy", model.observation_fn, model.transition, pij, optimize=True)
