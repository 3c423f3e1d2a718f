"""Closed-form M-step: the next controller from the current one and its (F, V) tables."""
from __future__ import annotations

import numpy as np

from .kernel import action_conditioned_kernel, observation_conditioned_kernel, scale_reward
from .model import DecPomdpModel, JointPolicy

#: Rows whose total weight falls below this are reset to uniform.
ZERO_ROW = 1e-300


def _normalize_rows(w):
    w = np.asarray(w, dtype=np.float64)
    s = w.sum(axis=-1, keepdims=True)
    dead = s < ZERO_ROW
    out = np.where(dead, 1.0 / w.shape[-1], w / np.where(dead, 1.0, s))
    return out


def _agent_marginal(W, axis_dims, agent):
    """Sum a joint table down to one agent's components.

    ``axis_dims[k]`` lists the per-agent sizes that were flattened into axis
    ``k`` of ``W``.
    """
    n_agents = len(axis_dims[0])
    split = W.reshape([d for dims in axis_dims for d in dims])
    drop = tuple(
        k * n_agents + j for k in range(len(axis_dims)) for j in range(n_agents) if j != agent
    )
    return split.sum(axis=drop)


def _tables(model, F, V, n_memory):
    shape = (model.n_states, n_memory)
    return np.asarray(F, dtype=np.float64).reshape(shape), np.asarray(V, dtype=np.float64).reshape(shape)


def update_pi(model: DecPomdpModel, policy: JointPolicy, F, V) -> tuple:
    Ft, Vt = _tables(model, F, V, policy.n_joint_memory)
    rbar, _ = scale_reward(model)
    ac = action_conditioned_kernel(model, policy)
    future = np.einsum("xzawv,wv->xza", ac, Vt, optimize=True)
    inner = rbar[:, None, :] + model.discount * future
    W = policy.joint_pi() * np.einsum("xz,xza->za", Ft, inner, optimize=True)
    dims = [policy.memory_sizes, model.action_counts]
    return tuple(_normalize_rows(_agent_marginal(W, dims, i)) for i in range(model.num_agents))


def update_lambda(model: DecPomdpModel, policy: JointPolicy, F, V) -> tuple:
    Ft, Vt = _tables(model, F, V, policy.n_joint_memory)
    oc = observation_conditioned_kernel(model, policy)
    W = policy.joint_lambda() * np.einsum("xzwy,xz,wv->zyv", oc, Ft, Vt, optimize=True)
    dims = [policy.memory_sizes, model.observation_counts, policy.memory_sizes]
    return tuple(_normalize_rows(_agent_marginal(W, dims, i)) for i in range(model.num_agents))


def update_nu(model: DecPomdpModel, policy: JointPolicy, V) -> tuple:
    Vt = np.asarray(V, dtype=np.float64).reshape(model.n_states, policy.n_joint_memory)
    W = policy.joint_nu() * (model.initial_state @ Vt)
    dims = [policy.memory_sizes]
    return tuple(_normalize_rows(_agent_marginal(W, dims, i)) for i in range(model.num_agents))


def m_step(model: DecPomdpModel, policy: JointPolicy, F, V) -> JointPolicy:
    """All three updates from the same (F, V)."""
    return JointPolicy(
        pi=update_pi(model, policy, F, V),
        lam=update_lambda(model, policy, F, V),
        nu=update_nu(model, policy, V),
    )
