"""DEC-POMDP problem instances and finite-state-controller joint policies.

Joint quantities (joint action, joint observation, joint memory) are flattened
row-major over agents: agent 0 is the most significant digit.  The same layout
is used by :mod:`decem.kernel` for the joint space ``X x Z``, where the flat
index of ``(x, z)`` is ``x * |Z| + z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ModelError

#: Absolute tolerance on the row sums of every probability table.
STOCHASTIC_TOL = 1e-9


def _frozen(a, dtype=np.float64):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def joint_table(tables: Sequence[np.ndarray]) -> np.ndarray:
    """Outer product of per-agent tables of equal rank, axes flattened row-major.

    For agent tables ``t_i[u_i, v_i, ...]`` returns ``J[u, v, ...]`` with
    ``u = ravel(u_0, ..., u_{N-1})`` and ``J = prod_i t_i``.
    """
    out = np.asarray(tables[0], dtype=np.float64)
    for t in tables[1:]:
        t = np.asarray(t, dtype=np.float64)
        if t.ndim != out.ndim:
            raise ModelError("per-agent tables must share the same rank")
        left = out.reshape([d for s in out.shape for d in (s, 1)])
        right = t.reshape([d for s in t.shape for d in (1, s)])
        out = (left * right).reshape([a * b for a, b in zip(out.shape, t.shape)])
    return out


@dataclass(frozen=True, eq=False)
class DecPomdpModel:
    """Finite DEC-POMDP with reward ``r(x, a)``.

    Array layouts (``A``/``Y`` are joint indices)::

        initial_state   (|X|,)
        transition      (|X|, |A|, |X|)   p(x' | x, a)
        observation_fn  (|X|, |A|, |Y|)   p(y | x', a_prev)
        reward          (|X|, |A|)
    """

    states: tuple
    actions: tuple
    observations: tuple
    initial_state: np.ndarray
    transition: np.ndarray
    observation_fn: np.ndarray
    reward: np.ndarray
    discount: float
    name: str = field(default="", compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "states", tuple(str(s) for s in self.states))
        set_(self, "actions", tuple(tuple(str(a) for a in ag) for ag in self.actions))
        set_(self, "observations", tuple(tuple(str(o) for o in ag) for ag in self.observations))
        for name in ("initial_state", "transition", "observation_fn", "reward"):
            set_(self, name, _frozen(getattr(self, name)))
        set_(self, "discount", float(self.discount))

    @property
    def num_agents(self) -> int:
        return len(self.actions)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def action_counts(self) -> tuple:
        return tuple(len(a) for a in self.actions)

    @property
    def observation_counts(self) -> tuple:
        return tuple(len(o) for o in self.observations)

    @property
    def n_joint_actions(self) -> int:
        return int(np.prod(self.action_counts))

    @property
    def n_joint_observations(self) -> int:
        return int(np.prod(self.observation_counts))

    def with_discount(self, gamma: float) -> "DecPomdpModel":
        return replace(self, discount=gamma)


@dataclass(frozen=True, eq=False)
class JointPolicy:
    """Per-agent finite-state controllers.

    ``pi[i]`` has shape ``(|Z^i|, |A^i|)``, ``lam[i]`` has shape
    ``(|Z^i|, |Y^i|, |Z^i|)`` indexed ``(z, y', z')`` and ``nu[i]`` has shape
    ``(|Z^i|,)``.
    """

    pi: tuple
    lam: tuple
    nu: tuple

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(_frozen(p) for p in self.pi))
        object.__setattr__(self, "lam", tuple(_frozen(l) for l in self.lam))
        object.__setattr__(self, "nu", tuple(_frozen(n) for n in self.nu))

    @property
    def num_agents(self) -> int:
        return len(self.pi)

    @property
    def memory_sizes(self) -> tuple:
        return tuple(n.shape[0] for n in self.nu)

    @property
    def n_joint_memory(self) -> int:
        return int(np.prod(self.memory_sizes))

    def joint_pi(self) -> np.ndarray:
        """``pi(a | z)`` as a ``(|Z|, |A|)`` table."""
        return joint_table(self.pi)

    def joint_lambda(self) -> np.ndarray:
        """``lambda(z' | z, y')`` as a ``(|Z|, |Y|, |Z|)`` table."""
        return joint_table(self.lam)

    def joint_nu(self) -> np.ndarray:
        return joint_table(self.nu)

    def distance(self, other: "JointPolicy") -> float:
        """Sup-norm distance over every policy parameter."""
        d = 0.0
        for mine, theirs in zip(self.pi + self.lam + self.nu, other.pi + other.lam + other.nu):
            d = max(d, float(np.max(np.abs(mine - theirs))))
        return d


def _check_rows(table, label, axes_names, violations, tol=STOCHASTIC_TOL):
    """Append violations for every last-axis row of ``table`` that is not a distribution."""
    table = np.asarray(table, dtype=np.float64)
    if not np.all(np.isfinite(table)):
        for idx in zip(*np.nonzero(~np.isfinite(table))):
            violations.append(f"{label} entry {_coords(axes_names + ('col',), idx)} is not finite")
        return
    sums = table.sum(axis=-1)
    neg = (table < 0).any(axis=-1)
    for idx in np.ndindex(sums.shape):
        where = _coords(axes_names, idx)
        if neg[idx]:
            violations.append(f"{label} row {where} has negative entries")
        if abs(sums[idx] - 1.0) > tol:
            violations.append(f"{label} row {where} sums to {sums[idx]!r}, expected 1")


def _coords(names, idx):
    return "(" + ", ".join(f"{n}={int(i)}" for n, i in zip(names, idx)) + ")"


def validate_model(model: DecPomdpModel) -> list:
    """Return a list of invariant violations; an empty list means the model is valid."""
    out = []
    nx, na, ny = model.n_states, model.n_joint_actions, model.n_joint_observations
    if model.num_agents < 1:
        out.append("model has no agents")
    if model.observation_counts and len(model.observation_counts) != model.num_agents:
        out.append("observation sets do not match the number of agents")
    if any(c < 1 for c in model.action_counts + model.observation_counts) or nx < 1:
        out.append("every state, action and observation set must be non-empty")
    expected = {
        "initial_state": (nx,),
        "transition": (nx, na, nx),
        "observation_fn": (nx, na, ny),
        "reward": (nx, na),
    }
    shapes_ok = True
    for name, shape in expected.items():
        got = getattr(model, name).shape
        if got != shape:
            out.append(f"{name} has shape {got}, expected {shape}")
            shapes_ok = False
    g = model.discount
    if not (np.isfinite(g) and 0.0 < g < 1.0):
        out.append(f"discount out of (0,1): {g!r}")
    if not shapes_ok:
        return out
    p0 = model.initial_state
    if not np.all(np.isfinite(p0)) or (p0 < 0).any() or abs(p0.sum() - 1.0) > STOCHASTIC_TOL:
        out.append(f"initial_state is not a distribution (sum {p0.sum()!r})")
    _check_rows(model.transition, "transition", ("x", "a"), out)
    _check_rows(model.observation_fn, "observation", ("x'", "a"), out)
    if not np.all(np.isfinite(model.reward)):
        out.append("reward has non-finite entries")
    return out


def validate_policy(policy: JointPolicy, model: DecPomdpModel | None = None) -> list:
    """Invariant violations for a policy, optionally checked against a model's spaces."""
    out = []
    if not (len(policy.pi) == len(policy.lam) == len(policy.nu)):
        return ["pi, lambda and nu disagree on the number of agents"]
    for i, (p, l, n) in enumerate(zip(policy.pi, policy.lam, policy.nu)):
        zi = n.shape[0]
        if zi < 1:
            out.append(f"agent {i}: empty memory set")
            continue
        if p.ndim != 2 or p.shape[0] != zi:
            out.append(f"agent {i}: pi has shape {p.shape}, expected ({zi}, |A|)")
        if l.ndim != 3 or l.shape[0] != zi or l.shape[2] != zi:
            out.append(f"agent {i}: lambda has shape {l.shape}, expected ({zi}, |Y|, {zi})")
        if model is not None and i < model.num_agents:
            if p.ndim == 2 and p.shape[1] != model.action_counts[i]:
                out.append(f"agent {i}: pi has {p.shape[1]} actions, model has {model.action_counts[i]}")
            if l.ndim == 3 and l.shape[1] != model.observation_counts[i]:
                out.append(
                    f"agent {i}: lambda has {l.shape[1]} observations, "
                    f"model has {model.observation_counts[i]}"
                )
        _check_rows(p, f"agent {i} pi", ("z",), out)
        _check_rows(l, f"agent {i} lambda", ("z", "y"), out)
        _check_rows(n, f"agent {i} nu", (), out)
    if model is not None and policy.num_agents != model.num_agents:
        out.append(f"policy has {policy.num_agents} agents, model has {model.num_agents}")
    return out


def _memory_sizes(model, memory_sizes):
    if np.isscalar(memory_sizes):
        memory_sizes = [int(memory_sizes)] * model.num_agents
    memory_sizes = [int(m) for m in memory_sizes]
    if len(memory_sizes) != model.num_agents:
        raise ModelError(f"need {model.num_agents} memory sizes, got {len(memory_sizes)}")
    if any(m < 1 for m in memory_sizes):
        raise ModelError(f"memory sizes must be >= 1, got {memory_sizes}")
    return memory_sizes


def init_policy(model: DecPomdpModel, memory_sizes=2, seed: int = 0, scheme: str = "random") -> JointPolicy:
    """Initial controller for every agent.

    ``uniform`` gives exactly uniform rows.  ``random`` normalizes independent
    U(0, 1) draws per row; the draw order (agent by agent: nu, pi, lambda) is
    fixed so a seed fully determines the policy.
    """
    sizes = _memory_sizes(model, memory_sizes)
    if scheme not in ("uniform", "random"):
        raise ModelError(f"unknown initialization scheme {scheme!r}")
    rng = np.random.default_rng(seed)

    def rows(shape):
        if scheme == "uniform":
            w = np.ones(shape)
        else:
            # 1 - U[0,1) lies in (0, 1]; keeps every entry strictly positive
            w = 1.0 - rng.random(shape)
        return w / w.sum(axis=-1, keepdims=True)

    pi, lam, nu = [], [], []
    for i, zi in enumerate(sizes):
        nu.append(rows((zi,)))
        pi.append(rows((zi, model.action_counts[i])))
        lam.append(rows((zi, model.observation_counts[i], zi)))
    return JointPolicy(tuple(pi), tuple(lam), tuple(nu))


def reward_bounds(model: DecPomdpModel) -> tuple:
    return float(model.reward.min()), float(model.reward.max())


def random_model(
    seed,
    n_states: int = 3,
    action_counts=(2, 2),
    observation_counts=(2, 2),
    discount: float = 0.9,
    reward_scale: float = 1.0,
) -> DecPomdpModel:
    """Dense random instance; every probability row is a normalized U(0,1) draw."""
    rng = np.random.default_rng(seed)
    na = int(np.prod(action_counts))
    ny = int(np.prod(observation_counts))

    def rows(shape):
        w = 1.0 - rng.random(shape)
        return w / w.sum(axis=-1, keepdims=True)

    return DecPomdpModel(
        states=[f"s{i}" for i in range(n_states)],
        actions=[[f"a{j}" for j in range(c)] for c in action_counts],
        observations=[[f"o{j}" for j in range(c)] for c in observation_counts],
        initial_state=rows((n_states,)),
        transition=rows((n_states, na, n_states)),
        observation_fn=rows((n_states, na, ny)),
        reward=reward_scale * rng.standard_normal((n_states, na)),
        discount=discount,
        name=f"random-{seed}",
    )
