"""Brute-force reference evaluators for tiny instances.

Nothing here reuses the kernel construction or the E-step code: the
generative model is walked with plain loops over per-agent tuples, so a bug
in the vectorized path cannot hide in a shared helper.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

from .errors import ResourceError


def _flat(digits, sizes):
    idx = 0
    for d, s in zip(digits, sizes):
        idx = idx * s + d
    return idx


def enumerate_alpha_beta(chain, t: int, max_paths: int = 2_000_000):
    """``alpha_t`` and ``beta_t`` by summing over every joint-space path of length ``t``.

    ``alpha_t[i]`` is the probability of being at ``i`` after ``t`` steps;
    ``beta_t[i]`` the expected scaled reward ``t`` steps after starting at ``i``.
    """
    n = chain.size
    if t < 0:
        raise ValueError("t must be >= 0")
    if n ** (t + 1) > max_paths:
        raise ResourceError(f"{n}^{t + 1} paths exceed the enumeration limit {max_paths}")
    P = [[float(chain.kernel[i, j]) for j in range(n)] for i in range(n)]
    p0 = [float(v) for v in chain.initial]
    r = [float(v) for v in chain.scaled_reward]
    alpha = [0.0] * n
    beta = [0.0] * n
    for path in itertools.product(range(n), repeat=t + 1):
        w = 1.0
        for s in range(t):
            w *= P[path[s + 1]][path[s]]
            if w == 0.0:
                break
        if w == 0.0:
            continue
        alpha[path[-1]] += p0[path[0]] * w
        beta[path[0]] += w * r[path[-1]]
    return np.array(alpha), np.array(beta)


def enumerate_return(model, policy, horizon: int, max_ops: float = 5e7) -> float:
    """Expected return truncated after step ``horizon`` (steps 0..horizon inclusive).

    Sums the full generative process state -> observation -> memory -> action
    over every joint trajectory.  Trajectories are merged by their current
    ``(x, z)`` after each step, which is exact (the process is Markov in that
    pair) and keeps the cost linear in the horizon.
    """
    N = model.num_agents
    A_sizes = model.action_counts
    Y_sizes = model.observation_counts
    Z_sizes = tuple(len(n) for n in policy.nu)
    nx = model.n_states
    joint_a = list(itertools.product(*[range(s) for s in A_sizes]))
    joint_y = list(itertools.product(*[range(s) for s in Y_sizes]))
    joint_z = list(itertools.product(*[range(s) for s in Z_sizes]))
    ops = (horizon + 1) * (nx * len(joint_z)) * len(joint_a) * nx * len(joint_y) * len(joint_z)
    if ops > max_ops:
        raise ResourceError(f"enumeration needs ~{ops:.2e} operations, limit {max_ops:.0e}")

    pi = [p.tolist() for p in policy.pi]
    lam = [l.tolist() for l in policy.lam]
    nu = [n.tolist() for n in policy.nu]
    T = model.transition.tolist()
    O = model.observation_fn.tolist()
    R = model.reward.tolist()
    gamma = model.discount

    dist = {}
    for x in range(nx):
        for z in joint_z:
            m = model.initial_state[x] * math.prod(nu[i][z[i]] for i in range(N))
            if m:
                dist[(x, z)] = float(m)

    total = 0.0
    disc = 1.0
    for t in range(horizon + 1):
        nxt = defaultdict(float)
        for (x, z), m in dist.items():
            for a in joint_a:
                pa = math.prod(pi[i][z[i]][a[i]] for i in range(N))
                if pa == 0.0:
                    continue
                ai = _flat(a, A_sizes)
                total += disc * m * pa * R[x][ai]
                if t == horizon:
                    continue
                for x2 in range(nx):
                    pt = T[x][ai][x2]
                    if pt == 0.0:
                        continue
                    for y in joint_y:
                        po = O[x2][ai][_flat(y, Y_sizes)]
                        if po == 0.0:
                            continue
                        w = m * pa * pt * po
                        for z2 in joint_z:
                            pl = math.prod(lam[i][z[i]][y[i]][z2[i]] for i in range(N))
                            if pl:
                                nxt[(x2, z2)] += w * pl
        dist = nxt
        disc *= gamma
    return total


def enumerate_return_paths(model, policy, horizon: int, max_paths: int = 2_000_000) -> float:
    """Same quantity as :func:`enumerate_return`, by literal trajectory enumeration.

    Every sequence ``(x_0, z_0, a_0, x_1, y_1, z_1, a_1, ...)`` is generated and
    weighted individually.  Only usable for very small models and horizons.
    """
    N = model.num_agents
    A_sizes = model.action_counts
    Y_sizes = model.observation_counts
    Z_sizes = tuple(len(n) for n in policy.nu)
    nx = model.n_states
    joint_a = list(itertools.product(*[range(s) for s in A_sizes]))
    joint_y = list(itertools.product(*[range(s) for s in Y_sizes]))
    joint_z = list(itertools.product(*[range(s) for s in Z_sizes]))
    first = nx * len(joint_z) * len(joint_a)
    step = nx * len(joint_y) * len(joint_z) * len(joint_a)
    if first * step ** horizon > max_paths:
        raise ResourceError("too many trajectories to enumerate")

    gamma = model.discount
    total = 0.0

    def walk(t, x, z, a, weight, acc):
        nonlocal total
        ai = _flat(a, A_sizes)
        acc = acc + gamma ** t * model.reward[x, ai]
        if t == horizon:
            total += weight * acc
            return
        for x2 in range(nx):
            pt = model.transition[x, ai, x2]
            for y in joint_y:
                po = model.observation_fn[x2, ai, _flat(y, Y_sizes)]
                for z2 in joint_z:
                    pl = math.prod(policy.lam[i][z[i], y[i], z2[i]] for i in range(N))
                    for a2 in joint_a:
                        pa = math.prod(policy.pi[i][z2[i], a2[i]] for i in range(N))
                        w = weight * pt * po * pl * pa
                        if w:
                            walk(t + 1, x2, z2, a2, w, acc)

    for x in range(nx):
        for z in joint_z:
            pz = math.prod(policy.nu[i][z[i]] for i in range(N))
            for a in joint_a:
                pa = math.prod(policy.pi[i][z[i], a[i]] for i in range(N))
                w = model.initial_state[x] * pz * pa
                if w:
                    walk(0, x, z, a, w, 0.0)
    return float(total)


def _sample_rows(rng, probs):
    """One categorical draw per row of ``probs``."""
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[0])[:, None]
    return np.minimum((u >= cdf).sum(axis=-1), probs.shape[-1] - 1)


def monte_carlo_return(model, policy, episodes: int, horizon: int, seed: int = 0):
    """Sample mean and standard error of the return truncated after step ``horizon``.

    All episodes are simulated in lockstep; the generator is seeded once.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    n = episodes
    N = model.num_agents
    A_sizes = model.action_counts
    Y_sizes = model.observation_counts
    x = _sample_rows(rng, np.broadcast_to(model.initial_state, (n, model.n_states)))
    z = [_sample_rows(rng, np.broadcast_to(policy.nu[i], (n, len(policy.nu[i])))) for i in range(N)]
    ret = np.zeros(n)
    disc = 1.0
    for t in range(horizon + 1):
        a = [_sample_rows(rng, policy.pi[i][z[i]]) for i in range(N)]
        ai = np.ravel_multi_index(a, A_sizes)
        ret += disc * model.reward[x, ai]
        if t == horizon:
            break
        x = _sample_rows(rng, model.transition[x, ai])
        yj = _sample_rows(rng, model.observation_fn[x, ai])
        y = np.unravel_index(yj, Y_sizes)
        z = [_sample_rows(rng, policy.lam[i][z[i], y[i]]) for i in range(N)]
        disc *= model.discount
    mean = float(ret.mean())
    se = float(ret.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se
