"""E-step engines: frequency function F and value function V of the current controller.

Three interchangeable engines produce the same pair of tables:

* :func:`forward_backward` - truncated forward/backward recursion (EM),
* :func:`bellman_solve` - direct solve of the forward and backward Bellman
  equations (BEM),
* :func:`mbem_estep` - fixed-point iteration of the Bellman operators with an
  arbitrary, typically warm, starting point (MBEM).

All tables are flat vectors over the joint index of :class:`JointChain`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import ModelError, NumericError, ResourceError
from .kernel import JointChain

#: Default hard cap on the truncation horizon returned by :func:`tmax_bound`.
TMAX_CAP = 10**7


@dataclass(frozen=True, eq=False)
class EstepResult:
    F: np.ndarray
    V: np.ndarray
    inner_iters: int
    engine: str


def tmax_bound(gamma: float, epsilon: float, cap: int = TMAX_CAP) -> int:
    """Smallest horizon whose discarded geometric tail is below ``epsilon``.

    That is the smallest integer ``T >= 0`` with
    ``gamma**(T + 1) / (1 - gamma) < epsilon``, equivalently the smallest
    integer strictly greater than ``log((1 - gamma) * epsilon) / log(gamma) - 1``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    bound = math.log((1.0 - gamma) * epsilon) / math.log(gamma) - 1.0
    if bound >= cap:
        raise ResourceError(f"T_max exceeds the cap {cap} for gamma={gamma}, epsilon={epsilon}")
    T = max(0, math.floor(bound) + 1)
    target = epsilon * (1.0 - gamma)
    # the float expression can land one off when the bound is an exact integer
    while T > 0 and gamma ** T < target:
        T -= 1
    while not gamma ** (T + 1) < target:
        T += 1
    if T > cap:
        raise ResourceError(f"T_max = {T} exceeds the cap {cap}")
    return T


def _as_vec(chain: JointChain, arr, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64).ravel()
    if arr.shape[0] != chain.size:
        raise ModelError(f"{what} has {arr.shape[0]} entries, chain has {chain.size}")
    return arr


def forward_backward(chain: JointChain, t_max: int) -> EstepResult:
    """Truncated sums ``F = sum_t gamma^t alpha_t`` and ``V = sum_t gamma^t beta_t`` for t <= t_max."""
    t_max = int(t_max)
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    F, V = _kernels.fb_sums(chain.kernel, chain.initial, chain.scaled_reward, chain.gamma, t_max)
    if not (np.all(np.isfinite(F)) and np.all(np.isfinite(V))):
        raise NumericError("forward-backward produced non-finite values")
    return EstepResult(F, V, t_max, "em")


def _residuals(chain, F, V):
    P, g = chain.kernel, chain.gamma
    rf = np.abs(F - (chain.initial + g * (P @ F))).max()
    rv = np.abs(V - (chain.scaled_reward + g * (P.T @ V))).max()
    return float(rf), float(rv)


def bellman_solve(chain: JointChain, rtol: float = 1e-10) -> EstepResult:
    """Exact F and V from one LU factorization of ``I - gamma P``.

    ``F`` solves ``(I - gamma P) F = p0`` and ``V`` solves the transposed
    system with right-hand side ``rbar``.
    """
    n = chain.size
    M = np.eye(n) - chain.gamma * chain.kernel
    try:
        lu = scipy.linalg.lu_factor(M, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise NumericError(f"factorization of I - gamma*P failed: {exc}") from exc
    F = scipy.linalg.lu_solve(lu, chain.initial)
    V = scipy.linalg.lu_solve(lu, chain.scaled_reward, trans=1)
    rf, rv = _residuals(chain, F, V)
    sf, sv = max(np.abs(F).max(), 1.0), max(np.abs(V).max(), 1.0)
    if rf > rtol * sf or rv > rtol * sv:
        # one step of iterative refinement
        F = F + scipy.linalg.lu_solve(lu, chain.initial - M @ F)
        V = V + scipy.linalg.lu_solve(lu, chain.scaled_reward - M.T @ V, trans=1)
        rf, rv = _residuals(chain, F, V)
    if not (np.all(np.isfinite(F)) and np.all(np.isfinite(V))) or rf > rtol * sf or rv > rtol * sv:
        raise NumericError(f"Bellman solve residuals too large: forward {rf:.3e}, backward {rv:.3e}")
    return EstepResult(F, V, 1, "bem")


def apply_forward_operator(chain: JointChain, f) -> np.ndarray:
    """``p0 + gamma * P f``; a contraction in the 1-norm."""
    f = _as_vec(chain, f, "f")
    return chain.initial + chain.gamma * (chain.kernel @ f)


def apply_backward_operator(chain: JointChain, v) -> np.ndarray:
    """``rbar + gamma * P^T v``; a contraction in the sup-norm."""
    v = _as_vec(chain, v, "v")
    return chain.scaled_reward + chain.gamma * (chain.kernel.T @ v)


def mbem_estep(chain: JointChain, epsilon: float, f_init=None, v_init=None, l_cap: int | None = None) -> EstepResult:
    """Iterate both Bellman operators until their increments certify an ``epsilon`` error.

    Stops at the first ``L >= 1`` where the forward increment (1-norm) and the
    backward increment (sup-norm) are both below ``(1 - gamma) * epsilon / gamma``,
    which bounds the sup-norm error of both tables by ``epsilon``.  Missing
    initializers default to the cold start ``(p0, rbar)``.

    Raises ResourceError (with ``partial`` set to the last iterate) when
    ``l_cap`` iterations are not enough.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    g = chain.gamma
    f = chain.initial if f_init is None else _as_vec(chain, f_init, "f_init")
    v = chain.scaled_reward if v_init is None else _as_vec(chain, v_init, "v_init")
    if l_cap is None:
        l_cap = 4 * tmax_bound(g, epsilon)
    l_cap = max(1, int(l_cap))
    thresh = (1.0 - g) * epsilon / g
    F, V, L, df, dv, ok = _kernels.mbem_loop(
        chain.kernel, chain.initial, chain.scaled_reward, g,
        np.ascontiguousarray(f), np.ascontiguousarray(v), thresh, l_cap,
    )
    result = EstepResult(F, V, int(L), "mbem")
    if not ok:
        raise ResourceError(
            f"MBEM E-step did not meet its stopping rule within {l_cap} iterations "
            f"(forward increment {df:.3e}, backward increment {dv:.3e}, threshold {thresh:.3e})",
            partial=result,
        )
    return result
