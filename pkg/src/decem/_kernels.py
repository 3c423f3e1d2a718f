"""Hot loops of the E-step and of kernel construction, in two interchangeable flavours.

``NUMPY`` and ``NUMBA`` map the same names to implementations with identical
signatures; the active set is exported as module-level functions according to
:data:`decem._accel.USE_NUMBA`.  Both sets stay importable so the benchmark
and the tests can compare them side by side.
"""
import numpy as np

from . import _accel

# ----------------------------------------------------------------------------
# pure numpy


def _build_kernel_np(T, O, pij, lamj):
    nx = T.shape[0]
    nz = pij.shape[0]
    # oc[x, z, x', y] = sum_a pi(a|z) p(x'|x,a) p(y|x',a)
    oc = np.einsum("za,xaw,way->xzwy", pij, T, O, optimize=True)
    src_dst = np.einsum("xzwy,zyv->xzwv", oc, lamj, optimize=True)
    n = nx * nz
    return np.ascontiguousarray(src_dst.reshape(n, n).T)


def _fb_sums_np(P, p0, rbar, gamma, t_max):
    alpha = p0.copy()
    beta = rbar.copy()
    F = alpha.copy()
    V = beta.copy()
    Pt = P.T
    g = 1.0
    for _ in range(t_max):
        alpha = P @ alpha
        beta = Pt @ beta
        g *= gamma
        F += g * alpha
        V += g * beta
    return F, V


def _mbem_loop_np(P, p0, rbar, gamma, f, v, thresh, l_cap):
    f = f.copy()
    v = v.copy()
    Pt = P.T
    df = dv = np.inf
    L = 0
    while L < l_cap:
        fn = p0 + gamma * (P @ f)
        vn = rbar + gamma * (Pt @ v)
        L += 1
        df = float(np.abs(fn - f).sum())
        dv = float(np.abs(vn - v).max())
        f, v = fn, vn
        if df < thresh and dv < thresh:
            return f, v, L, df, dv, True
    return f, v, L, df, dv, False


NUMPY = {
    "build_kernel": _build_kernel_np,
    "fb_sums": _fb_sums_np,
    "mbem_loop": _mbem_loop_np,
}

# ----------------------------------------------------------------------------
# numba

NUMBA = None

if _accel.HAVE_NUMBA:
    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def _build_kernel_nb(T, O, pij, lamj):
        nx, na = T.shape[0], T.shape[1]
        ny = O.shape[2]
        nz = pij.shape[0]
        n = nx * nz
        P = np.zeros((n, n))
        # each x owns the source columns x*nz .. x*nz+nz-1, so the writes never collide
        for x in prange(nx):
            for z in range(nz):
                src = x * nz + z
                for a in range(na):
                    w = pij[z, a]
                    if w == 0.0:
                        continue
                    for x2 in range(nx):
                        t = w * T[x, a, x2]
                        if t == 0.0:
                            continue
                        for y in range(ny):
                            q = t * O[x2, a, y]
                            if q == 0.0:
                                continue
                            base = x2 * nz
                            for z2 in range(nz):
                                P[base + z2, src] += q * lamj[z, y, z2]
        return P

    # below this joint size a fused scalar loop beats the BLAS call overhead
    _BLAS_MIN = 32

    @njit(cache=True)
    def _step_pair(P, Pt, x, y, xo, yo):
        """xo = P x and yo = P^T y."""
        n = x.shape[0]
        if n >= _BLAS_MIN:
            xo[:] = np.dot(P, x)
            yo[:] = np.dot(Pt, y)
            return
        yo[:] = 0.0
        for i in range(n):
            acc = 0.0
            yi = y[i]
            for j in range(n):
                pij = P[i, j]
                acc += pij * x[j]
                yo[j] += pij * yi
            xo[i] = acc

    @njit(cache=True)
    def _fb_sums_nb(P, p0, rbar, gamma, t_max):
        n = p0.shape[0]
        Pt = np.ascontiguousarray(P.T)
        alpha = p0.copy()
        beta = rbar.copy()
        F = alpha.copy()
        V = beta.copy()
        an = np.empty(n)
        bn = np.empty(n)
        g = 1.0
        for _ in range(t_max):
            _step_pair(P, Pt, alpha, beta, an, bn)
            g *= gamma
            for i in range(n):
                alpha[i] = an[i]
                beta[i] = bn[i]
                F[i] += g * an[i]
                V[i] += g * bn[i]
        return F, V

    @njit(cache=True)
    def _mbem_loop_nb(P, p0, rbar, gamma, f, v, thresh, l_cap):
        n = p0.shape[0]
        Pt = np.ascontiguousarray(P.T)
        f = f.copy()
        v = v.copy()
        fn = np.empty(n)
        vn = np.empty(n)
        df = np.inf
        dv = np.inf
        L = 0
        while L < l_cap:
            _step_pair(P, Pt, f, v, fn, vn)
            L += 1
            df = 0.0
            dv = 0.0
            for i in range(n):
                a = p0[i] + gamma * fn[i]
                b = rbar[i] + gamma * vn[i]
                df += abs(a - f[i])
                d = abs(b - v[i])
                if d > dv:
                    dv = d
                f[i] = a
                v[i] = b
            if df < thresh and dv < thresh:
                return f, v, L, df, dv, True
        return f, v, L, df, dv, False

    NUMBA = {
        "build_kernel": _build_kernel_nb,
        "fb_sums": _fb_sums_nb,
        "mbem_loop": _mbem_loop_nb,
    }

ACTIVE = NUMBA if _accel.USE_NUMBA else NUMPY

build_kernel = ACTIVE["build_kernel"]
fb_sums = ACTIVE["fb_sums"]
mbem_loop = ACTIVE["mbem_loop"]
