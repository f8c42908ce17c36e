"""Hot numeric kernels, JIT-compiled with numba when available.

Set ``HELIXWAVE_NUMBA=0`` to force the plain numpy/Python implementations
(useful for debugging and for the kernel benchmark).  Every kernel has a
fallback that produces bit-identical results at the sizes we care about.
"""

import os

import numpy as np

_want_numba = os.environ.get("HELIXWAVE_NUMBA", "1") != "0"

if _want_numba:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _njit = None
else:
    _njit = None

USING_NUMBA = _njit is not None


def _tridiag_solve_impl(lo, di, up, rhs):
    """Thomas elimination for a complex tridiagonal system.

    Row k couples x[k-1], x[k], x[k+1] with coefficients lo[k], di[k], up[k]
    (lo[0] and up[-1] are ignored).  Returns (x, ok); ok is False when a
    pivot collapses, in which case x is garbage and must be discarded.
    """
    n = di.shape[0]
    cp = np.empty(n, np.complex128)
    dp = np.empty(n, np.complex128)
    x = np.empty(n, np.complex128)
    piv = di[0]
    if abs(piv) == 0.0:
        return x, False
    cp[0] = up[0] / piv
    dp[0] = rhs[0] / piv
    for k in range(1, n):
        piv = di[k] - lo[k] * cp[k - 1]
        if abs(piv) < 1e-300:
            return x, False
        cp[k] = up[k] / piv
        dp[k] = (rhs[k] - lo[k] * dp[k - 1]) / piv
    x[n - 1] = dp[n - 1]
    for k in range(n - 2, -1, -1):
        x[k] = dp[k] - cp[k] * x[k + 1]
    return x, True


def _cell_residuals_loop(u1, u2, f_c, r_c, chi_c, h_r, h_phi):
    """First-order residuals at cell centers, explicit loops (numba path).

    res1 = (1/r) d_r u2 + (chi/r^2) d_phi u1 - f
    res2 = (1/r) d_r u1 - (1/r^2) d_phi u2
    evaluated with centered averages/differences on the four cell corners;
    phi wraps periodically.
    """
    n_r, n_phi = u1.shape
    res1 = np.empty((n_r - 1, n_phi), np.float64)
    res2 = np.empty((n_r - 1, n_phi), np.float64)
    for i in range(n_r - 1):
        rc = r_c[i]
        cc = chi_c[i]
        for j in range(n_phi):
            jp = j + 1 if j + 1 < n_phi else 0
            du2_dr = 0.5 * ((u2[i + 1, j] + u2[i + 1, jp]) - (u2[i, j] + u2[i, jp])) / h_r
            du1_dr = 0.5 * ((u1[i + 1, j] + u1[i + 1, jp]) - (u1[i, j] + u1[i, jp])) / h_r
            du1_dp = 0.5 * ((u1[i, jp] + u1[i + 1, jp]) - (u1[i, j] + u1[i + 1, j])) / h_phi
            du2_dp = 0.5 * ((u2[i, jp] + u2[i + 1, jp]) - (u2[i, j] + u2[i + 1, j])) / h_phi
            res1[i, j] = du2_dr / rc + cc / (rc * rc) * du1_dp - f_c[i, j]
            res2[i, j] = du1_dr / rc - du2_dp / (rc * rc)
    return res1, res2


def _cell_residuals_numpy(u1, u2, f_c, r_c, chi_c, h_r, h_phi):
    """Vectorized fallback for :func:`cell_residuals`."""
    u1r = np.roll(u1, -1, axis=1)
    u2r = np.roll(u2, -1, axis=1)
    rc = r_c[:, None]
    cc = chi_c[:, None]
    du2_dr = 0.5 * ((u2[1:] + u2r[1:]) - (u2[:-1] + u2r[:-1])) / h_r
    du1_dr = 0.5 * ((u1[1:] + u1r[1:]) - (u1[:-1] + u1r[:-1])) / h_r
    du1_dp = 0.5 * ((u1r[:-1] + u1r[1:]) - (u1[:-1] + u1[1:])) / h_phi
    du2_dp = 0.5 * ((u2r[:-1] + u2r[1:]) - (u2[:-1] + u2[1:])) / h_phi
    res1 = du2_dr / rc + cc / rc**2 * du1_dp - f_c
    res2 = du1_dr / rc - du2_dp / rc**2
    return res1, res2


if USING_NUMBA:
    tridiag_solve = _njit(cache=True)(_tridiag_solve_impl)
    cell_residuals = _njit(cache=True)(_cell_residuals_loop)
else:
    tridiag_solve = _tridiag_solve_impl
    cell_residuals = _cell_residuals_numpy

# un-jitted references kept for the benchmark script
tridiag_solve_python = _tridiag_solve_impl
cell_residuals_numpy = _cell_residuals_numpy
