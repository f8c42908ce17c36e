"""Two-dimensional least-squares solve of the first-order system.

Unknowns are the nodal values of u1 and u2.  Both first-order residuals

    R1 = (1/r) d_r u2 + chi/r^2 d_phi u1 - f,
    R2 = (1/r) d_r u1 - 1/r^2  d_phi u2,

are collocated at cell centers with centered averages/differences of the
four surrounding nodes (periodic in phi), which is second-order accurate
and needs no one-sided closures.  Boundary conditions are imposed strongly:
the u1 unknowns on the inner circle are eliminated as zeros, and u2 on the
outer circle is eliminated via u2 = -(sigma/tau) u1.  The weighted sum
sum_cells r_c h_r h_phi (R1^2 + R2^2) is minimized through its normal
equations with a sparse direct factorization; a conjugate-gradient fallback
(relative residual 1e-10) covers factorization failures.

The solve refuses multipliers that fail the admissibility certificate, since
the well-posedness of the constrained problem is exactly what the
certificate establishes.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _accel
from .certify import CertificationError, certify
from .domain import BoundarySpec, DomainParams, Grid, chi
from .fields import GridField, reconstruct_psi, sample_source
from .system import MultiplierParams


class SolverConvergenceError(RuntimeError):
    """The iterative fallback failed to reach the requested residual."""


def _cell_average(f_nodal: np.ndarray) -> np.ndarray:
    """Average the four corners of every cell (phi wraps)."""
    fr = np.roll(f_nodal, -1, axis=1)
    return 0.25 * (f_nodal[:-1] + f_nodal[1:] + fr[:-1] + fr[1:])


def _assemble(params: DomainParams, bspec: BoundarySpec, grid: Grid, f_cells: np.ndarray):
    """Sparse residual operator M, data b, and cell weights w (rows: R1 block, R2 block)."""
    n, p = grid.n_r, grid.n_phi
    h_r, h_p = grid.h_r, grid.h_phi
    r_c = grid.r_centers
    chi_c = chi(r_c, params)
    ratio = np.asarray(bspec.sigma(grid.phi_nodes) / bspec.tau(grid.phi_nodes), dtype=float)
    nu1 = (n - 1) * p
    n_cells = (n - 1) * p

    ci = np.repeat(np.arange(n - 1), p)
    cj = np.tile(np.arange(p), n - 1)
    cell = ci * p + cj
    inv_rh = 1.0 / (r_c[ci] * h_r)
    chi_rp = chi_c[ci] / (r_c[ci] ** 2 * h_p)
    inv_r2p = 1.0 / (r_c[ci] ** 2 * h_p)

    rows, cols, vals = [], [], []

    def emit(row, var, node_i, node_j, coef):
        node_j = node_j % p
        if var == 1:
            keep = node_i >= 1
            rows.append(row[keep])
            cols.append((node_i[keep] - 1) * p + node_j[keep])
            vals.append(coef[keep])
        else:
            outer = node_i == n - 1
            inner = ~outer
            rows.append(row[inner])
            cols.append(nu1 + node_i[inner] * p + node_j[inner])
            vals.append(coef[inner])
            rows.append(row[outer])
            cols.append((node_i[outer] - 1) * p + node_j[outer])
            vals.append(-ratio[node_j[outer]] * coef[outer])

    for di in (0, 1):
        for dj in (0, 1):
            ni = ci + di
            nj = cj + dj
            s_r = 0.5 * (2 * di - 1)
            s_p = 0.5 * (2 * dj - 1)
            emit(cell, 2, ni, nj, s_r * inv_rh)            # R1: d_r u2
            emit(cell, 1, ni, nj, s_p * chi_rp)            # R1: d_phi u1
            emit(n_cells + cell, 1, ni, nj, s_r * inv_rh)  # R2: d_r u1
            emit(n_cells + cell, 2, ni, nj, -s_p * inv_r2p)  # R2: d_phi u2
    m = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 * n_cells, 2 * nu1),
    ).tocsr()
    b = np.concatenate([f_cells.ravel(), np.zeros(n_cells)])
    w = np.tile((r_c[:, None] * np.full(p, h_r * h_p)).ravel(), 2)
    return m, b, w


def solve_fosls(params: DomainParams, mult: MultiplierParams, bspec: BoundarySpec,
                f, grid: Grid, margin: float = 0.1, cg_tol: float = 1e-10,
                cg_maxiter: int = 10000):
    """Least-squares solve; returns (GridField, info dict).

    info carries the optimal objective value sum w (R1^2 + R2^2), the method
    that produced the solution ("direct" or "cg"), and the unknown count.
    Raises CertificationError for an inadmissible multiplier and
    SolverConvergenceError if the fallback iteration stalls.
    """
    cert = certify(params, mult, bspec, margin=margin)
    if not cert.admissible:
        raise CertificationError(
            f"multiplier (a={mult.a:g}, alpha={mult.alpha:g}) failed the "
            f"'{cert.first_failure}' check; refusing to assemble"
        )
    f_nodal = sample_source(f, grid)
    f_cells = _cell_average(f_nodal)
    m, b, w = _assemble(params, bspec, grid, f_cells)

    mw = m.T.tocsr().multiply(w).tocsr()
    a_norm = (mw @ m).tocsc()
    rhs = mw @ b
    method = "direct"
    try:
        x = spla.splu(a_norm).solve(rhs)
        if not np.all(np.isfinite(x)):
            raise RuntimeError("non-finite solution from factorization")
    except RuntimeError:
        method = "cg"
        x, info = spla.cg(a_norm, rhs, rtol=cg_tol, maxiter=cg_maxiter)
        if info != 0:
            raise SolverConvergenceError(
                f"conjugate gradients stopped with info={info} on a "
                f"{grid.n_r}x{grid.n_phi} grid"
            )
    res = m @ x - b
    objective = float(np.sum(w * res**2))

    n, p = grid.n_r, grid.n_phi
    nu1 = (n - 1) * p
    u1 = np.zeros((n, p))
    u2 = np.zeros((n, p))
    u1[1:] = x[:nu1].reshape(n - 1, p)
    u2[:-1] = x[nu1:].reshape(n - 1, p)
    ratio = np.asarray(bspec.sigma(grid.phi_nodes) / bspec.tau(grid.phi_nodes), dtype=float)
    u2[-1] = -ratio * u1[-1]
    field = GridField(u1=u1, u2=u2, psi=reconstruct_psi(u2, grid), f=f_nodal)
    info_dict = {"objective": objective, "method": method, "unknowns": 2 * nu1}
    return field, info_dict


def residual_norm(field: GridField, params: DomainParams, grid: Grid):
    """Weighted L2 norms of the two first-order residuals at cell centers."""
    f_cells = _cell_average(field.f)
    res1, res2 = _accel.cell_residuals(
        np.ascontiguousarray(field.u1), np.ascontiguousarray(field.u2),
        f_cells, grid.r_centers, np.asarray(chi(grid.r_centers, params)),
        grid.h_r, grid.h_phi,
    )
    w = grid.r_centers[:, None] * (grid.h_r * grid.h_phi)
    return (float(np.sqrt(np.sum(w * res1**2))),
            float(np.sqrt(np.sum(w * res2**2))))
