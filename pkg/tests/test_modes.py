import numpy as np
import pytest
from numpy.testing import assert_allclose

from helixwave import (ModeSolveError, build_grid, grid_l2, oracle_mode_solve,
                       oracle_order_estimate, solve_modes)
from helixwave._accel import tridiag_solve
from helixwave.domain import BoundarySpec, FourierFn, ConstFn


def mean_zero_mode_exact(params, f0):
    """Independent closed-form profile for the m = 0 problem with constant source.

    Integrating (r Psi')' = r f0 with Psi(eps) = 0 and Psi'(R) = 0:
        Psi(r) = f0 [ (r^2 - eps^2)/4 - (eps^2/2) ln(r/eps) ] + C ln(r/eps),
        C = -f0 (R^2 - eps^2)/2.
    """
    eps, rr = params.epsilon, params.big_r
    c = -f0 * (rr**2 - eps**2) / 2.0

    def psi(r):
        return f0 * ((r**2 - eps**2) / 4.0 - eps**2 / 2.0 * np.log(r / eps)) \
            + c * np.log(r / eps)

    return psi


def test_zero_source_gives_zero(params, bspec):
    grid = build_grid(params, 33, 16)
    field = solve_modes(params, bspec, lambda r, p: np.zeros_like(r), grid)
    assert field.linf() == 0.0
    assert np.abs(field.psi).max() == 0.0


def test_mean_mode_matches_quadrature_oracle(params, bspec):
    exact = mean_zero_mode_exact(params, 1.0)
    errs = []
    for n_r in (101, 201):
        grid = build_grid(params, n_r, 8)
        field = solve_modes(params, bspec, lambda r, p: np.ones_like(r), grid)
        errs.append(np.abs(field.psi[:, 0] - exact(grid.r_nodes)).max())
    assert errs[1] < 1e-4
    assert errs[0] / errs[1] == pytest.approx(4.0, abs=0.5)


def test_boundary_conditions_hold(params, bspec, rng):
    grid = build_grid(params, 41, 32)
    f = lambda r, p: np.exp(-((r - 1.1) ** 2)) * (np.cos(3 * p) + 0.5 * np.sin(p))
    field = solve_modes(params, bspec, f, grid)
    assert np.abs(field.u1[0]).max() < 1e-13
    assert np.abs(field.psi[0]).max() < 1e-13
    combo = (np.asarray(bspec.sigma(grid.phi_nodes)) * field.u1[-1]
             + np.asarray(bspec.tau(grid.phi_nodes)) * field.u2[-1])
    assert np.abs(combo).max() < 1e-10 * max(1.0, field.linf())


def test_nonconstant_boundary_rejected(params):
    spec = BoundarySpec(sigma=FourierFn(cos=[2.0, 0.5]), tau=ConstFn(0.5))
    grid = build_grid(params, 17, 8)
    with pytest.raises(ValueError):
        solve_modes(params, spec, lambda r, p: np.zeros_like(r), grid)


def test_non_finite_source_raises_mode_error(params, bspec):
    grid = build_grid(params, 17, 8)
    bad = lambda r, p: np.where(r > 0, np.nan, 0.0)
    with pytest.raises(ModeSolveError):
        solve_modes(params, bspec, bad, grid)


def test_tridiag_kernel_flags_singular_matrix():
    n = 5
    lo = np.zeros(n, complex)
    up = np.zeros(n, complex)
    di = np.zeros(n, complex)  # all-zero diagonal cannot be eliminated
    rhs = np.ones(n, complex)
    _, ok = tridiag_solve(lo, di, up, rhs)
    assert not ok


def test_tridiag_kernel_matches_dense_solve(rng):
    n = 64
    lo = rng.normal(size=n) + 1j * rng.normal(size=n)
    up = rng.normal(size=n) + 1j * rng.normal(size=n)
    di = rng.normal(size=n) + 1j * rng.normal(size=n) + 6.0  # diagonally dominant
    rhs = rng.normal(size=n) + 1j * rng.normal(size=n)
    x, ok = tridiag_solve(lo.astype(complex), di.astype(complex), up.astype(complex),
                          rhs.astype(complex))
    assert ok
    dense = np.diag(di) + np.diag(up[:-1], 1) + np.diag(lo[1:], -1)
    assert_allclose(x, np.linalg.solve(dense, rhs), atol=1e-10)


def test_oracle_zero_and_mean_mode(params, bspec):
    res = oracle_mode_solve(params, bspec, lambda r: np.zeros_like(r), m=0, intervals=512)
    assert np.abs(res.psi).max() == 0.0
    exact = mean_zero_mode_exact(params, 1.0)
    res = oracle_mode_solve(params, bspec, lambda r: np.ones_like(r), m=0, intervals=4096)
    assert np.abs(res.psi - exact(res.r_nodes)).max() < 1e-10
    assert not res.flagged


def test_oracle_order_estimate_smooth(params, bspec):
    f_m = lambda r: np.sin(np.pi * (r - params.epsilon) / (params.big_r - params.epsilon))
    order = oracle_order_estimate(params, bspec, f_m, m=3, base_intervals=512)
    assert 1.9 <= order <= 2.1


def test_oracle_flags_rough_data(params, bspec):
    f_m = lambda r: np.where(r < 1.0, 1.0, -1.0)  # jump inside the domain
    res = oracle_mode_solve(params, bspec, f_m, m=2, intervals=1024)
    assert res.flagged
