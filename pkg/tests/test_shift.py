import numpy as np
import pytest
from numpy.testing import assert_allclose

from helixwave import (BoundarySpec, ConstFn, FourierFn, apply_shift, build_grid,
                       lambda_shift_build, solve_modes)
from helixwave.fields import GridField


def test_zero_data_gives_zero_lift(params, bspec):
    shift = lambda_shift_build(bspec, params)
    r = np.linspace(params.epsilon, params.big_r, 40)
    phi = np.linspace(0, 2 * np.pi, 17)
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    assert_allclose(shift.lambda_vals(rr, pp), 0.0)
    assert_allclose(shift.lambda_laplacian_terms(rr, pp), 0.0)


def test_outer_condition_reproduced_exactly(params):
    # k = 0, l = cos(phi), tau = 0.5: the lift satisfies tau R L_r + sigma L_phi = l
    spec = BoundarySpec(sigma=ConstFn(1.0), tau=ConstFn(0.5),
                        outer_l=FourierFn(cos=[0.0, 1.0]))
    shift = lambda_shift_build(spec, params)
    phi = np.linspace(0, 2 * np.pi, 360)
    rb = np.full_like(phi, params.big_r)
    combo = 0.5 * params.big_r * shift.lambda_dr(rb, phi) + 1.0 * shift.lambda_dphi(rb, phi)
    assert_allclose(combo, np.cos(phi), atol=1e-12)


def test_inner_value_reproduced_exactly(params, bspec):
    spec = BoundarySpec(sigma=bspec.sigma, tau=bspec.tau,
                        inner_k=FourierFn(cos=[0.2], sin=[1.0]))
    shift = lambda_shift_build(spec, params)
    phi = np.linspace(0, 2 * np.pi, 360)
    re = np.full_like(phi, params.epsilon)
    assert_allclose(shift.lambda_vals(re, phi), 0.2 + np.sin(phi), atol=1e-14)
    # and the lift does not disturb the outer condition when l = 0
    rb = np.full_like(phi, params.big_r)
    combo = (np.asarray(bspec.tau(phi)) * params.big_r * shift.lambda_dr(rb, phi)
             + np.asarray(bspec.sigma(phi)) * shift.lambda_dphi(rb, phi))
    assert_allclose(combo, 0.0, atol=1e-13)


def test_small_tau_rejected(params):
    spec = BoundarySpec(sigma=ConstFn(1.0), tau=ConstFn(1e-9))
    with pytest.raises(ValueError):
        lambda_shift_build(spec, params)


def test_shifted_field_is_homogeneous(params, bspec):
    # Psi - Lambda satisfies homogeneous data whenever Psi satisfies (k, l)
    k = FourierFn(cos=[0.5, 0.3])
    l = FourierFn(sin=[1.0])
    spec = BoundarySpec(sigma=bspec.sigma, tau=bspec.tau, inner_k=k, outer_l=l)
    shift = lambda_shift_build(spec, params)

    def psi(r, p):  # any smooth field carrying the inhomogeneous data
        t = (r - params.epsilon) / (params.big_r - params.epsilon)
        return np.asarray(k(p)) * (1 - t) ** 2 * (1 + 2 * t) + shift.lambda_vals(r, p) * t**2

    phi = np.linspace(0, 2 * np.pi, 90)
    re = np.full_like(phi, params.epsilon)
    shifted_inner = psi(re, phi) - shift.lambda_vals(re, phi)
    assert_allclose(shifted_inner, 0.0, atol=1e-13)


def test_apply_shift_restores_boundary_values(params, bspec):
    grid = build_grid(params, 21, 16)
    spec = BoundarySpec(sigma=bspec.sigma, tau=bspec.tau,
                        inner_k=FourierFn(cos=[0.0, 1.0]), outer_l=ConstFn(0.7))
    shift = lambda_shift_build(spec, params)
    zeros = np.zeros((grid.n_r, grid.n_phi))
    hom = GridField(u1=zeros.copy(), u2=zeros.copy(), psi=zeros.copy(), f=zeros.copy())
    total = apply_shift(hom, shift, grid)
    assert_allclose(total.psi[0], np.cos(grid.phi_nodes), atol=1e-14)
    combo = (np.asarray(bspec.sigma(grid.phi_nodes)) * total.u1[-1]
             + np.asarray(bspec.tau(grid.phi_nodes)) * total.u2[-1])
    assert_allclose(combo, 0.7, atol=1e-13)
