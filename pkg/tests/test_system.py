import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize_scalar

from helixwave import (BoundarySpec, ConstFn, DomainParams, MultiplierParams,
                       ParameterSearchError, assemble_point, assemble_source, c_of_r,
                       chi, choose_parameters, dc_dr, dcchi_dr, det_L, matrix_L,
                       sommerfeld_spec)
from helixwave.system import (ALPHA_FLOOR, nondegeneracy_margin, positivity_scan,
                              radial_scan, symmetrized_mu, tilde_matrices)

M2 = MultiplierParams(a=-5.0, alpha=2.0)


def test_c_closed_form_values(params):
    assert c_of_r(1e-12, params, M2) == pytest.approx(-1.0)
    assert c_of_r(1.0, params, M2) == pytest.approx(-2.0 + np.exp(-1.0), abs=1e-12)
    assert c_of_r(2.0, params, M2) == pytest.approx(-2.0 + np.exp(-8.0), abs=1e-12)


def test_derivatives_vanish_at_origin(params):
    assert dc_dr(1e-13, params) == pytest.approx(0.0, abs=1e-12)
    assert dcchi_dr(1e-13, params, M2) == pytest.approx(0.0, abs=1e-12)


def test_derivatives_against_finite_differences(params):
    # oracle: centered differences of c and c*chi with step 1e-6
    h = 1e-6
    for r in (0.3, 1.0, 1.7):
        fd_c = (c_of_r(r + h, params, M2) - c_of_r(r - h, params, M2)) / (2 * h)
        assert_allclose(dc_dr(r, params), fd_c, rtol=1e-8)
        cc = lambda x: c_of_r(x, params, M2) * chi(x, params)
        fd_cc = (cc(r + h) - cc(r - h)) / (2 * h)
        assert_allclose(dcchi_dr(r, params, M2), fd_cc, rtol=1e-8)
    assert dc_dr(1.0, params) == pytest.approx(-3 * np.exp(-1.0), abs=1e-12)
    assert dcchi_dr(1.0, params, M2) == pytest.approx(4 - 2 * np.exp(-1.0), abs=1e-12)


def test_det_l_values(params):
    # direct substitution, re-evaluated independently as a*a + c*c*chi
    r = 2.0
    c = float(c_of_r(r, params, M2))
    expected = M2.a * M2.a + c * c * float(chi(r, params))
    assert_allclose(det_L(r, params, M2), expected, rtol=1e-12)
    assert expected == pytest.approx(13.004025, abs=1e-5)
    assert det_L(params.light_radius, params, M2) == pytest.approx(M2.a**2)
    tiny_a = MultiplierParams(a=1e-8, alpha=2.0)
    assert det_L(0.5, params, tiny_a) > 0  # c^2 chi > 0 inside the light circle


def test_multiplier_params_validation():
    with pytest.raises(ValueError):
        MultiplierParams(a=0.0, alpha=2.0)
    with pytest.raises(ValueError):
        MultiplierParams(a=1.0, alpha=0.0)


def test_matrix_l_maps_raw_source(params, rng):
    # L (f, 0)^T must equal the multiplied source (a f, c f)
    for r in rng.uniform(params.epsilon, params.big_r, 25):
        f = rng.normal()
        h = assemble_source(r, 0.0, f, params, M2)
        assert_allclose(matrix_L(r, params, M2) @ np.array([f, 0.0]), h.ravel(), atol=1e-14)
    assert_allclose(assemble_source(1.0, 0.0, 1.0, params, M2).ravel(),
                    [-5.0, -2.0 + np.exp(-1.0)], atol=1e-7)
    assert_allclose(assemble_source(1.0, 0.0, 0.0, params, M2).ravel(), [0.0, 0.0])


def test_point_matrices_symmetric_exactly(params, rng):
    for r in rng.uniform(params.epsilon, params.big_r, 1000):
        pm = assemble_point(r, params, M2)
        assert np.array_equal(pm.a_r, pm.a_r.T)
        assert np.array_equal(pm.a_phi, pm.a_phi.T)
        assert pm.omega_density == r


def test_k_matrix_example(params):
    pm = assemble_point(1.0, params, M2)
    assert_allclose(np.diag(pm.k_mat), [1.6321206, 0.5518191], atol=1e-6)
    assert pm.k_mat[0, 1] == 0.0 and pm.k_mat[1, 0] == 0.0
    assert np.linalg.eigvalsh(pm.k_mat).min() == pytest.approx(0.55182, abs=1e-5)


def test_k_matches_divergence_of_weighted_coefficient(params, rng):
    # K = -1/2 d_r(r A^r) by centered differences, step 1e-6
    h = 1e-6
    for r in rng.uniform(params.epsilon + 2 * h, params.big_r - 2 * h, 1000):
        pm = assemble_point(r, params, M2)
        hi = (r + h) * assemble_point(r + h, params, M2).a_r
        lo = (r - h) * assemble_point(r - h, params, M2).a_r
        k_fd = -0.5 * (hi - lo) / (2 * h)
        assert_allclose(pm.k_mat, k_fd, rtol=1e-6, atol=1e-9)


def test_multiplier_reproduces_raw_system(params, rng):
    # L Atilde^a = A^a componentwise
    for r in rng.uniform(params.epsilon, params.big_r, 200):
        l_mat = matrix_L(r, params, M2)
        t_r, t_phi = tilde_matrices(r, params)
        pm = assemble_point(r, params, M2)
        assert_allclose(l_mat @ t_r, pm.a_r, atol=1e-13)
        assert_allclose(l_mat @ t_phi, pm.a_phi, atol=1e-13)


def test_alpha_floor_bounds_the_bracket(params):
    # oracle: numeric maximization of E(r) = exp(-(wr)^3)(2 + 3 w r chi) over (0, 10/w]
    w = params.omega
    neg_e = lambda r: -(np.exp(-((w * r) ** 3)) * (2 + 3 * w * r * float(chi(r, params))))
    coarse = np.linspace(1e-6, 10 / w, 20001)
    r0 = coarse[np.argmin([neg_e(r) for r in coarse])]
    res = minimize_scalar(neg_e, bracket=(max(r0 - 1e-3, 1e-9), r0, r0 + 1e-3))
    sup_e = -res.fun
    assert sup_e <= 2 + 2 / np.sqrt(3) + 1e-12
    assert 2 * ALPHA_FLOOR == pytest.approx(2 + 2 / np.sqrt(3), abs=1e-14)


def test_choose_parameters_canonical(params, bspec):
    mult = choose_parameters(params, bspec)
    assert mult.alpha == 2.0
    assert mult.a < 0
    # independent dense re-check of every inequality at 10^4 points
    r = np.linspace(params.epsilon, params.big_r, 10001)
    assert np.max(dc_dr(r, params)) < 0
    assert np.min(dcchi_dr(r, params, mult)) > 0
    dl = np.abs(det_L(r, params, mult))
    assert dl.min() >= 0.1 * mult.a**2
    assert float(c_of_r(params.epsilon, params, mult)) < 0
    phi = np.linspace(0, 2 * np.pi, 719)
    mu = symmetrized_mu("outer", bspec.sigma(phi), bspec.tau(phi), params, mult)
    assert np.linalg.eigvalsh(mu).min() >= 0
    # the documented hand-picked pair passes the same checks
    assert np.min(np.abs(det_L(r, params, M2))) >= 0.1 * 25.0
    mu5 = symmetrized_mu("outer", 1.0, 0.5, params, M2)
    assert np.linalg.eigvalsh(mu5).min() > 0


def test_choose_parameters_deterministic(params, bspec):
    m1 = choose_parameters(params, bspec)
    m2 = choose_parameters(params, bspec)
    assert m1 == m2


def test_choose_parameters_flips_sign_for_ingoing(params):
    minus = sommerfeld_spec(params, "-")
    mult = choose_parameters(params, minus)
    assert mult.a > 0


class _MixedSignSpec:
    """Duck-typed stand-in that dodges BoundarySpec validation."""

    sigma = staticmethod(lambda phi: np.cos(np.asarray(phi)) + 0.1)
    tau = staticmethod(lambda phi: np.ones_like(np.asarray(phi, dtype=float)))

    def product_sign(self):
        return 1.0


def test_choose_parameters_mixed_sign_fails(params):
    with pytest.raises(ParameterSearchError):
        choose_parameters(params, _MixedSignSpec(), a_max=1e4)


def test_positivity_scan_margins(params, mult):
    min_eig, rel_margin = positivity_scan(params, mult)
    assert min_eig > 0
    assert rel_margin >= 0.1
    assert nondegeneracy_margin(params, mult) >= 0.1 * mult.a**2


def test_symmetrized_mu_inner_closed_form(params):
    mu = symmetrized_mu("inner", 1.0, 0.0, params, M2)
    c = float(c_of_r(params.epsilon, params, M2))
    ch = float(chi(params.epsilon, params))
    assert_allclose(mu, [[-c * ch, 0.0], [0.0, -c]], atol=1e-15)


def test_scan_endpoints(params):
    r = radial_scan(params, 128)
    assert r[0] == params.epsilon and r[-1] == params.big_r
