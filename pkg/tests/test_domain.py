import numpy as np
import pytest
from numpy.testing import assert_allclose

from helixwave import (BoundarySpec, ConstFn, DomainParams, FourierFn, PointType,
                       build_grid, chi, classify_point, sommerfeld_spec)
from helixwave.domain import RatioFn, fourier_fit


def test_chi_closed_form(params):
    assert chi(1.0, DomainParams(1.0, 0.2, 2.0)) == 0.0
    assert chi(0.5, DomainParams(2.0, 0.1, 0.3)) == 0.0
    assert chi(2.0, params) == -3.0


def test_chi_vanishes_on_light_circle_for_many_omegas():
    for omega in np.geomspace(1e-3, 1e3, 61):
        p = DomainParams(omega=omega, epsilon=0.1 / omega, big_r=3.0 / omega)
        assert abs(chi(p.light_radius, p)) <= 1e-15


def test_classify_examples(params):
    assert classify_point(0.5, params) is PointType.ELLIPTIC
    assert classify_point(1.0, params) is PointType.LIGHT_CIRCLE
    assert classify_point(1.5, params) is PointType.HYPERBOLIC


def test_classify_monotone_in_r(params):
    delta = 1e-9
    for r in np.linspace(0.01, params.light_radius - delta, 200):
        assert classify_point(r, params) is PointType.ELLIPTIC
    for r in np.linspace(params.light_radius + delta, 10.0, 200):
        assert classify_point(r, params) is PointType.HYPERBOLIC


def test_classify_rejects_nonpositive_radius(params):
    with pytest.raises(ValueError):
        classify_point(0.0, params)


def test_domain_invariants():
    with pytest.raises(ValueError):
        DomainParams(omega=1.0, epsilon=1.0, big_r=2.0)  # on the light circle
    with pytest.raises(ValueError):
        DomainParams(omega=2.0, epsilon=0.6, big_r=2.0)  # outside it
    with pytest.raises(ValueError):
        DomainParams(omega=1.0, epsilon=0.5, big_r=0.4)  # eps >= R
    with pytest.raises(ValueError):
        DomainParams(omega=-1.0, epsilon=0.2, big_r=2.0)


@pytest.mark.parametrize("omega,big_r,sign,sig,tau", [
    (1.0, 2.0, "+", 1.0, 0.5),
    (1.0, 2.0, "-", -1.0, 0.5),
    (0.5, 4.0, "+", 0.5, 0.25),
])
def test_sommerfeld_values(omega, big_r, sign, sig, tau):
    p = DomainParams(omega=omega, epsilon=0.1, big_r=big_r)
    spec = sommerfeld_spec(p, sign)
    phi = np.linspace(0, 2 * np.pi, 7)
    assert_allclose(spec.sigma(phi), sig)
    assert_allclose(spec.tau(phi), tau)


def test_build_grid_spacing(params):
    g = build_grid(params, 10, 8)
    assert_allclose(np.diff(g.r_nodes), 0.2)
    assert g.h_phi == pytest.approx(np.pi / 4)
    assert g.phi_nodes[-1] < 2 * np.pi


def test_build_grid_endpoints_bit_exact():
    for eps, big_r in [(0.2, 2.0), (0.1, 0.7), (1e-3, 0.3)]:
        p = DomainParams(omega=1.0 / (2 * big_r), epsilon=eps, big_r=big_r)
        for n_r in (3, 7, 64):
            g = build_grid(p, n_r, 8)
            assert g.r_nodes[0] == eps
            assert g.r_nodes[-1] == big_r


def test_build_grid_rejects_bad_counts(params):
    with pytest.raises(ValueError):
        build_grid(params, 2, 8)
    with pytest.raises(ValueError):
        build_grid(params, 10, 5)
    with pytest.raises(ValueError):
        build_grid(params, 10, 2)


def test_node_weights_integrate_area(params):
    g = build_grid(params, 19, 12)
    area = np.pi * (params.big_r**2 - params.epsilon**2)
    assert_allclose(g.node_weights().sum(), area, rtol=1e-13)


def test_boundary_spec_rejects_zero_and_mixed_sign_product():
    with pytest.raises(ValueError):
        BoundarySpec(sigma=ConstFn(1.0), tau=ConstFn(0.0))
    with pytest.raises(ValueError):
        # sigma*tau = 0.1 + cos(phi) changes sign over the circle
        BoundarySpec(sigma=FourierFn(cos=[0.1, 1.0]), tau=ConstFn(1.0))
    spec = BoundarySpec(sigma=FourierFn(cos=[2.0, 0.5]), tau=ConstFn(1.0))
    assert spec.product_sign() == 1.0


def _fd1(fn, phi, h=1e-6):
    return (fn(phi + h) - fn(phi - h)) / (2 * h)


def _fd2(fn, phi, h=1e-5):
    return (fn(phi + h) - 2 * fn(phi) + fn(phi - h)) / h**2


def test_fourier_fn_derivatives_match_finite_differences(rng):
    fn = FourierFn(cos=[0.3, -1.2, 0.0, 0.7], sin=[0.5, 0.0, -0.25])
    phi = rng.uniform(0, 2 * np.pi, 50)
    assert_allclose(fn.d1(phi), _fd1(fn, phi), rtol=1e-8, atol=1e-8)
    assert_allclose(fn.d2(phi), _fd2(fn, phi), rtol=1e-4, atol=1e-4)


def test_ratio_fn_derivatives_match_finite_differences(rng):
    num = FourierFn(cos=[0.2, 0.9], sin=[0.4])
    den = FourierFn(cos=[3.0, 0.5])
    ratio = RatioFn(num, den)
    phi = rng.uniform(0, 2 * np.pi, 50)
    assert_allclose(ratio.d1(phi), _fd1(ratio, phi), rtol=1e-7, atol=1e-8)
    assert_allclose(ratio.d2(phi), _fd2(ratio, phi), rtol=1e-4, atol=1e-4)


def test_fourier_fit_recovers_band_limited_function():
    target = FourierFn(cos=[0.1, 0.0, 2.0], sin=[0.0, -0.75, 0.0, 0.3])
    fitted = fourier_fit(target)
    phi = np.linspace(0, 2 * np.pi, 113)
    assert_allclose(fitted(phi), target(phi), atol=1e-13)
    assert isinstance(fitted, FourierFn)


def test_const_fn_serialization_roundtrip():
    assert ConstFn(2.5).to_config() == {"const": 2.5}
    four = FourierFn(cos=[1.0], sin=[0.5]).to_config()
    assert four == {"fourier": {"cos": [1.0], "sin": [0.5]}}
