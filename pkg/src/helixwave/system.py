"""Construction of the symmetric-positive first-order form.

With u1 = d_phi Psi and u2 = r d_r Psi the reduced wave equation becomes the
first-order pair

    (1/r) d_r u2 + chi/r^2 d_phi u1 = f,        (R1)
    (1/r) d_r u1 - 1/r^2  d_phi u2 = 0,         (R2)

which is then multiplied by

    L = [[a, -c*chi], [c, a]],   a = const,   c(r) = -alpha + exp(-(omega r)^3),

giving A^r d_r u + A^phi d_phi u = h with symmetric coefficient matrices

    A^r   = (1/r)  [[-c chi, a], [a, c]],
    A^phi = (1/r^2)[[a chi, c chi], [c chi, -a]],
    h     = (a f, c f).

The system is symmetric positive when the matrix K = -1/2 d_r(r A^r), i.e.

    K = 1/2 diag(d_r(c chi), -d_r c),

is positive definite on [eps, R]; with the exponential profile this reduces
to two scalar inequalities, certified here by dense sampling.  The multiplier
must also keep L invertible (a^2 + c^2 chi != 0) and render the boundary
conditions admissible, which fixes sign(a) = -sign(sigma*tau) and a minimum
magnitude for |a|.  choose_parameters searches a deterministic doubling
sequence for the smallest such |a|.
"""

from dataclasses import dataclass

import numpy as np

from .domain import BoundarySpec, DomainParams, chi

_SQRT3 = np.sqrt(3.0)
ALPHA_FLOOR = 1.0 + 1.0 / _SQRT3  # smallest alpha with d_r(c*chi) > 0 for every r


class ParameterSearchError(RuntimeError):
    """No multiplier constant |a| <= a_max satisfies all certification conditions."""


@dataclass(frozen=True)
class MultiplierParams:
    """Free constants of the symmetrizing multiplier.

    alpha must exceed 1 + 1/sqrt(3) for positivity and a must carry the sign
    opposite to sigma*tau for outer admissibility; both are certified
    numerically rather than enforced here so that deliberately bad values can
    be fed to the checkers.
    """

    a: float
    alpha: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a != 0.0):
            raise ValueError(f"a must be finite and nonzero, got {self.a}")
        if not (np.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class PointMatrices:
    """Coefficient data of the symmetrized system at one radius."""

    a_r: np.ndarray
    a_phi: np.ndarray
    k_mat: np.ndarray
    omega_density: float


def c_of_r(r, params: DomainParams, mult: MultiplierParams):
    """c(r) = -alpha + exp(-(omega r)^3)."""
    r = np.asarray(r, dtype=float)
    return -mult.alpha + np.exp(-((params.omega * r) ** 3))


def dc_dr(r, params: DomainParams, mult: MultiplierParams = None):
    """d_r c = -3 omega^3 r^2 exp(-(omega r)^3)."""
    r = np.asarray(r, dtype=float)
    w = params.omega
    return -3.0 * w**3 * r**2 * np.exp(-((w * r) ** 3))


def dcchi_dr(r, params: DomainParams, mult: MultiplierParams):
    """d_r(c*chi) = omega^2 r (2 alpha - exp(-(omega r)^3)(2 + 3 omega r chi))."""
    r = np.asarray(r, dtype=float)
    w = params.omega
    return w**2 * r * (2.0 * mult.alpha - np.exp(-((w * r) ** 3)) * (2.0 + 3.0 * w * r * chi(r, params)))


def _c_chi(r, params, mult):
    return c_of_r(r, params, mult), chi(r, params)


def matrix_L(r: float, params: DomainParams, mult: MultiplierParams) -> np.ndarray:
    c, ch = _c_chi(r, params, mult)
    return np.array([[mult.a, -c * ch], [c, mult.a]])


def det_L(r, params: DomainParams, mult: MultiplierParams):
    """det L = a^2 + c^2 chi; must stay away from zero on [eps, R]."""
    c, ch = _c_chi(np.asarray(r, dtype=float), params, mult)
    return mult.a**2 + c**2 * ch


def tilde_matrices(r: float, params: DomainParams):
    """Coefficients of the raw (unmultiplied) first-order pair (R1)-(R2)."""
    ch = float(chi(r, params))
    a_r = np.array([[0.0, 1.0], [1.0, 0.0]]) / r
    a_phi = np.array([[ch, 0.0], [0.0, -1.0]]) / r**2
    return a_r, a_phi


def assemble_point(r: float, params: DomainParams, mult: MultiplierParams) -> PointMatrices:
    """A^r, A^phi, K and the density weight at radius r."""
    c, ch = _c_chi(r, params, mult)
    a = mult.a
    a_r = np.array([[-c * ch, a], [a, c]]) / r
    a_phi = np.array([[a * ch, c * ch], [c * ch, -a]]) / r**2
    k_mat = 0.5 * np.array([[float(dcchi_dr(r, params, mult)), 0.0],
                            [0.0, -float(dc_dr(r, params))]])
    return PointMatrices(a_r=a_r, a_phi=a_phi, k_mat=k_mat, omega_density=float(r))


def assemble_source(r, phi, f_value, params: DomainParams, mult: MultiplierParams):
    """Multiplied source h = (a f, c f)."""
    f_value = np.asarray(f_value, dtype=float)
    c = c_of_r(r, params, mult)
    return np.stack([mult.a * f_value, c * f_value])


def symmetrized_mu(orientation: str, sigma, tau, params: DomainParams,
                   mult: MultiplierParams) -> np.ndarray:
    """Closed form of the symmetric part (mu + mu*)/2 of the boundary operator.

    orientation is "inner" or "outer"; sigma, tau may be arrays of per-phi
    values (outer) or scalars.  Returns an array of shape (..., 2, 2).

    Outer (r = R, outward normal R dr):
        N [[-2 st a + (s^2-t^2) c chi,  -st W^2 R^2 c],
           [-st W^2 R^2 c,              -2 st a + (s^2-t^2) c]]
    Inner (r = eps, normal -eps dr; the split is fixed at sigma=1, tau=0):
        diag(-c chi, -c).
    """
    if orientation == "inner":
        c, ch = _c_chi(params.epsilon, params, mult)
        return np.array([[-c * ch, 0.0], [0.0, -c]])
    if orientation != "outer":
        raise ValueError(f"orientation must be 'inner' or 'outer', got {orientation!r}")
    rb = params.big_r
    c, ch = _c_chi(rb, params, mult)
    s = np.asarray(sigma, dtype=float)
    t = np.asarray(tau, dtype=float)
    n = 1.0 / (s**2 + t**2)
    m11 = n * (-2.0 * s * t * mult.a + (s**2 - t**2) * c * ch)
    m22 = n * (-2.0 * s * t * mult.a + (s**2 - t**2) * c)
    m12 = n * (-s * t * (params.omega * rb) ** 2 * c)
    out = np.empty(np.broadcast(m11, m12).shape + (2, 2))
    out[..., 0, 0] = m11
    out[..., 0, 1] = m12
    out[..., 1, 0] = m12
    out[..., 1, 1] = m22
    return out


def eig2_symmetric(m: np.ndarray):
    """Eigenvalues (min, max) of symmetric 2x2 matrices, closed form."""
    tr = m[..., 0, 0] + m[..., 1, 1]
    disc = np.sqrt((m[..., 0, 0] - m[..., 1, 1]) ** 2 + 4.0 * m[..., 0, 1] ** 2)
    return 0.5 * (tr - disc), 0.5 * (tr + disc)


def radial_scan(params: DomainParams, n_scan: int = 2048) -> np.ndarray:
    t = np.arange(n_scan) / (n_scan - 1)
    return (1.0 - t) * params.epsilon + t * params.big_r


def positivity_scan(params: DomainParams, mult: MultiplierParams, n_scan: int = 2048):
    """(min eig of K+K^T over the scan, relative margin of the alpha inequality).

    K + K^T = diag(d_r(c chi), -d_r c).  The first entry is positive iff
    2*alpha exceeds E(r) = exp(-(w r)^3)(2 + 3 w r chi); the scan margin
    min (2 alpha - E) / (2 alpha) is the scale-free certificate for it.
    The second entry is negative of d_r c, positive in closed form.
    """
    r = radial_scan(params, n_scan)
    w = params.omega
    e = np.exp(-((w * r) ** 3)) * (2.0 + 3.0 * w * r * chi(r, params))
    bracket_margin = float(np.min((2.0 * mult.alpha - e) / (2.0 * mult.alpha)))
    min_eig = float(np.min(np.minimum(dcchi_dr(r, params, mult), -dc_dr(r, params))))
    return min_eig, bracket_margin


def positivity_kappa(params: DomainParams, mult: MultiplierParams, n_scan: int = 2048) -> float:
    """Largest kappa with (u, K u) >= kappa * omega_density * |u|^2 pointwise."""
    r = radial_scan(params, n_scan)
    vals = np.minimum(dcchi_dr(r, params, mult), -dc_dr(r, params)) / (2.0 * r)
    return float(np.min(vals))


def nondegeneracy_margin(params: DomainParams, mult: MultiplierParams, n_scan: int = 2048) -> float:
    """min |det L| over the radial scan; compare against margin * a^2."""
    return float(np.min(np.abs(det_L(radial_scan(params, n_scan), params, mult))))


def _outer_psd_ok(params, mult, bspec, n_phi_samples):
    phi = np.arange(n_phi_samples) * (2 * np.pi / n_phi_samples)
    mu = symmetrized_mu("outer", bspec.sigma(phi), bspec.tau(phi), params, mult)
    lo, _ = eig2_symmetric(mu)
    return float(lo.min())


def choose_parameters(params: DomainParams, bspec: BoundarySpec, margin: float = 0.1,
                      n_scan: int = 2048, n_phi_samples: int = 720,
                      a_max: float = 1e6) -> MultiplierParams:
    """Pick (a, alpha) certified on a dense sample with the requested margin.

    alpha = max(2, 1 + 1/sqrt(3) + margin) settles positivity outright; the
    magnitude |a| then walks a doubling sequence from
    alpha*sqrt(max(0, (omega R)^2 - 1)) + 1 until the nondegeneracy bound
    min|det L| >= margin*a^2 and the outer admissibility eigenvalue bound
    hold.  The search is deterministic, so repeated runs agree exactly.
    """
    alpha = max(2.0, ALPHA_FLOOR + margin)
    sign_st = bspec.product_sign()
    if sign_st == 0.0:
        raise ParameterSearchError("sigma*tau vanishes; no admissible constant multiplier")
    a_sign = -sign_st

    probe = MultiplierParams(a=a_sign, alpha=alpha)
    r = radial_scan(params, n_scan)
    if float(np.max(dc_dr(r, params))) >= 0.0:
        raise ParameterSearchError("d_r c fails to be negative on the scan")
    _, bracket_margin = positivity_scan(params, probe, n_scan)
    if bracket_margin < margin:
        raise ParameterSearchError(
            f"positivity margin {bracket_margin:.3g} below requested {margin:.3g}"
        )
    if float(c_of_r(params.epsilon, params, probe)) >= 0.0:
        raise ParameterSearchError("c(epsilon) must be negative")

    c2chi = c_of_r(r, params, probe) ** 2 * chi(r, params)
    mag = float(alpha * np.sqrt(max(0.0, (params.omega * params.big_r) ** 2 - 1.0)) + 1.0)
    while mag <= a_max:
        mult = MultiplierParams(a=a_sign * mag, alpha=alpha)
        det_ok = np.min(np.abs(mult.a**2 + c2chi)) >= margin * mult.a**2
        if det_ok and _outer_psd_ok(params, mult, bspec, n_phi_samples) >= 0.0:
            return mult
        mag *= 2.0
    raise ParameterSearchError(
        f"no |a| <= {a_max:g} passes nondegeneracy and outer admissibility; "
        "boundary spec is likely inconsistent"
    )
