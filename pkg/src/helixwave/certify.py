"""Numerical certification of symmetry, positivity, and boundary admissibility.

The boundary operator of the symmetrized system is beta = n_a A^a with the
outward normals R dr (outer circle) and -eps dr (inner circle):

    beta(R)   =  [[-c chi, a], [a, c]]   at r = R,
    beta(eps) =  [[c chi, -a], [-a, -c]] at r = eps.

A boundary condition sigma*u1 + tau*u2 = 0 is encoded by the rank-one piece
beta2 of a splitting beta = beta1 + beta2,

    beta1 = +/- N (sigma a + tau c chi ... ) ,  beta2 = +/- N w (sigma, tau),
    w = (tau a - sigma c chi, sigma a + tau c),  N = 1/(sigma^2 + tau^2),

with the plus sign at the outer boundary and the minus sign at the inner one
(where sigma, tau are fixed to 1, 0).  The condition is admissible when
mu = beta1 - beta2 has positive-semidefinite symmetric part and the null
spaces of beta1, beta2 are transverse; both are checked numerically here,
along with the interior positivity and nondegeneracy scans.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .domain import BoundarySpec, DomainParams, Grid, chi
from .system import (MultiplierParams, c_of_r, eig2_symmetric, nondegeneracy_margin,
                     positivity_kappa, positivity_scan, symmetrized_mu)

TOL_PSD = 1e-10

INNER = "inner"
OUTER = "outer"


class CertificationError(RuntimeError):
    """A multiplier failed the positivity/nondegeneracy/admissibility certificate."""


class SplitDegenerateError(RuntimeError):
    """The rank-one factor of beta2 vanished; the splitting is not usable."""


@dataclass(frozen=True)
class BoundaryOperators:
    """beta and its admissible splitting at one boundary point."""

    beta: np.ndarray
    beta1: np.ndarray
    beta2: np.ndarray
    mu: np.ndarray
    n_factor: float
    orientation: str


def _boundary_c_chi(orientation, params, mult):
    rb = params.epsilon if orientation == INNER else params.big_r
    return rb, float(c_of_r(rb, params, mult)), float(chi(rb, params))


def boundary_beta(orientation: str, params: DomainParams, mult: MultiplierParams,
                  bspec: BoundarySpec = None, phi: float = 0.0) -> np.ndarray:
    """Boundary operator n_a A^a; equals +/- r A^r(r) at the outer/inner circle."""
    if orientation not in (INNER, OUTER):
        raise ValueError(f"orientation must be 'inner' or 'outer', got {orientation!r}")
    rb, c, ch = _boundary_c_chi(orientation, params, mult)
    a = mult.a
    beta = np.array([[-c * ch, a], [a, c]])
    return beta if orientation == OUTER else -beta


def split_from_values(orientation: str, sigma: float, tau: float, params: DomainParams,
                      mult: MultiplierParams) -> BoundaryOperators:
    """Build the beta = beta1 + beta2 splitting from raw sigma, tau values."""
    rb, c, ch = _boundary_c_chi(orientation, params, mult)
    a = mult.a
    s, t = float(sigma), float(tau)
    n = 1.0 / (s * s + t * t)
    sgn = 1.0 if orientation == OUTER else -1.0
    beta1 = sgn * n * np.array([[-t * t * c * ch - s * t * a, s * t * c * ch + s * s * a],
                                [t * t * a - s * t * c, -s * t * a + s * s * c]])
    beta2 = sgn * n * np.array([[-s * s * c * ch + s * t * a, -s * t * c * ch + t * t * a],
                                [s * s * a + s * t * c, s * t * a + t * t * c]])
    beta = boundary_beta(orientation, params, mult)
    return BoundaryOperators(beta=beta, beta1=beta1, beta2=beta2, mu=beta1 - beta2,
                             n_factor=n, orientation=orientation)


def boundary_split(orientation: str, params: DomainParams, mult: MultiplierParams,
                   bspec: BoundarySpec = None, phi: float = 0.0) -> BoundaryOperators:
    """Splitting at a boundary point; the inner boundary always uses (sigma, tau) = (1, 0)."""
    if orientation == INNER:
        s, t = 1.0, 0.0
    else:
        if bspec is None:
            raise ValueError("outer splitting needs a BoundarySpec")
        s, t = float(bspec.sigma(phi)), float(bspec.tau(phi))
    ops = split_from_values(orientation, s, t, params, mult)
    rb, c, ch = _boundary_c_chi(orientation, params, mult)
    w = np.array([t * mult.a - s * c * ch, s * mult.a + t * c])
    if np.hypot(w[0], w[1]) < 1e-14 * max(1.0, abs(mult.a), abs(c)):
        raise SplitDegenerateError(
            f"rank-one factor vanished at {orientation} boundary (phi={phi:g})"
        )
    return ops


def rank_one_factor(ops: BoundaryOperators, params: DomainParams, mult: MultiplierParams,
                    sigma: float, tau: float):
    """Vector w with beta2 u = +/- N (sigma u1 + tau u2) w; used by identity tests."""
    rb, c, ch = _boundary_c_chi(ops.orientation, params, mult)
    return np.array([tau * mult.a - sigma * c * ch, sigma * mult.a + tau * c])


def admissibility_margin(orientation: str, params: DomainParams, mult: MultiplierParams,
                         bspec: BoundarySpec = None, n_phi_samples: int = 720,
                         tol_psd: float = TOL_PSD):
    """Smallest eigenvalue of (mu + mu*)/2 over phi samples; admissible iff >= -tol_psd."""
    if orientation == INNER:
        mu = symmetrized_mu(INNER, 1.0, 0.0, params, mult)
        lo, _ = eig2_symmetric(mu)
        return float(lo)
    phi = np.arange(n_phi_samples) * (2 * np.pi / n_phi_samples)
    mu = symmetrized_mu(OUTER, bspec.sigma(phi), bspec.tau(phi), params, mult)
    lo, _ = eig2_symmetric(mu)
    return float(lo.min())


class DecompositionResult(NamedTuple):
    ok: bool
    cross_det: float


def nullspace_decomposition_check(ops: BoundaryOperators,
                                  tol: float = 1e-8) -> DecompositionResult:
    """Verify null(beta1) and null(beta2) are lines spanning the state space.

    Each factor must have numerical rank one (singular-value gap) and the two
    null directions must be transverse: |det[n1 n2]| >= tol for the unit
    direction vectors.  Every v then decomposes as v1 + v2 with
    beta2 v1 = beta1 v2 = 0.
    """
    dirs = []
    for b in (ops.beta1, ops.beta2):
        _, sv, vt = np.linalg.svd(b)
        scale = max(sv[0], 1e-300)
        if sv[0] < 1e-14 or sv[1] / scale > 1e-10:
            return DecompositionResult(False, 0.0)
        dirs.append(vt[1])
    cross = float(abs(dirs[0][0] * dirs[1][1] - dirs[0][1] * dirs[1][0]))
    return DecompositionResult(cross >= tol, cross)


@dataclass(frozen=True)
class TrialField:
    """Smooth trial field with closed-form first partials, for energy tests."""

    u1: Callable
    u2: Callable
    du1_dr: Callable
    du1_dphi: Callable
    du2_dr: Callable
    du2_dphi: Callable


def trial_from_psi(psi_r, psi_phi, psi_rr, psi_rphi, psi_phiphi) -> TrialField:
    """Trial field u = (d_phi Psi, r d_r Psi) built from closed-form derivatives."""
    return TrialField(
        u1=lambda r, p: psi_phi(r, p),
        u2=lambda r, p: r * psi_r(r, p),
        du1_dr=lambda r, p: psi_rphi(r, p),
        du1_dphi=lambda r, p: psi_phiphi(r, p),
        du2_dr=lambda r, p: psi_r(r, p) + r * psi_rr(r, p),
        du2_dphi=lambda r, p: r * psi_rphi(r, p),
    )


def sommerfeld_trial(m: int, params: DomainParams, bspec: BoundarySpec) -> TrialField:
    """Trial field with nonzero outer data satisfying sigma u1 + tau u2 = 0 exactly.

    Psi = (r-eps)^2 [ g(r) cos(m phi) + v(r) sin(m phi) ] with g'(R) = 0,
    v(R) = 0 and v'(R) tuned so the mixed condition cancels mode by mode.
    Requires constant sigma, tau.
    """
    if not bspec.is_constant():
        raise ValueError("sommerfeld_trial needs constant sigma, tau")
    s = float(bspec.sigma(0.0))
    t = float(bspec.tau(0.0))
    eps, rr = params.epsilon, params.big_r
    gam = -2.0 / (rr - eps)
    dlt = s * m / (t * rr)

    def g(r):
        return (r - eps) ** 2 * (1.0 + gam * (r - rr))

    def g1(r):
        return 2.0 * (r - eps) * (1.0 + gam * (r - rr)) + gam * (r - eps) ** 2

    def g2(r):
        return 2.0 * (1.0 + gam * (r - rr)) + 4.0 * gam * (r - eps)

    def v(r):
        return dlt * (r - eps) ** 2 * (r - rr)

    def v1(r):
        return dlt * (2.0 * (r - eps) * (r - rr) + (r - eps) ** 2)

    def v2(r):
        return dlt * (2.0 * (r - rr) + 4.0 * (r - eps))

    def psi_r(r, p):
        return g1(r) * np.cos(m * p) + v1(r) * np.sin(m * p)

    def psi_phi(r, p):
        return m * (-g(r) * np.sin(m * p) + v(r) * np.cos(m * p))

    def psi_rr(r, p):
        return g2(r) * np.cos(m * p) + v2(r) * np.sin(m * p)

    def psi_rphi(r, p):
        return m * (-g1(r) * np.sin(m * p) + v1(r) * np.cos(m * p))

    def psi_phiphi(r, p):
        return -m * m * (g(r) * np.cos(m * p) + v(r) * np.sin(m * p))

    return trial_from_psi(psi_r, psi_phi, psi_rr, psi_rphi, psi_phiphi)


class EnergyCheck(NamedTuple):
    lhs: float
    rhs: float
    tol: float
    passed: bool


def energy_quadrature_check(trial: TrialField, grid: Grid, params: DomainParams,
                            mult: MultiplierParams, bspec: BoundarySpec,
                            kappa: float = None) -> EnergyCheck:
    """Quadrature test of the coercivity bound int (u, A^a d_a u) w >= kappa ||u||^2.

    The trial field must satisfy u1 = 0 at r = eps and sigma u1 + tau u2 = 0
    at r = R (checked to 1e-12 of the field scale); the bound then follows
    from positivity plus the non-negative boundary flux.  lhs and rhs use
    trapezoid (r) x rectangle (phi) quadrature; the pass tolerance scales
    with h^2 times the size of the integrand.
    """
    rr, pp = grid.meshgrid()
    u1 = np.asarray(trial.u1(rr, pp), dtype=float)
    u2 = np.asarray(trial.u2(rr, pp), dtype=float)
    scale = max(1.0, np.abs(u1).max(), np.abs(u2).max())
    if np.abs(u1[0]).max() > 1e-12 * scale:
        raise ValueError("trial field violates u1 = 0 at the inner boundary")
    combo = bspec.sigma(grid.phi_nodes) * u1[-1] + bspec.tau(grid.phi_nodes) * u2[-1]
    if np.abs(combo).max() > 1e-12 * scale:
        raise ValueError("trial field violates sigma u1 + tau u2 = 0 at the outer boundary")

    c = c_of_r(rr, params, mult)
    ch = chi(rr, params)
    a = mult.a
    d1r = trial.du1_dr(rr, pp)
    d2r = trial.du2_dr(rr, pp)
    d1p = trial.du1_dphi(rr, pp)
    d2p = trial.du2_dphi(rr, pp)
    # v = A^r d_r u + A^phi d_phi u, with the 1/r and 1/r^2 factors explicit
    v1 = (-c * ch * d1r + a * d2r) / rr + (a * ch * d1p + c * ch * d2p) / rr**2
    v2 = (a * d1r + c * d2r) / rr + (c * ch * d1p - a * d2p) / rr**2
    w = grid.node_weights()
    lhs = float(np.sum(w * (u1 * v1 + u2 * v2)))
    norm_sq = float(np.sum(w * (u1**2 + u2**2)))
    if kappa is None:
        kappa = positivity_kappa(params, mult)
    rhs = kappa * norm_sq
    tol = 10.0 * (grid.h_r**2 + grid.h_phi**2) * (
        float(np.sum(w * np.abs(u1 * v1 + u2 * v2))) + abs(rhs)
    )
    return EnergyCheck(lhs=lhs, rhs=rhs, tol=tol, passed=lhs >= rhs - tol)


@dataclass(frozen=True)
class Certificate:
    """Outcome of the full system certificate; to_json() matches the CLI report."""

    positivity_min_eig: float
    positivity_rel_margin: float
    nondeg_min_abs_det: float
    inner_mu_min_eig: float
    outer_mu_min_eig: float
    decomposition_ok: bool
    admissible: bool
    chosen_a: float
    chosen_alpha: float
    first_failure: Optional[str]

    def to_json(self) -> dict:
        return {
            "positivity_min_eig": self.positivity_min_eig,
            "nondeg_min_abs_det": self.nondeg_min_abs_det,
            "inner_mu_min_eig": self.inner_mu_min_eig,
            "outer_mu_min_eig": self.outer_mu_min_eig,
            "decomposition_ok": self.decomposition_ok,
            "admissible": self.admissible,
            "chosen_a": self.chosen_a,
            "chosen_alpha": self.chosen_alpha,
        }


def certify(params: DomainParams, mult: MultiplierParams, bspec: BoundarySpec,
            margin: float = 0.1, tol_psd: float = TOL_PSD, n_scan: int = 2048,
            n_phi_samples: int = 720) -> Certificate:
    """Run every check needed before a solve and collect the results."""
    pos_min, pos_margin = positivity_scan(params, mult, n_scan)
    nondeg = nondegeneracy_margin(params, mult, n_scan)
    inner_eig = admissibility_margin(INNER, params, mult)
    outer_eig = admissibility_margin(OUTER, params, mult, bspec, n_phi_samples, tol_psd)
    phi_probe = np.arange(16) * (2 * np.pi / 16)
    try:
        decomp = bool(
            all(
                nullspace_decomposition_check(boundary_split(OUTER, params, mult, bspec, p)).ok
                for p in phi_probe
            ) and nullspace_decomposition_check(boundary_split(INNER, params, mult)).ok
        )
    except SplitDegenerateError:
        decomp = False

    checks = [
        ("positivity", pos_min > 0.0),
        ("nondegeneracy", nondeg >= margin * mult.a**2),
        ("inner_admissibility", inner_eig >= -tol_psd),
        ("outer_admissibility", outer_eig >= -tol_psd),
        ("decomposition", decomp),
    ]
    first_failure = next((name for name, ok in checks if not ok), None)
    return Certificate(
        positivity_min_eig=pos_min,
        positivity_rel_margin=pos_margin,
        nondeg_min_abs_det=nondeg,
        inner_mu_min_eig=inner_eig,
        outer_mu_min_eig=outer_eig,
        decomposition_ok=decomp,
        admissible=first_failure is None,
        chosen_a=mult.a,
        chosen_alpha=mult.alpha,
        first_failure=first_failure,
    )
