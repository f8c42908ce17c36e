"""Reduction of inhomogeneous boundary data to a homogeneous problem.

Given boundary data Psi(eps, phi) = k(phi) and tau R d_r Psi + sigma d_phi Psi
= l(phi) at r = R, subtract a smooth lift

    Lambda(r, phi) = k(phi) p(r) + s(phi) q(r),      s = l / tau,

where p, q are the cubic Hermite profiles

    p(eps) = 1, p'(eps) = 0, p(R) = 0, p'(R) = 0,
    q(eps) = 0, q'(eps) = 0, q(R) = 0, q'(R) = 1/R.

Because p and q both vanish at R, d_phi Lambda(R, .) = 0, so the outer
condition evaluates to tau R s(phi)/R = l(phi) exactly; the inner value is
k(phi) exactly.  The shifted field Psi - Lambda then satisfies homogeneous
conditions with the modified source f - W[Lambda], where W is the reduced
wave operator.
"""

from dataclasses import dataclass

import numpy as np

from .domain import BoundaryFn, BoundarySpec, DomainParams, Grid, RatioFn, chi
from .fields import GridField


def _hermite_profiles(eps: float, rr: float):
    span = rr - eps

    def p(r):
        t = (r - eps) / span
        return 2.0 * t**3 - 3.0 * t**2 + 1.0

    def p1(r):
        t = (r - eps) / span
        return (6.0 * t**2 - 6.0 * t) / span

    def p2(r):
        t = (r - eps) / span
        return (12.0 * t - 6.0) / span**2

    cq = span / rr

    def q(r):
        t = (r - eps) / span
        return cq * (t**3 - t**2)

    def q1(r):
        t = (r - eps) / span
        return (3.0 * t**2 - 2.0 * t) / rr

    def q2(r):
        t = (r - eps) / span
        return (6.0 * t - 2.0) / (rr * span)

    return (p, p1, p2), (q, q1, q2)


@dataclass(frozen=True)
class ShiftData:
    """Closed-form lift Lambda and the pieces of the shifted source."""

    params: DomainParams
    k: BoundaryFn
    s: BoundaryFn
    _p: tuple
    _q: tuple

    def lambda_vals(self, r, phi):
        (p, _, _), (q, _, _) = self._p, self._q
        return self.k(phi) * p(np.asarray(r, float)) + self.s(phi) * q(np.asarray(r, float))

    def lambda_dr(self, r, phi):
        (_, p1, _), (_, q1, _) = self._p, self._q
        return self.k(phi) * p1(np.asarray(r, float)) + self.s(phi) * q1(np.asarray(r, float))

    def lambda_dphi(self, r, phi):
        (p, _, _), (q, _, _) = self._p, self._q
        return self.k.d1(phi) * p(np.asarray(r, float)) + self.s.d1(phi) * q(np.asarray(r, float))

    def lambda_laplacian_terms(self, r, phi):
        """W[Lambda] = Lambda_rr + Lambda_r/r + chi/r^2 Lambda_phiphi."""
        r = np.asarray(r, dtype=float)
        (p, p1, p2), (q, q1, q2) = self._p, self._q
        rad = self.k(phi) * (p2(r) + p1(r) / r) + self.s(phi) * (q2(r) + q1(r) / r)
        ang = self.k.d2(phi) * p(r) + self.s.d2(phi) * q(r)
        return rad + chi(r, self.params) / r**2 * ang

    def shifted_source(self, f):
        """Callable for f - W[Lambda] given a callable f(r, phi)."""
        return lambda r, phi: f(r, phi) - self.lambda_laplacian_terms(r, phi)


def lambda_shift_build(bspec: BoundarySpec, params: DomainParams) -> ShiftData:
    """Construct the lift for the data (k, l) carried by a BoundarySpec."""
    n = 720
    phi = np.arange(n) * (2 * np.pi / n)
    tau_vals = np.asarray(bspec.tau(phi))
    if np.min(np.abs(tau_vals)) < 1e-8:
        raise ValueError("tau is too close to zero somewhere; cannot build the lift")
    pq = _hermite_profiles(params.epsilon, params.big_r)
    s = RatioFn(bspec.outer_l, bspec.tau)
    return ShiftData(params=params, k=bspec.inner_k, s=s, _p=pq[0], _q=pq[1])


def apply_shift(field: GridField, shift: ShiftData, grid: Grid) -> GridField:
    """Add the lift back: the returned field carries the inhomogeneous data."""
    rr, pp = grid.meshgrid()
    return GridField(
        u1=field.u1 + shift.lambda_dphi(rr, pp),
        u2=field.u2 + rr * shift.lambda_dr(rr, pp),
        psi=field.psi + shift.lambda_vals(rr, pp),
        f=field.f,
    )
