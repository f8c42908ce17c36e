"""Manufactured solutions, error norms, and convergence studies.

Each catalog entry is a closed-form Psi on the annulus; applying the reduced
wave operator produces its source, and evaluating the boundary expressions
produces the inhomogeneous data (k, l).  Solvers then run through the
lift-and-shift pipeline and are measured against the exact field in the
discrete L2 norm (weight r dr dphi) and the H1 seminorm

    |Psi|_1^2 = int [ (d_r Psi)^2 + (d_phi Psi)^2 / r^2 ] r dr dphi,

evaluated from u2/r and u1.  All catalog entries vanish at the inner circle
and carry phi structure through both the elliptic and hyperbolic regions.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .domain import BoundarySpec, DomainParams, Grid, build_grid, chi, fourier_fit
from .fields import GridField, grid_l2, sample_source
from .fosls import solve_fosls
from .modes import solve_modes
from .shift import apply_shift, lambda_shift_build
from .system import MultiplierParams, choose_parameters

CATALOG_LABELS = ("quad_radial", "quad_sin2", "sine_cos3")


@dataclass(frozen=True)
class MmsEntry:
    """Closed-form solution with the derivatives the operator needs."""

    label: str
    psi: Callable
    dpsi_dr: Callable
    dpsi_dphi: Callable
    d2psi_dr2: Callable
    d2psi_dphi2: Callable


def catalog(params: DomainParams) -> dict:
    """The stock entries, instantiated for a concrete annulus."""
    eps, rr = params.epsilon, params.big_r
    span = rr - eps
    w = np.pi / span

    entries = [
        MmsEntry(
            label="quad_radial",
            psi=lambda r, p: (r - eps) ** 2 + 0.0 * p,
            dpsi_dr=lambda r, p: 2.0 * (r - eps) + 0.0 * p,
            dpsi_dphi=lambda r, p: 0.0 * r + 0.0 * p,
            d2psi_dr2=lambda r, p: 2.0 + 0.0 * r + 0.0 * p,
            d2psi_dphi2=lambda r, p: 0.0 * r + 0.0 * p,
        ),
        MmsEntry(
            label="quad_sin2",
            psi=lambda r, p: (r - eps) ** 2 * np.sin(2 * p),
            dpsi_dr=lambda r, p: 2.0 * (r - eps) * np.sin(2 * p),
            dpsi_dphi=lambda r, p: 2.0 * (r - eps) ** 2 * np.cos(2 * p),
            d2psi_dr2=lambda r, p: 2.0 * np.sin(2 * p) + 0.0 * r,
            d2psi_dphi2=lambda r, p: -4.0 * (r - eps) ** 2 * np.sin(2 * p),
        ),
        MmsEntry(
            label="sine_cos3",
            psi=lambda r, p: np.sin(w * (r - eps)) * np.cos(3 * p),
            dpsi_dr=lambda r, p: w * np.cos(w * (r - eps)) * np.cos(3 * p),
            dpsi_dphi=lambda r, p: -3.0 * np.sin(w * (r - eps)) * np.sin(3 * p),
            d2psi_dr2=lambda r, p: -(w**2) * np.sin(w * (r - eps)) * np.cos(3 * p),
            d2psi_dphi2=lambda r, p: -9.0 * np.sin(w * (r - eps)) * np.cos(3 * p),
        ),
    ]
    return {e.label: e for e in entries}


def mms_manufacture(entry: MmsEntry, params: DomainParams, bspec: BoundarySpec):
    """Source and boundary data that make the entry the exact solution.

    Returns (f, k, l): f is a callable f(r, phi); k and l come back as
    truncated Fourier series fitted from the (band-limited) boundary traces,
    so the lift construction can differentiate them in closed form.
    """

    def f(r, phi):
        r = np.asarray(r, dtype=float)
        return (entry.d2psi_dr2(r, phi) + entry.dpsi_dr(r, phi) / r
                + chi(r, params) / r**2 * entry.d2psi_dphi2(r, phi))

    eps, rr = params.epsilon, params.big_r
    k = fourier_fit(lambda p: entry.psi(np.full_like(p, eps), p))
    l = fourier_fit(
        lambda p: (np.asarray(bspec.tau(p)) * rr * entry.dpsi_dr(np.full_like(p, rr), p)
                   + np.asarray(bspec.sigma(p)) * entry.dpsi_dphi(np.full_like(p, rr), p))
    )
    return f, k, l


def exact_field(entry: MmsEntry, grid: Grid) -> GridField:
    """The entry sampled into a GridField through u1 = d_phi Psi, u2 = r d_r Psi."""
    rr, pp = grid.meshgrid()
    return GridField(
        u1=np.asarray(entry.dpsi_dphi(rr, pp), dtype=float),
        u2=rr * np.asarray(entry.dpsi_dr(rr, pp), dtype=float),
        psi=np.asarray(entry.psi(rr, pp), dtype=float),
        f=np.zeros_like(rr),
    )


def error_norms(field: GridField, entry: MmsEntry, grid: Grid):
    """(L2 error of Psi, H1 seminorm error of the gradient pair)."""
    rr, pp = grid.meshgrid()
    l2 = grid_l2(field.psi - entry.psi(rr, pp), grid)
    dr_err = field.u2 / rr - entry.dpsi_dr(rr, pp)
    dp_err = field.u1 - entry.dpsi_dphi(rr, pp)
    w = grid.node_weights()
    h1 = float(np.sqrt(np.sum(w * (dr_err**2 + dp_err**2 / rr**2))))
    return l2, h1


def solve_mms(entry: MmsEntry, solver_choice: str, params: DomainParams,
              bspec: BoundarySpec, grid: Grid,
              mult: Optional[MultiplierParams] = None) -> GridField:
    """Run a solver against a catalog entry through the lift pipeline."""
    if solver_choice == "exact":
        field = exact_field(entry, grid)
        f, _, _ = mms_manufacture(entry, params, bspec)
        field.f = sample_source(f, grid)
        return field
    f, k, l = mms_manufacture(entry, params, bspec)
    bspec_kl = BoundarySpec(sigma=bspec.sigma, tau=bspec.tau, inner_k=k, outer_l=l)
    shift = lambda_shift_build(bspec_kl, params)
    f_shifted = shift.shifted_source(f)
    if solver_choice == "modes":
        hom = solve_modes(params, bspec, f_shifted, grid)
    elif solver_choice == "fosls":
        if mult is None:
            mult = choose_parameters(params, bspec)
        hom, _ = solve_fosls(params, mult, bspec, f_shifted, grid)
    else:
        raise ValueError(f"unknown solver {solver_choice!r}")
    field = apply_shift(hom, shift, grid)
    field.f = sample_source(f, grid)
    return field


@dataclass(frozen=True)
class StudyRow:
    h: float
    l2_err: float
    h1_err: float
    rate: Optional[float]
    saturated: bool


@dataclass(frozen=True)
class StudyResult:
    entry_label: str
    solver: str
    rows: tuple

    def rates(self):
        return [row.rate for row in self.rows if row.rate is not None]

    def to_csv(self) -> str:
        lines = ["h,l2_err,h1_err,rate"]
        for row in self.rows:
            if row.saturated:
                rate = "saturated"
            elif row.rate is None:
                rate = ""
            else:
                rate = f"{row.rate:.6g}"
            lines.append(f"{row.h:.12g},{row.l2_err:.12g},{row.h1_err:.12g},{rate}")
        return "\n".join(lines) + "\n"

    def pretty(self) -> str:
        lines = [f"{self.entry_label} / {self.solver}",
                 f"{'h':>12} {'L2 error':>14} {'H1 error':>14} {'rate':>10}"]
        for row in self.rows:
            if row.saturated:
                rate = "saturated"
            elif row.rate is None:
                rate = "-"
            else:
                rate = f"{row.rate:.3f}"
            lines.append(f"{row.h:12.5g} {row.l2_err:14.5e} {row.h1_err:14.5e} {rate:>10}")
        return "\n".join(lines)


def convergence_study(entry: MmsEntry, solver_choice: str, levels: int,
                      params: DomainParams, bspec: BoundarySpec,
                      base_nr: int = 17, base_nphi: int = 16,
                      mult: Optional[MultiplierParams] = None) -> StudyResult:
    """Doubling refinement study; observed rate is log2 of consecutive L2 errors.

    Errors at the round-off floor are flagged saturated instead of producing
    a meaningless rate.
    """
    if levels < 3:
        raise ValueError(f"need at least 3 levels, got {levels}")
    if solver_choice == "fosls" and mult is None:
        mult = choose_parameters(params, bspec)
    rr, pp = build_grid(params, base_nr, base_nphi).meshgrid()
    scale = 1.0 + float(np.abs(entry.psi(rr, pp)).max())
    rows = []
    prev_l2 = None
    for lvl in range(levels):
        n_r = (base_nr - 1) * 2**lvl + 1
        n_phi = base_nphi * 2**lvl
        grid = build_grid(params, n_r, n_phi)
        field = solve_mms(entry, solver_choice, params, bspec, grid, mult=mult)
        l2, h1 = error_norms(field, entry, grid)
        saturated = l2 < 1e-12 * scale
        rate = None
        if prev_l2 is not None and not saturated and l2 > 0:
            rate = float(np.log2(prev_l2 / l2))
        rows.append(StudyRow(h=grid.h_r, l2_err=l2, h1_err=h1, rate=rate,
                             saturated=saturated))
        prev_l2 = l2
    return StudyResult(entry_label=entry.label, solver=solver_choice, rows=tuple(rows))
