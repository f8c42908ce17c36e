"""helixwave: the helically reduced wave equation as a certified boundary value problem.

The reduced operator on an annulus changes type across the light circle
r = 1/omega.  This package builds the first-order symmetrized form whose
coefficient matrices make the problem provably well posed, certifies the
required positivity and boundary-admissibility conditions numerically, and
solves the equation with two independent discretizations (a Fourier-mode
tridiagonal solver and a 2D first-order least-squares solver) verified
against manufactured solutions.
"""

from .certify import (Certificate, CertificationError, EnergyCheck, admissibility_margin,
                      boundary_beta, boundary_split, certify, energy_quadrature_check,
                      nullspace_decomposition_check, sommerfeld_trial, trial_from_psi)
from .domain import (BoundarySpec, ConstFn, DomainParams, FourierFn, Grid, PointType,
                     build_grid, chi, classify_point, sommerfeld_spec)
from .fields import GridField, grid_l2, reconstruct_psi
from .fosls import SolverConvergenceError, residual_norm, solve_fosls
from .mms import (CATALOG_LABELS, MmsEntry, catalog, convergence_study, error_norms,
                  mms_manufacture, solve_mms)
from .modes import (ModeSolveError, oracle_mode_solve, oracle_order_estimate, solve_modes)
from .shift import ShiftData, apply_shift, lambda_shift_build
from .system import (MultiplierParams, ParameterSearchError, PointMatrices, assemble_point,
                     assemble_source, c_of_r, choose_parameters, dc_dr, dcchi_dr, det_L,
                     matrix_L, positivity_kappa)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "CATALOG_LABELS", "Certificate", "CertificationError", "ConstFn",
    "DomainParams", "EnergyCheck", "FourierFn", "Grid", "GridField", "MmsEntry",
    "ModeSolveError", "MultiplierParams", "ParameterSearchError", "PointMatrices",
    "PointType", "ShiftData", "SolverConvergenceError", "admissibility_margin",
    "apply_shift", "assemble_point", "assemble_source", "boundary_beta", "boundary_split",
    "build_grid", "c_of_r", "catalog", "certify", "chi", "choose_parameters",
    "classify_point", "convergence_study", "dc_dr", "dcchi_dr", "det_L",
    "energy_quadrature_check", "error_norms", "grid_l2", "lambda_shift_build", "matrix_L",
    "mms_manufacture", "nullspace_decomposition_check", "oracle_mode_solve",
    "oracle_order_estimate", "positivity_kappa", "reconstruct_psi", "residual_norm",
    "solve_fosls", "solve_mms", "solve_modes", "sommerfeld_spec", "sommerfeld_trial",
    "trial_from_psi",
]
