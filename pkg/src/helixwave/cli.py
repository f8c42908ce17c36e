"""Command line driver: verify / solve / mms / compare.

Exit codes: 0 success, 2 validation error, 3 certification failure,
4 solver failure.  Every run certifies the multiplier before touching the
solvers; no output is produced for an inadmissible configuration.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .certify import CertificationError, certify
from .config import ConfigError, RunConfig, parse_config
from .fields import grid_l2
from .fosls import SolverConvergenceError, residual_norm, solve_fosls
from .mms import catalog, convergence_study, error_norms, solve_mms
from .modes import ModeSolveError, solve_modes
from .system import ParameterSearchError, choose_parameters

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CERTIFICATION = 3
EXIT_SOLVER = 4


def _resolve_multiplier(cfg: RunConfig):
    if cfg.multiplier is not None:
        return cfg.multiplier
    tol = cfg.tolerances
    return choose_parameters(cfg.domain, cfg.boundary, margin=tol.margin,
                             n_scan=tol.scan_points, n_phi_samples=tol.phi_samples)


def _certificate(cfg: RunConfig, mult):
    tol = cfg.tolerances
    return certify(cfg.domain, mult, cfg.boundary, margin=tol.margin,
                   tol_psd=tol.tol_psd, n_scan=tol.scan_points,
                   n_phi_samples=tol.phi_samples)


def _emit(report: dict, as_json: bool):
    if as_json:
        print(json.dumps(report, sort_keys=True))
    else:
        for key, value in report.items():
            print(f"{key}: {value}")


def cmd_verify(cfg: RunConfig, args) -> int:
    mult = _resolve_multiplier(cfg)
    cert = _certificate(cfg, mult)
    _emit(cert.to_json(), args.json)
    if not cert.admissible:
        print(f"certification failed: {cert.first_failure}", file=sys.stderr)
        return EXIT_CERTIFICATION
    return EXIT_OK


def _write_csv(path, grid, field):
    cols = (field.u1, field.u2, field.psi, field.f)
    with open(path, "w") as fh:
        fh.write("r,phi,u1,u2,psi,f\n")
        for i, r in enumerate(grid.r_nodes):
            for j, phi in enumerate(grid.phi_nodes):
                row = [f"{r:.12g}", f"{phi:.12g}"]
                row += [f"{c[i, j]:.12g}" for c in cols]
                fh.write(",".join(row) + "\n")


def _solve_field(cfg: RunConfig, mult):
    grid = cfg.grid()
    info = {"objective": None}
    if cfg.source.kind == "mms":
        entry = catalog(cfg.domain)[cfg.source.mms_label]
        field = solve_mms(entry, cfg.solver, cfg.domain, cfg.boundary, grid, mult=mult)
    else:
        f = cfg.source.callable()
        if cfg.solver == "modes":
            field = solve_modes(cfg.domain, cfg.boundary, f, grid)
        else:
            field, info = solve_fosls(cfg.domain, mult, cfg.boundary, f, grid,
                                      margin=cfg.tolerances.margin,
                                      cg_tol=cfg.tolerances.cg_tol,
                                      cg_maxiter=cfg.tolerances.cg_maxiter)
    return grid, field, info


def cmd_solve(cfg: RunConfig, args) -> int:
    mult = _resolve_multiplier(cfg)
    cert = _certificate(cfg, mult)
    if not cert.admissible:
        print(f"certification failed: {cert.first_failure}", file=sys.stderr)
        return EXIT_CERTIFICATION
    started = time.perf_counter()
    grid, field, info = _solve_field(cfg, mult)
    wall = time.perf_counter() - started
    out = Path(args.out)
    _write_csv(out, grid, field)
    res1, res2 = residual_norm(field, cfg.domain, grid)
    meta = {
        "schema": 1,
        "solver": cfg.solver,
        "grid": {"n_r": grid.n_r, "n_phi": grid.n_phi},
        "objective": info.get("objective"),
        "residual_norms": [res1, res2],
        "wall_time_s": wall,
        "multiplier": {"a": mult.a, "alpha": mult.alpha},
        "fields_csv": out.name,
    }
    meta_path = out.with_suffix(".meta.json")
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    _emit(meta, args.json)
    return EXIT_OK


def cmd_mms(cfg: RunConfig, args) -> int:
    if cfg.source.kind != "mms":
        print("the mms command needs a config with an mms source", file=sys.stderr)
        return EXIT_VALIDATION
    mult = _resolve_multiplier(cfg)
    cert = _certificate(cfg, mult)
    if not cert.admissible:
        print(f"certification failed: {cert.first_failure}", file=sys.stderr)
        return EXIT_CERTIFICATION
    entry = catalog(cfg.domain)[cfg.source.mms_label]
    n_r, n_phi = cfg.grid_spec
    study = convergence_study(entry, cfg.solver, args.levels, cfg.domain, cfg.boundary,
                              base_nr=n_r, base_nphi=n_phi, mult=mult)
    if args.out:
        Path(args.out).write_text(study.to_csv())
    if args.json:
        rows = [{"h": r.h, "l2_err": r.l2_err, "h1_err": r.h1_err, "rate": r.rate,
                 "saturated": r.saturated} for r in study.rows]
        print(json.dumps({"entry": study.entry_label, "solver": study.solver,
                          "rows": rows}, sort_keys=True))
    else:
        print(study.pretty())
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    mult = _resolve_multiplier(cfg)
    cert = _certificate(cfg, mult)
    if not cert.admissible:
        print(f"certification failed: {cert.first_failure}", file=sys.stderr)
        return EXIT_CERTIFICATION
    if not cfg.boundary.is_constant():
        print("compare needs constant sigma, tau (mode solver restriction)", file=sys.stderr)
        return EXIT_VALIDATION
    grid = cfg.grid()
    fields = {}
    for solver in ("modes", "fosls"):
        sub = RunConfig(domain=cfg.domain, boundary=cfg.boundary, source=cfg.source,
                        grid_spec=cfg.grid_spec, multiplier=mult, solver=solver,
                        tolerances=cfg.tolerances)
        _, fields[solver], _ = _solve_field(sub, mult)
    discrepancy = grid_l2(fields["modes"].psi - fields["fosls"].psi, grid)

    mms_errors = {}
    for solver in ("modes", "fosls"):
        worst = 0.0
        for entry in catalog(cfg.domain).values():
            field = solve_mms(entry, solver, cfg.domain, cfg.boundary, grid, mult=mult)
            l2, _ = error_norms(field, entry, grid)
            worst = max(worst, l2)
        mms_errors[solver] = worst
    bound = max(mms_errors.values())
    report = {
        "l2_discrepancy": discrepancy,
        "modes_mms_err": mms_errors["modes"],
        "fosls_mms_err": mms_errors["fosls"],
        "within_mms_error": bool(discrepancy <= bound),
    }
    _emit(report, args.json)
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="helix",
        description="certify and solve the helically reduced wave equation on an annulus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "run the positivity/admissibility certificate"),
        ("solve", "solve and write fields as CSV"),
        ("mms", "manufactured-solution convergence study"),
        ("compare", "cross-check the mode and least-squares solvers"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to run config JSON")
        p.add_argument("--json", action="store_true", help="emit the report as JSON")
        if name == "solve":
            p.add_argument("--out", required=True, help="output CSV path")
        if name == "mms":
            p.add_argument("--levels", type=int, default=4)
            p.add_argument("--out", default=None, help="optional CSV path for the table")
    return parser


_COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "mms": cmd_mms, "compare": cmd_compare}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CertificationError, ParameterSearchError) as exc:
        print(f"certification error: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except (ModeSolveError, SolverConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
