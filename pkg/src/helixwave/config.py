"""JSON run configuration: strict parsing with field-path error messages.

Unknown keys are rejected everywhere so that a typo in a boundary function
spec cannot silently fall back to a default.  Boundary functions serialize
as {"const": x} or {"fourier": {"cos": [...], "sin": [...]}}.
"""

import json
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .domain import (BoundaryFn, BoundarySpec, ConstFn, DomainParams, FourierFn, Grid,
                     build_grid, sommerfeld_spec)
from .mms import CATALOG_LABELS
from .system import MultiplierParams

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Tolerances:
    tol_psd: float = 1e-10
    margin: float = 0.1
    tol_zero: float = 1e-12
    oracle_intervals: int = 16384
    cg_tol: float = 1e-10
    cg_maxiter: int = 10000
    phi_samples: int = 720
    scan_points: int = 2048


@dataclass(frozen=True)
class SourceSpec:
    """Normalized source: kind is 'zero', 'gaussians', or 'mms'."""

    kind: str
    gaussians: tuple = ()
    mms_label: str = ""

    def callable(self):
        """Evaluator f(r, phi) for the zero and gaussians kinds."""
        if self.kind == "zero":
            return lambda r, phi: np.zeros_like(np.asarray(r, dtype=float))
        if self.kind == "gaussians":
            bumps = self.gaussians

            def f(r, phi):
                r = np.asarray(r, dtype=float)
                out = np.zeros_like(r)
                for g in bumps:
                    d2 = r**2 + g["r0"] ** 2 - 2.0 * r * g["r0"] * np.cos(phi - g["phi0"])
                    out += g["amplitude"] * np.exp(-d2 / (2.0 * g["width"] ** 2))
                return out

            return f
        raise ConfigError("source", "mms sources are resolved via the catalog, not callable()")


@dataclass(frozen=True)
class RunConfig:
    domain: DomainParams
    boundary: BoundarySpec
    source: SourceSpec
    grid_spec: tuple
    multiplier: Optional[MultiplierParams] = None  # None means auto
    solver: str = "modes"
    tolerances: Tolerances = field(default_factory=Tolerances)

    def grid(self) -> Grid:
        return build_grid(self.domain, *self.grid_spec)


def _expect_mapping(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected an object, got {type(obj).__name__}")
    return obj


def _check_keys(obj, path, required, optional=()):
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(path, f"unknown keys {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(path, f"missing keys {sorted(missing)}")


def _number(obj, path, positive=False):
    if not isinstance(obj, (int, float)) or isinstance(obj, bool) or not np.isfinite(obj):
        raise ConfigError(path, f"expected a finite number, got {obj!r}")
    if positive and not obj > 0:
        raise ConfigError(path, f"expected a positive number, got {obj!r}")
    return float(obj)


def _integer(obj, path):
    if not isinstance(obj, int) or isinstance(obj, bool):
        raise ConfigError(path, f"expected an integer, got {obj!r}")
    return obj


def _boundary_fn(obj, path) -> BoundaryFn:
    obj = _expect_mapping(obj, path)
    if set(obj) == {"const"}:
        return ConstFn(_number(obj["const"], f"{path}.const"))
    if set(obj) == {"fourier"}:
        four = _expect_mapping(obj["fourier"], f"{path}.fourier")
        _check_keys(four, f"{path}.fourier", required=(), optional=("cos", "sin"))
        cos = four.get("cos", [])
        sin = four.get("sin", [])
        for name, seq in (("cos", cos), ("sin", sin)):
            if not isinstance(seq, list):
                raise ConfigError(f"{path}.fourier.{name}", "expected a list of numbers")
            for idx, v in enumerate(seq):
                _number(v, f"{path}.fourier.{name}[{idx}]")
        return FourierFn(cos=cos, sin=sin)
    raise ConfigError(path, 'expected {"const": x} or {"fourier": {...}}')


def _parse_domain(obj, path) -> DomainParams:
    obj = _expect_mapping(obj, path)
    _check_keys(obj, path, required=("omega", "epsilon", "big_r"))
    try:
        return DomainParams(
            omega=_number(obj["omega"], f"{path}.omega", positive=True),
            epsilon=_number(obj["epsilon"], f"{path}.epsilon", positive=True),
            big_r=_number(obj["big_r"], f"{path}.big_r", positive=True),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_boundary(obj, path, params) -> BoundarySpec:
    if obj == "sommerfeld+":
        return sommerfeld_spec(params, "+")
    if obj == "sommerfeld-":
        return sommerfeld_spec(params, "-")
    obj = _expect_mapping(obj, path)
    _check_keys(obj, path, required=("sigma", "tau"), optional=("inner_k", "outer_l"))
    kwargs = {
        "sigma": _boundary_fn(obj["sigma"], f"{path}.sigma"),
        "tau": _boundary_fn(obj["tau"], f"{path}.tau"),
    }
    for key in ("inner_k", "outer_l"):
        if key in obj:
            kwargs[key] = _boundary_fn(obj[key], f"{path}.{key}")
    try:
        return BoundarySpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_source(obj, path) -> SourceSpec:
    obj = _expect_mapping(obj, path)
    if list(obj) == ["zero"]:
        if obj["zero"] not in ({}, True, None):
            raise ConfigError(f"{path}.zero", "expected {} (no options)")
        return SourceSpec(kind="zero")
    if list(obj) == ["mms"]:
        label = obj["mms"]
        if label not in CATALOG_LABELS:
            raise ConfigError(f"{path}.mms",
                              f"unknown entry {label!r}; available: {list(CATALOG_LABELS)}")
        return SourceSpec(kind="mms", mms_label=label)
    if list(obj) == ["gaussians"]:
        items = obj["gaussians"]
        if not isinstance(items, list) or not items:
            raise ConfigError(f"{path}.gaussians", "expected a non-empty list")
        bumps = []
        for idx, item in enumerate(items):
            p = f"{path}.gaussians[{idx}]"
            item = _expect_mapping(item, p)
            _check_keys(item, p, required=("r0", "phi0", "amplitude", "width"))
            bumps.append({
                "r0": _number(item["r0"], f"{p}.r0", positive=True),
                "phi0": _number(item["phi0"], f"{p}.phi0"),
                "amplitude": _number(item["amplitude"], f"{p}.amplitude"),
                "width": _number(item["width"], f"{p}.width", positive=True),
            })
        return SourceSpec(kind="gaussians", gaussians=tuple(bumps))
    raise ConfigError(path, 'expected exactly one of "zero", "gaussians", "mms"')


def _parse_multiplier(obj, path) -> Optional[MultiplierParams]:
    if obj == "auto":
        return None
    obj = _expect_mapping(obj, path)
    _check_keys(obj, path, required=("a", "alpha"))
    try:
        return MultiplierParams(a=_number(obj["a"], f"{path}.a"),
                                alpha=_number(obj["alpha"], f"{path}.alpha"))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_grid(obj, path, params) -> tuple:
    obj = _expect_mapping(obj, path)
    _check_keys(obj, path, required=("n_r", "n_phi"))
    n_r = _integer(obj["n_r"], f"{path}.n_r")
    n_phi = _integer(obj["n_phi"], f"{path}.n_phi")
    try:
        build_grid(params, n_r, n_phi)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    return (n_r, n_phi)


def _parse_tolerances(obj, path) -> Tolerances:
    obj = _expect_mapping(obj, path)
    defaults = Tolerances()
    _check_keys(obj, path, required=(), optional=tuple(vars(defaults)))
    overrides = {}
    for key, value in obj.items():
        if isinstance(getattr(defaults, key), int):
            overrides[key] = _integer(value, f"{path}.{key}")
        else:
            overrides[key] = _number(value, f"{path}.{key}", positive=True)
    return replace(defaults, **overrides)


def parse_config(path) -> RunConfig:
    """Load, validate, and normalize a run configuration file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc

    raw = _expect_mapping(raw, "<root>")
    _check_keys(raw, "<root>", required=("schema", "domain", "boundary", "source", "grid"),
                optional=("multiplier", "solver", "tolerances"))
    if raw["schema"] != SCHEMA_VERSION:
        raise ConfigError("schema", f"unsupported version {raw['schema']!r}, "
                                    f"expected {SCHEMA_VERSION}")
    domain = _parse_domain(raw["domain"], "domain")
    boundary = _parse_boundary(raw["boundary"], "boundary", domain)
    source = _parse_source(raw["source"], "source")
    grid_spec = _parse_grid(raw["grid"], "grid", domain)
    multiplier = _parse_multiplier(raw.get("multiplier", "auto"), "multiplier")
    solver = raw.get("solver", "modes")
    if solver not in ("modes", "fosls"):
        raise ConfigError("solver", f"expected 'modes' or 'fosls', got {solver!r}")
    tolerances = _parse_tolerances(raw.get("tolerances", {}), "tolerances")
    return RunConfig(domain=domain, boundary=boundary, source=source, grid_spec=grid_spec,
                     multiplier=multiplier, solver=solver, tolerances=tolerances)
