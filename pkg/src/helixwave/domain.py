"""Annulus geometry, type classification, and boundary data.

The working domain is the annulus eps <= r <= R carrying the reduced wave
operator

    (1/r) d_r(r d_r Psi) + chi(r)/r^2 d_phi^2 Psi = f,   chi(r) = 1 - W^2 r^2,

for a rotation rate W > 0.  The operator is elliptic inside the light circle
r = 1/W and hyperbolic outside it.  Boundary data are a Dirichlet value k(phi)
at r = eps and the mixed outer condition

    tau(phi) R d_r Psi(R, phi) + sigma(phi) d_phi Psi(R, phi) = l(phi),

with sigma*tau nowhere zero.  sigma, tau, k, l are smooth periodic functions
supplied as constants or truncated Fourier series so that all derivatives are
available in closed form.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

TOL_ZERO = 1e-12
_SIGN_SAMPLES = 720


class PointType(Enum):
    ELLIPTIC = "elliptic"
    LIGHT_CIRCLE = "light_circle"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class DomainParams:
    """Annulus geometry and angular velocity.

    The inner radius must sit strictly inside the light circle r = 1/omega;
    the construction of the positive multiplier depends on it.
    """

    omega: float
    epsilon: float
    big_r: float

    def __post_init__(self):
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise ValueError(f"omega must be positive and finite, got {self.omega}")
        if not (0 < self.epsilon < 1.0 / self.omega):
            raise ValueError(
                f"epsilon={self.epsilon} must lie in (0, 1/omega)={1.0 / self.omega:g}: "
                "the inner boundary has to stay inside the light circle"
            )
        if not self.epsilon < self.big_r:
            raise ValueError(f"need epsilon < big_r, got {self.epsilon} >= {self.big_r}")

    @property
    def light_radius(self) -> float:
        return 1.0 / self.omega


def chi(r, params: DomainParams):
    """Type indicator chi(r) = 1 - (omega*r)^2; zero on the light circle."""
    r = np.asarray(r, dtype=float)
    return 1.0 - (params.omega * r) ** 2


def classify_point(r: float, params: DomainParams, tol_zero: float = TOL_ZERO) -> PointType:
    """Classify a radius as elliptic, hyperbolic, or on the light circle.

    The light-circle band is |chi| <= tol_zero relative to (omega*r)^2, so
    classification is stable under the round-off of chi near its zero.
    """
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    c = float(chi(r, params))
    band = tol_zero * max(1.0, (params.omega * r) ** 2)
    if c > band:
        return PointType.ELLIPTIC
    if c < -band:
        return PointType.HYPERBOLIC
    return PointType.LIGHT_CIRCLE


class BoundaryFn:
    """Smooth periodic function of phi with closed-form first two derivatives."""

    def __call__(self, phi):
        raise NotImplementedError

    def d1(self, phi):
        raise NotImplementedError

    def d2(self, phi):
        raise NotImplementedError

    def to_config(self):
        raise NotImplementedError


class ConstFn(BoundaryFn):
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, phi):
        return np.full_like(np.asarray(phi, dtype=float), self.value)

    def d1(self, phi):
        return np.zeros_like(np.asarray(phi, dtype=float))

    d2 = d1

    def to_config(self):
        return {"const": self.value}

    def __repr__(self):
        return f"ConstFn({self.value!r})"


class FourierFn(BoundaryFn):
    """Truncated Fourier series cos[0] + sum_k cos[k] cos(k phi) + sin[k-1] sin(k phi)."""

    def __init__(self, cos=(), sin=()):
        self.cos = np.asarray(cos, dtype=float)
        self.sin = np.asarray(sin, dtype=float)
        self._kc = np.arange(self.cos.size)
        self._ks = np.arange(1, self.sin.size + 1)

    def __call__(self, phi):
        p = np.asarray(phi, dtype=float)[..., None]
        out = np.sum(self.cos * np.cos(self._kc * p), axis=-1)
        out += np.sum(self.sin * np.sin(self._ks * p), axis=-1)
        return out

    def d1(self, phi):
        p = np.asarray(phi, dtype=float)[..., None]
        out = np.sum(-self.cos * self._kc * np.sin(self._kc * p), axis=-1)
        out += np.sum(self.sin * self._ks * np.cos(self._ks * p), axis=-1)
        return out

    def d2(self, phi):
        p = np.asarray(phi, dtype=float)[..., None]
        out = np.sum(-self.cos * self._kc**2 * np.cos(self._kc * p), axis=-1)
        out += np.sum(-self.sin * self._ks**2 * np.sin(self._ks * p), axis=-1)
        return out

    def to_config(self):
        return {"fourier": {"cos": list(self.cos), "sin": list(self.sin)}}

    def __repr__(self):
        return f"FourierFn(cos={list(self.cos)}, sin={list(self.sin)})"


class RatioFn(BoundaryFn):
    """Quotient num/den of two boundary functions, derivatives by the chain rule."""

    def __init__(self, num: BoundaryFn, den: BoundaryFn):
        self.num = num
        self.den = den

    def __call__(self, phi):
        return self.num(phi) / self.den(phi)

    def d1(self, phi):
        d = self.den(phi)
        return (self.num.d1(phi) - self(phi) * self.den.d1(phi)) / d

    def d2(self, phi):
        d = self.den(phi)
        return (self.num.d2(phi) - 2.0 * self.d1(phi) * self.den.d1(phi)
                - self(phi) * self.den.d2(phi)) / d


def fourier_fit(values_fn, max_harmonic: int = 64, tol: float = 1e-12) -> BoundaryFn:
    """Project a band-limited periodic callable onto a FourierFn.

    Sampling uses 4*max_harmonic points, enough for exact recovery of any
    series truncated at max_harmonic.  Coefficients below tol (relative to
    the largest one) are dropped.
    """
    n = 4 * max_harmonic
    phi = np.arange(n) * (2 * np.pi / n)
    spec = np.fft.rfft(np.asarray(values_fn(phi), dtype=float)) / n
    cos = np.zeros(max_harmonic + 1)
    sin = np.zeros(max_harmonic)
    cos[0] = spec[0].real
    cos[1:] = 2.0 * spec[1 : max_harmonic + 1].real
    sin[:] = -2.0 * spec[1 : max_harmonic + 1].imag
    scale = max(np.abs(cos).max(), np.abs(sin).max(), 1e-300)
    cos[np.abs(cos) < tol * scale] = 0.0
    sin[np.abs(sin) < tol * scale] = 0.0
    nc = np.nonzero(cos)[0]
    ns = np.nonzero(sin)[0]
    last_c = nc[-1] + 1 if nc.size else 1
    last_s = ns[-1] + 1 if ns.size else 0
    return FourierFn(cos[:last_c], sin[:last_s])


def as_boundary_fn(value) -> BoundaryFn:
    """Coerce a number or BoundaryFn into a BoundaryFn."""
    if isinstance(value, BoundaryFn):
        return value
    return ConstFn(float(value))


@dataclass(frozen=True)
class BoundarySpec:
    """Outer boundary functions sigma, tau and inhomogeneous data k, l.

    sigma*tau must be nonzero with a single sign over the whole outer circle;
    the sign decides which sign of the multiplier constant a is admissible,
    and a constant a cannot serve both signs at once.
    """

    sigma: BoundaryFn
    tau: BoundaryFn
    inner_k: BoundaryFn = field(default_factory=lambda: ConstFn(0.0))
    outer_l: BoundaryFn = field(default_factory=lambda: ConstFn(0.0))

    def __post_init__(self):
        phi = np.arange(_SIGN_SAMPLES) * (2 * np.pi / _SIGN_SAMPLES)
        st = np.asarray(self.sigma(phi)) * np.asarray(self.tau(phi))
        if np.any(np.abs(st) < 1e-12):
            raise ValueError("sigma*tau must be nonzero everywhere on the outer boundary")
        if st.min() < 0 < st.max():
            raise ValueError(
                "sigma*tau changes sign along the outer boundary; "
                "a constant multiplier cannot make such conditions admissible"
            )

    def product_sign(self) -> float:
        """Sign of sigma*tau (constant by construction)."""
        return float(np.sign(self.sigma(0.0) * self.tau(0.0)))

    def is_constant(self) -> bool:
        return isinstance(self.sigma, ConstFn) and isinstance(self.tau, ConstFn)


def sommerfeld_spec(params: DomainParams, sign: str = "+") -> BoundarySpec:
    """Outgoing (+) or ingoing (-) radiation condition: tau = 1/R, sigma = +/- omega."""
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    s = params.omega if sign == "+" else -params.omega
    return BoundarySpec(sigma=ConstFn(s), tau=ConstFn(1.0 / params.big_r))


@dataclass(frozen=True)
class Grid:
    """Uniform tensor-product grid; phi is periodic with the last node excluded."""

    n_r: int
    n_phi: int
    r_nodes: np.ndarray
    phi_nodes: np.ndarray

    @property
    def h_r(self) -> float:
        return (self.r_nodes[-1] - self.r_nodes[0]) / (self.n_r - 1)

    @property
    def h_phi(self) -> float:
        return 2.0 * np.pi / self.n_phi

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_nodes[:-1] + self.r_nodes[1:])

    @property
    def phi_centers(self) -> np.ndarray:
        return self.phi_nodes + 0.5 * self.h_phi

    def meshgrid(self):
        return np.meshgrid(self.r_nodes, self.phi_nodes, indexing="ij")

    def node_weights(self) -> np.ndarray:
        """Quadrature weights w_ij ~ r dr dphi: trapezoid in r, rectangle in phi."""
        w_r = np.full(self.n_r, self.h_r)
        w_r[0] *= 0.5
        w_r[-1] *= 0.5
        return (w_r * self.r_nodes)[:, None] * np.full(self.n_phi, self.h_phi)


def build_grid(params: DomainParams, n_r: int, n_phi: int) -> Grid:
    """Uniform grid on [eps, R] x [0, 2pi); endpoints land on eps and R exactly."""
    if n_r < 3:
        raise ValueError(f"n_r must be >= 3, got {n_r}")
    if n_phi < 4:
        raise ValueError(f"n_phi must be >= 4, got {n_phi}")
    if n_phi % 2 != 0:
        raise ValueError(f"n_phi must be even so conjugate Fourier modes pair, got {n_phi}")
    t = np.arange(n_r) / (n_r - 1)
    r = (1.0 - t) * params.epsilon + t * params.big_r
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    return Grid(n_r=n_r, n_phi=n_phi, r_nodes=r, phi_nodes=phi)
