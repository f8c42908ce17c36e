"""Nodal solution fields and reconstruction of Psi from u2."""

from dataclasses import dataclass

import numpy as np

from .domain import Grid


@dataclass
class GridField:
    """Nodal values of u1 = d_phi Psi, u2 = r d_r Psi, Psi, and the source.

    Solver output for the homogeneous problem keeps u1 and psi exactly zero
    on the inner circle and sigma u1 + tau u2 zero on the outer one (exactly
    for strongly imposed conditions, to truncation order otherwise).
    """

    u1: np.ndarray
    u2: np.ndarray
    psi: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        shapes = {self.u1.shape, self.u2.shape, self.psi.shape, self.f.shape}
        if len(shapes) != 1:
            raise ValueError(f"field components disagree in shape: {shapes}")

    def linf(self) -> float:
        return max(np.abs(self.u1).max(), np.abs(self.u2).max())


def reconstruct_psi(u2: np.ndarray, grid: Grid) -> np.ndarray:
    """Psi(r, phi) = int_eps^r u2(r', phi)/r' dr' by cumulative trapezoid.

    Psi on the inner circle is exactly zero by construction.
    """
    v = u2 / grid.r_nodes[:, None]
    psi = np.zeros_like(u2)
    psi[1:, :] = np.cumsum(0.5 * grid.h_r * (v[:-1, :] + v[1:, :]), axis=0)
    return psi


def grid_l2(values: np.ndarray, grid: Grid) -> float:
    """Discrete L2 norm with the area weight r dr dphi."""
    return float(np.sqrt(np.sum(grid.node_weights() * np.asarray(values) ** 2)))


def sample_source(f, grid: Grid) -> np.ndarray:
    """Evaluate a source (callable or nodal array) on the grid nodes."""
    if callable(f):
        rr, pp = grid.meshgrid()
        return np.asarray(f(rr, pp), dtype=float)
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n_r, grid.n_phi):
        raise ValueError(f"nodal source has shape {f.shape}, expected {(grid.n_r, grid.n_phi)}")
    return f
