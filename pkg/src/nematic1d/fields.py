"""Discrete state on the unit interval and the right-hand-side expressions of
the coupled density / momentum / director system: pressure, the two viscous
flux brackets (whose x-derivatives drive the momentum equations), the elastic
coupling, and the director-equation residual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coefficients import (DerivedViscosities, LeslieSet, matrix_entries,
                           require_valid)


class MissingDirectorRate(ValueError):
    """Raised when an operation needs state.ndot and the solver has not set it."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform node-centered grid on [0, 1], endpoints included."""

    num_cells: int

    def __post_init__(self):
        if self.num_cells < 8:
            raise ValueError("grid needs at least 8 cells")

    @property
    def dx(self) -> float:
        return 1.0 / self.num_cells

    @property
    def num_nodes(self) -> int:
        return self.num_cells + 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.num_nodes)

    @property
    def x_mid(self) -> np.ndarray:
        """Cell-interface (midpoint) coordinates."""
        return (np.arange(self.num_cells) + 0.5) * self.dx


@dataclass
class FlowState:
    """Grid-sampled fields at one time instant.

    rho >= 0 everywhere, u and v vanish at both endpoint nodes, and n is a
    director angle with homogeneous Neumann ends.  ndot is the material
    derivative n_t + u n_x supplied by the solver for the current step;
    treat instances as immutable once constructed.
    """

    time: float
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    n: np.ndarray
    ndot: Optional[np.ndarray] = None

    def copy(self) -> "FlowState":
        return FlowState(self.time, self.rho.copy(), self.u.copy(),
                         self.v.copy(), self.n.copy(),
                         None if self.ndot is None else self.ndot.copy())

    def require_ndot(self) -> np.ndarray:
        if self.ndot is None:
            raise MissingDirectorRate("state.ndot has not been populated")
        return self.ndot


def check_state(state: FlowState, grid: Grid1D, atol: float = 1e-12) -> None:
    """Raise if the state violates its boundary/positivity invariants."""
    m = grid.num_nodes
    for name in ("rho", "u", "v", "n"):
        arr = getattr(state, name)
        if arr.shape != (m,):
            raise ValueError(f"{name} has shape {arr.shape}, expected ({m},)")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} contains non-finite values")
    if np.min(state.rho) < -atol:
        raise ValueError(f"negative density: min rho = {np.min(state.rho):.3e}")
    for name in ("u", "v"):
        arr = getattr(state, name)
        if abs(arr[0]) > atol or abs(arr[-1]) > atol:
            raise ValueError(f"{name} does not vanish at the endpoints")


@dataclass(frozen=True)
class FluxPair:
    """Viscous flux brackets at cell interfaces; the momentum right-hand
    sides are their x-derivatives."""
    f1: np.ndarray
    f2: np.ndarray


# =============================================================================
# Finite-difference stencils
# =============================================================================

def gradient(f: np.ndarray, dx: float, neumann_ends: bool = False) -> np.ndarray:
    """Second-order first derivative at the nodes.

    Interior: centered.  Ends: one-sided second order, or exactly zero when
    the field carries a homogeneous Neumann condition.
    """
    g = np.empty_like(f)
    g[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
    if neumann_ends:
        g[0] = 0.0
        g[-1] = 0.0
    else:
        g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
        g[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return g


def second_derivative(f: np.ndarray, dx: float,
                      neumann_ends: bool = False) -> np.ndarray:
    """Second-order second derivative; Neumann ends use the mirrored ghost."""
    g = np.empty_like(f)
    g[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / (dx * dx)
    if neumann_ends:
        g[0] = 2.0 * (f[1] - f[0]) / (dx * dx)
        g[-1] = 2.0 * (f[-2] - f[-1]) / (dx * dx)
    else:
        g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dx * dx)
        g[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (dx * dx)
    return g


# =============================================================================
# Pointwise flux algebra
# =============================================================================

def pressure(rho: np.ndarray, gamma_ad: float) -> np.ndarray:
    """Barotropic pressure rho^gamma, with rho clamped at zero from below so
    vacuum states never see a negative base."""
    return np.power(np.maximum(rho, 0.0), gamma_ad)


def director_rate_flux(c: LeslieSet, n, ndot):
    """The director-rate part of the flux brackets: what remains of (f1, f2)
    after subtracting A(n) (u_x, v_x)^T.  Depends only on (n, ndot)."""
    csn = np.cos(n) * np.sin(n)
    cs2 = np.cos(n) ** 2
    b1 = -(c.alpha2 + c.alpha3) * ndot * csn
    b2 = c.alpha2 * ndot * cs2 - c.alpha3 * ndot * (1.0 - cs2)
    return b1, b2


def flux_bracket(c: LeslieSet, u_x, v_x, n, ndot):
    """Pointwise flux brackets (f1, f2): A(n) (u_x, v_x)^T plus the
    director-rate part.  Broadcasts over arrays."""
    a11, a12, a21, a22 = matrix_entries(c, n)
    b1, b2 = director_rate_flux(c, n, ndot)
    return a11 * u_x + a12 * v_x + b1, a21 * u_x + a22 * v_x + b2


def leslie_fluxes(state: FlowState, c: LeslieSet,
                  d: DerivedViscosities, grid: Grid1D) -> FluxPair:
    """Evaluate the flux brackets at the cell interfaces.

    Velocity gradients are compact centered differences across each
    interface; angle and rate are interface averages.
    """
    ndot = state.require_ndot()
    require_valid(c)
    dx = grid.dx
    u_x = np.diff(state.u) / dx
    v_x = np.diff(state.v) / dx
    n_mid = 0.5 * (state.n[:-1] + state.n[1:])
    nd_mid = 0.5 * (ndot[:-1] + ndot[1:])
    f1, f2 = flux_bracket(c, u_x, v_x, n_mid, nd_mid)
    return FluxPair(f1=f1, f2=f2)


def flux_divergence(fp: FluxPair, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    """Divergence of the interface fluxes at the nodes: the viscous
    right-hand sides of the two momentum equations.  Endpoint values are
    copied from the neighbors and only used diagnostically."""
    dx = grid.dx
    out = []
    for f in (fp.f1, fp.f2):
        j = np.empty(grid.num_nodes)
        j[1:-1] = (f[1:] - f[:-1]) / dx
        j[0] = j[1]
        j[-1] = j[-2]
        out.append(j)
    return out[0], out[1]


def elastic_coupling(state: FlowState, grid: Grid1D) -> np.ndarray:
    """The elastic source -n_xx n_x that enters the first momentum equation."""
    n_x = gradient(state.n, grid.dx, neumann_ends=True)
    n_xx = second_derivative(state.n, grid.dx, neumann_ends=True)
    return -n_xx * n_x


def director_residual(state: FlowState, d: DerivedViscosities,
                      grid: Grid1D) -> np.ndarray:
    """Residual of the scalar director equation,

        gamma1 ndot - (gamma2/2) u_x sin 2n - ((gamma1 - gamma2 cos 2n)/2) v_x - n_xx,

    which a consistent state satisfies to scheme accuracy."""
    ndot = state.require_ndot()
    u_x = gradient(state.u, grid.dx)
    v_x = gradient(state.v, grid.dx)
    n_xx = second_derivative(state.n, grid.dx, neumann_ends=True)
    two_n = 2.0 * state.n
    return (d.gamma1 * ndot
            - 0.5 * d.gamma2 * u_x * np.sin(two_n)
            - 0.5 * (d.gamma1 - d.gamma2 * np.cos(two_n)) * v_x
            - n_xx)
