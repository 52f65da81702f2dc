"""Constructive sine-Galerkin scheme: spectral velocities on sin(j pi x),
density advanced exactly along particle paths in mass coordinates, director
advanced by an implicit tridiagonal step, all coupled by a per-step Picard
iteration that halves dt on non-convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import solve_banded

from . import diagnostics
from .coefficients import (DerivedViscosities, LeslieSet, matrix_entries,
                           require_valid)
from .fields import (FlowState, Grid1D, check_state, director_rate_flux,
                     elastic_coupling, gradient, pressure, second_derivative)


class DenominatorTooSmall(RuntimeError):
    """Lagrangian density denominator fell below the positivity guard; the
    caller must shrink dt and retry."""


class TimeStepUnderflow(RuntimeError):
    """dt was halved below the floor without reaching Picard convergence."""


# =============================================================================
# Sine basis and spectral velocities
# =============================================================================

class SineBasis:
    """Tabulated sin(j pi x) basis on a grid.

    The basis is orthogonal, not orthonormal: integral of phi_j^2 over (0,1)
    is 1/2, so projections carry a factor 2.
    """

    def __init__(self, num_modes: int, grid: Grid1D):
        if num_modes < 1:
            raise ValueError("need at least one mode")
        self.num_modes = num_modes
        self.grid = grid
        j = np.arange(1, num_modes + 1)[:, None]
        x = grid.x[None, :]
        self.phi = np.sin(j * np.pi * x)                  # (K, nodes)
        self.phi[:, 0] = 0.0
        self.phi[:, -1] = 0.0   # exact endpoint zeros despite sin(j*pi) round-off
        self.dphi = (j * np.pi) * np.cos(j * np.pi * x)   # (K, nodes)

    def project(self, f: np.ndarray) -> np.ndarray:
        """Mode coefficients 2 * integral of f * phi_j."""
        return 2.0 * np.trapezoid(self.phi * f[None, :], dx=self.grid.dx, axis=1)

    def reconstruct(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self.phi

    def reconstruct_derivative(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self.dphi


@dataclass
class SpectralVelocity:
    """Truncated sine-mode coefficients of the two velocity components.

    The reconstruction vanishes at both endpoints automatically.
    """
    num_modes: int
    c: np.ndarray
    d: np.ndarray

    def copy(self) -> "SpectralVelocity":
        return SpectralVelocity(self.num_modes, self.c.copy(), self.d.copy())


def project_initial_velocity(u0: np.ndarray, v0: np.ndarray, num_modes: int,
                             grid: Grid1D) -> SpectralVelocity:
    """Project endpoint-vanishing initial velocities onto the first K modes."""
    basis = SineBasis(num_modes, grid)
    return SpectralVelocity(num_modes, basis.project(u0), basis.project(v0))


# =============================================================================
# Lagrangian density
# =============================================================================

@dataclass
class LagrangianDensity:
    """Per-step mass-coordinate bookkeeping.

    rho0 holds the density at the step start sampled at the grid nodes (the
    particle labels), labels the normalized cumulative mass at those nodes,
    and accumulated_uX the integral of the velocity's mass-coordinate
    gradient along each particle path since the step start.
    """
    rho0: np.ndarray
    accumulated_uX: np.ndarray
    labels: np.ndarray

    @classmethod
    def at_step_start(cls, rho: np.ndarray, grid: Grid1D) -> "LagrangianDensity":
        cum = np.concatenate(([0.0], np.cumsum(
            0.5 * (rho[:-1] + rho[1:]) * grid.dx)))
        total = cum[-1]
        if total <= 0.0:
            raise ValueError("total mass must be positive")
        return cls(rho0=rho.copy(),
                   accumulated_uX=np.zeros_like(rho),
                   labels=cum / total)


def advance_density(ld: LagrangianDensity, uX_increment: np.ndarray,
                    guard: float = 1.0) -> np.ndarray:
    """Closed-form density along particle paths.

    Adds the supplied mass-coordinate velocity-gradient increment to the
    accumulated integral and evaluates

        rho = rho0 / (1 + rho0 * accumulated_uX)

    at the particle labels.  The step window must keep
    |rho0 * accumulated_uX| <= guard/2, the regime in which the two-sided
    density bounds hold; outside it the caller halves dt.
    """
    acc = ld.accumulated_uX + uX_increment
    window = ld.rho0 * acc
    if np.max(np.abs(window)) > 0.5 * guard:
        raise DenominatorTooSmall(
            f"density window |rho0 int u_X| = {np.max(np.abs(window)):.3e} "
            f"> {0.5 * guard:.3e}")
    ld.accumulated_uX = acc
    return ld.rho0 / (1.0 + window)


def remap_density_to_grid(rho_particles: np.ndarray, positions: np.ndarray,
                          labels: np.ndarray, total_mass: float,
                          grid: Grid1D) -> np.ndarray:
    """Conservative remap of particle densities to the uniform grid.

    Each particle keeps its cumulative-mass label, so the new mass function
    is known exactly at the new particle positions; a monotone interpolant
    differentiates it on the grid, and a final rescale restores the exact
    trapezoid mass.
    """
    if np.any(np.diff(positions) <= 0.0):
        raise DenominatorTooSmall("particle map lost monotonicity")
    mass_fn = PchipInterpolator(positions, labels)
    rho = total_mass * mass_fn.derivative()(grid.x)
    # the wall particles are pinned to the wall nodes, so their closed-form
    # densities are exact there; the interpolant's one-sided endpoint rule
    # can clamp to zero spuriously when the wall density is small
    rho[0] = rho_particles[0]
    rho[-1] = rho_particles[-1]
    rho = np.maximum(rho, 0.0)
    current = np.trapezoid(rho, dx=grid.dx)
    if current <= 0.0:
        raise DenominatorTooSmall("remapped density lost all mass")
    return rho * (total_mass / current)


# =============================================================================
# Implicit director step
# =============================================================================

def advance_director(state: FlowState, d: DerivedViscosities, dt: float,
                     grid: Grid1D, u_x: Optional[np.ndarray] = None,
                     v_x: Optional[np.ndarray] = None,
                     n_lag: Optional[np.ndarray] = None) -> np.ndarray:
    """One backward-Euler step of the director equation

        gamma1 n_t = n_xx - gamma1 u n_x + (gamma2/2) u_x sin 2n
                     + ((gamma1 - gamma2 cos 2n)/2) v_x

    with Neumann ends.  Diffusion and transport are implicit (one
    tridiagonal solve); the trigonometric sources are evaluated at n_lag,
    the previous iterate.  Velocity gradients may be supplied (spectral
    path) or are taken by finite differences.
    """
    if d.gamma1 <= 0.0:
        raise ValueError("gamma1 must be positive")
    dx = grid.dx
    m = grid.num_nodes
    g1, g2 = d.gamma1, d.gamma2
    if u_x is None:
        u_x = gradient(state.u, dx)
    if v_x is None:
        v_x = gradient(state.v, dx)
    if n_lag is None:
        n_lag = state.n
    two_n = 2.0 * n_lag
    src = 0.5 * g2 * u_x * np.sin(two_n) + 0.5 * (g1 - g2 * np.cos(two_n)) * v_x

    idx2 = 1.0 / (dx * dx)
    adv = g1 * state.u / (2.0 * dx)
    diag = np.full(m, g1 / dt + 2.0 * idx2)
    lower = np.full(m - 1, -idx2)
    upper = np.full(m - 1, -idx2)
    lower[:-1] -= adv[1:-1]
    upper[1:] += adv[1:-1]
    # mirrored-ghost Neumann rows
    upper[0] = -2.0 * idx2
    lower[-1] = -2.0 * idx2

    rhs = g1 / dt * state.n + src
    ab = np.zeros((3, m))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - misconfiguration
        raise RuntimeError(f"director tridiagonal solve failed: {exc}") from exc


# =============================================================================
# Velocity-mode update
# =============================================================================

def advance_velocity_modes(state: FlowState, spec: SpectralVelocity,
                           c: LeslieSet, dt: float, *, grid: Grid1D,
                           basis: SineBasis, rho_new: np.ndarray,
                           n_new: np.ndarray,
                           ndot_new: np.ndarray) -> SpectralVelocity:
    """Advance the mode coefficients of (u, v) by one step of the weak form.

    The second-order coefficient matrix A(n) is treated implicitly (mass and
    stiffness assembled by trapezoid quadrature on the grid); transport and
    pressure are explicit at the old time, while the elastic source and the
    director-rate flux use the freshly advanced director.
    """
    if np.min(rho_new) <= 0.0:
        raise ValueError("mass matrix requires strictly positive density")
    dx = grid.dx
    K = basis.num_modes
    w = np.full(grid.num_nodes, dx)
    w[0] = w[-1] = 0.5 * dx   # trapezoid weights

    phi_w = basis.phi * w[None, :]
    dphi_w = basis.dphi * w[None, :]

    mass = phi_w * rho_new[None, :] @ basis.phi.T

    a11, a12, a21, a22 = matrix_entries(c, n_new)
    s11 = dphi_w * a11[None, :] @ basis.dphi.T
    s12 = dphi_w * a12[None, :] @ basis.dphi.T
    s21 = dphi_w * a21[None, :] @ basis.dphi.T
    s22 = dphi_w * a22[None, :] @ basis.dphi.T

    b1, b2 = director_rate_flux(c, n_new, ndot_new)
    elastic_state = FlowState(state.time, rho_new, state.u, state.v, n_new)
    elastic = elastic_coupling(elastic_state, grid)

    p_old = pressure(state.rho, c.gamma_ad)
    r_u = (phi_w @ (state.rho * state.u)
           + dt * (dphi_w @ (state.rho * state.u * state.u)
                   + dphi_w @ p_old
                   + phi_w @ elastic
                   - dphi_w @ b1))
    r_v = (phi_w @ (state.rho * state.v)
           + dt * (dphi_w @ (state.rho * state.u * state.v)
                   - dphi_w @ b2))

    system = np.block([[mass + dt * s11, dt * s12],
                       [dt * s21, mass + dt * s22]])
    try:
        sol = np.linalg.solve(system, np.concatenate([r_u, r_v]))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"velocity mode solve failed: {exc}") from exc
    return SpectralVelocity(K, sol[:K], sol[K:])


# =============================================================================
# Coupled step and run driver
# =============================================================================

@dataclass
class SolverConfig:
    dt: float
    picard_tol: float = 1e-10
    picard_max: int = 50
    quadrature: str = "trapezoid"
    denominator_guard: float = 1.0
    dt_min: float = 1e-12

    def __post_init__(self):
        if self.dt <= 0.0 or self.picard_tol <= 0.0:
            raise ValueError("dt and picard_tol must be positive")
        if self.quadrature != "trapezoid":
            raise ValueError("only trapezoid quadrature is implemented")


@dataclass
class StepStats:
    picard_iterations: int
    dt_used: float
    halvings: int


def _initial_ndot(state: FlowState, d: DerivedViscosities,
                  grid: Grid1D, u_x: Optional[np.ndarray] = None,
                  v_x: Optional[np.ndarray] = None) -> np.ndarray:
    """Material director rate consistent with the director equation; used to
    seed the ledger at t = 0."""
    if u_x is None:
        u_x = gradient(state.u, grid.dx)
    if v_x is None:
        v_x = gradient(state.v, grid.dx)
    n_xx = second_derivative(state.n, grid.dx, neumann_ends=True)
    two_n = 2.0 * state.n
    return (n_xx + 0.5 * d.gamma2 * u_x * np.sin(two_n)
            + 0.5 * (d.gamma1 - d.gamma2 * np.cos(two_n)) * v_x) / d.gamma1


def _attempt_step(state: FlowState, spec: SpectralVelocity, grid: Grid1D,
                  c: LeslieSet, d: DerivedViscosities, dt: float,
                  config: SolverConfig,
                  basis: SineBasis) -> Optional[tuple[FlowState, SpectralVelocity, int]]:
    """One Picard-coupled step at fixed dt; None when Picard stalls."""
    total_mass = float(np.trapezoid(state.rho, dx=grid.dx))

    spec_it = spec.copy()
    rho_it = state.rho.copy()
    n_it = state.n.copy()

    for iteration in range(1, config.picard_max + 1):
        u_field = basis.reconstruct(spec_it.c)
        v_field = basis.reconstruct(spec_it.d)
        u_x = basis.reconstruct_derivative(spec_it.c)
        v_x = basis.reconstruct_derivative(spec_it.d)

        # (i) density along particle paths, then conservative remap
        ld = LagrangianDensity.at_step_start(state.rho, grid)
        with np.errstate(divide="ignore", invalid="ignore"):
            u_mass_grad = np.where(state.rho > 0.0, u_x / state.rho, 0.0)
        rho_particles = advance_density(ld, dt * u_mass_grad,
                                        guard=config.denominator_guard)
        positions = grid.x + dt * u_field
        positions[0], positions[-1] = 0.0, 1.0
        rho_new = remap_density_to_grid(rho_particles, positions, ld.labels,
                                        total_mass, grid)

        # (ii) implicit director with lagged trig coefficients
        working = FlowState(state.time, state.rho, u_field, v_field, state.n)
        n_new = advance_director(working, d, dt, grid, u_x=u_x, v_x=v_x,
                                 n_lag=n_it)
        n_x_new = gradient(n_new, grid.dx, neumann_ends=True)
        ndot_new = (n_new - state.n) / dt + u_field * n_x_new

        # (iii) velocity modes, implicit in the A(n) part
        spec_new = advance_velocity_modes(state, spec, c, dt, grid=grid,
                                          basis=basis, rho_new=rho_new,
                                          n_new=n_new, ndot_new=ndot_new)

        delta = max(float(np.max(np.abs(rho_new - rho_it))),
                    float(np.max(np.abs(n_new - n_it))),
                    float(np.max(np.abs(spec_new.c - spec_it.c))),
                    float(np.max(np.abs(spec_new.d - spec_it.d))))
        rho_it, n_it, spec_it = rho_new, n_new, spec_new
        if delta < config.picard_tol:
            u_final = basis.reconstruct(spec_it.c)
            n_x_fin = gradient(n_it, grid.dx, neumann_ends=True)
            ndot_fin = (n_it - state.n) / dt + u_final * n_x_fin
            new_state = FlowState(state.time + dt, rho_it,
                                  u_final, basis.reconstruct(spec_it.d),
                                  n_it, ndot=ndot_fin)
            return new_state, spec_it, iteration
    return None


def step(state: FlowState, spec: SpectralVelocity, grid: Grid1D,
         c: LeslieSet, d: DerivedViscosities, config: SolverConfig,
         basis: Optional[SineBasis] = None,
         ) -> tuple[FlowState, SpectralVelocity, StepStats]:
    """Advance one scheduled step, halving dt internally on Picard failure.

    Returns the advanced state together with the dt actually used (always
    config.dt / 2^k).  Raises TimeStepUnderflow below the dt floor.
    """
    if basis is None:
        basis = SineBasis(spec.num_modes, grid)
    dt = config.dt
    halvings = 0
    while dt >= config.dt_min:
        try:
            result = _attempt_step(state, spec, grid, c, d, dt, config, basis)
        except DenominatorTooSmall:
            result = None
        if result is not None:
            new_state, new_spec, iters = result
            return new_state, new_spec, StepStats(iters, dt, halvings)
        dt *= 0.5
        halvings += 1
    raise TimeStepUnderflow(
        f"dt underflow at t={state.time:.6g}: "
        f"min rho={np.min(state.rho):.3e}, max |u|={np.max(np.abs(state.u)):.3e}, "
        f"max |modes|={max(np.max(np.abs(spec.c)), np.max(np.abs(spec.d))):.3e}")


@dataclass
class Trajectory:
    """Snapshots at the requested cadence plus the per-snapshot ledger."""
    grid: Grid1D
    times: np.ndarray
    snapshots: list[FlowState]
    ledgers: list[diagnostics.EnergyLedger]
    mass_scale: float
    metadata: dict = field(default_factory=dict)


def run(initial: FlowState, num_modes: int, grid: Grid1D, c: LeslieSet,
        d: DerivedViscosities, config: SolverConfig, t_end: float,
        snapshot_every: int = 1) -> Trajectory:
    """Integrate from the initial state to t_end, recording every
    snapshot_every-th scheduled step.

    Deterministic for a given configuration; the scheduled step size is
    config.dt, with internal halvings refilling each scheduled window so
    output times stay on the uniform cadence.
    """
    require_valid(c)
    basis = SineBasis(num_modes, grid)
    state = initial.copy()
    check_state(state, grid)
    spec = project_initial_velocity(state.u, state.v, num_modes, grid)
    # start from the projected velocities so state and modes agree
    state.u = basis.reconstruct(spec.c)
    state.v = basis.reconstruct(spec.d)
    if state.ndot is None:
        state.ndot = _initial_ndot(state, d, grid,
                                   u_x=basis.reconstruct_derivative(spec.c),
                                   v_x=basis.reconstruct_derivative(spec.d))

    mass0 = float(np.trapezoid(state.rho, dx=grid.dx))
    times = [0.0]
    snapshots = [state.copy()]
    ledgers = [diagnostics.make_ledger(state, c, d, grid)]
    picard_counts: list[int] = []
    total_halvings = 0

    num_steps = int(round(t_end / config.dt)) if t_end > 0 else 0
    if t_end > 0 and abs(num_steps * config.dt - t_end) > 1e-9 * max(t_end, 1.0):
        num_steps = int(np.ceil(t_end / config.dt))

    for k in range(1, num_steps + 1):
        target = min(k * config.dt, t_end)
        while state.time < target - 1e-13:
            remaining = target - state.time
            cfg = replace(config, dt=min(config.dt, remaining))
            state, spec, stats = step(state, spec, grid, c, d, cfg, basis=basis)
            picard_counts.append(stats.picard_iterations)
            total_halvings += stats.halvings
        if k % snapshot_every == 0 or state.time >= t_end - 1e-13:
            times.append(state.time)
            snapshots.append(state.copy())
            ledgers.append(diagnostics.make_ledger(state, c, d, grid))

    return Trajectory(
        grid=grid, times=np.asarray(times), snapshots=snapshots,
        ledgers=ledgers, mass_scale=mass0,
        metadata={
            "scheme": "galerkin",
            "num_modes": num_modes,
            "dt": config.dt,
            "picard_iterations": picard_counts,
            "dt_halvings": total_halvings,
        })
