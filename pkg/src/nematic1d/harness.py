"""Run configuration, initial-data construction (including mollification of
rough data), output persistence, and the vanishing-regularization sweep
study.

Config files are flat ``key = value`` text with dotted section keys; JSON
with the same (possibly nested) keys is accepted as an alternative.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import diagnostics, fdsolver, galerkin
from .coefficients import (InvalidCoefficients, LeslieSet, derive_viscosities,
                           validate)
from .fields import FlowState, Grid1D, gradient

OUTPUT_ROOT_ENV = "NEMATIC1D_OUT"

PRESETS = ("static", "shear", "smooth_random", "rough_density")
ROUGH_PROFILES = ("sawtooth", "tent", "vacuum_patch")

# sawtooth rough density: vacuum at both walls, gentle wall slopes, and a
# train of sharp interior teeth whose convex/concave kinks dominate the
# mollification error, keeping every initial-data norm first order in the
# smoothing radius
_SAW_X = np.array([0.0, 0.2, 0.26, 0.32, 0.38, 0.44, 0.7, 1.0])
_SAW_Y = np.array([0.0, 0.4, 1.6, 0.4, 1.6, 0.4, 1.0, 0.0])


@dataclass
class RunConfig:
    coefficients: LeslieSet = field(default_factory=LeslieSet)
    grid_cells: int = 128
    modes: int = 16
    dt: float = 1e-3
    t_end: float = 0.5
    scheme: str = "galerkin"
    initial_preset: str = "shear"
    initial_params: dict = field(default_factory=dict)
    mollify_delta: float = 0.0
    output_dir: Optional[str] = None
    snapshot_every: int = 1
    picard_tol: float = 1e-10
    energy_tol: float = 1e-8
    cfl: float = 0.9
    limiter: str = "none"

    def __post_init__(self):
        if self.grid_cells < 8:
            raise ValueError("grid.cells must be >= 8")
        if self.modes < 1:
            raise ValueError("modes must be >= 1")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        if self.mollify_delta < 0.0:
            raise ValueError("mollify_delta must be nonnegative")
        if self.scheme not in ("galerkin", "fd"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.initial_preset not in PRESETS:
            raise ValueError(f"unknown initial preset {self.initial_preset!r}")

    def to_dict(self) -> dict:
        cdict = {f"alpha{i}": a for i, a in enumerate(self.coefficients.alphas())}
        cdict["gamma_ad"] = self.coefficients.gamma_ad
        return {
            "coefficients": cdict,
            "grid": {"cells": self.grid_cells},
            "modes": self.modes,
            "dt": self.dt,
            "t_end": self.t_end,
            "scheme": self.scheme,
            "initial": {"preset": self.initial_preset, **self.initial_params},
            "mollify_delta": self.mollify_delta,
            "output": {"dir": self.output_dir,
                       "snapshot_every": self.snapshot_every},
            "tolerances": {"picard": self.picard_tol, "energy": self.energy_tol},
            "oracle": {"cfl": self.cfl, "limiter": self.limiter},
        }


def _flat_items(obj: dict, prefix: str = "") -> dict:
    out: dict = {}
    for key, val in obj.items():
        dotted = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(_flat_items(val, dotted + "."))
        else:
            out[dotted] = val
    return out


def _parse_scalar(text: str):
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null", ""):
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_config(path: str | Path) -> RunConfig:
    """Read a run configuration from key-value text or JSON."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if str(path).endswith(".json") or stripped.startswith("{"):
        flat = _flat_items(json.loads(text))
    else:
        flat = {}
        for raw_line in text.splitlines():
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line is not KEY = VALUE: {raw_line!r}")
            key, val = line.split("=", 1)
            flat[key.strip()] = _parse_scalar(val)
    return config_from_flat(flat)


def config_from_flat(flat: dict) -> RunConfig:
    coeff_kwargs = {}
    for i in range(9):
        key = f"coefficients.alpha{i}"
        if key in flat:
            coeff_kwargs[f"alpha{i}"] = float(flat.pop(key))
    if "coefficients.gamma_ad" in flat:
        coeff_kwargs["gamma_ad"] = float(flat.pop("coefficients.gamma_ad"))
    coeffs = LeslieSet(**coeff_kwargs)

    initial_params = {}
    preset = "shear"
    for key in list(flat):
        if key.startswith("initial."):
            name = key.split(".", 1)[1]
            if name == "preset":
                preset = str(flat.pop(key))
            else:
                initial_params[name] = flat.pop(key)

    def take(key, default):
        return flat.pop(key) if key in flat else default

    cfg = RunConfig(
        coefficients=coeffs,
        grid_cells=int(take("grid.cells", 128)),
        modes=int(take("modes", 16)),
        dt=float(take("dt", 1e-3)),
        t_end=float(take("t_end", 0.5)),
        scheme=str(take("scheme", "galerkin")),
        initial_preset=preset,
        initial_params=initial_params,
        mollify_delta=float(take("mollify_delta", 0.0)),
        output_dir=take("output.dir", None),
        snapshot_every=int(take("output.snapshot_every", 1)),
        picard_tol=float(take("tolerances.picard", 1e-10)),
        energy_tol=float(take("tolerances.energy", 1e-8)),
        cfl=float(take("oracle.cfl", 0.9)),
        limiter=str(take("oracle.limiter", "none")),
    )
    if flat:
        raise ValueError(f"unknown config keys: {sorted(flat)}")
    return cfg


# =============================================================================
# Initial data presets (raw, pre-mollification)
# =============================================================================

@dataclass(frozen=True)
class RawInitialData:
    """Conserved-variable initial fields (rho0, m0, l0, n0) on the grid."""
    rho0: np.ndarray
    m0: np.ndarray
    l0: np.ndarray
    n0: np.ndarray


def build_raw_initial_data(config: RunConfig, grid: Grid1D) -> RawInitialData:
    x = grid.x
    params = config.initial_params
    preset = config.initial_preset
    if preset == "static":
        n_const = float(params.get("n0", 0.5))
        return RawInitialData(np.ones_like(x), np.zeros_like(x),
                              np.zeros_like(x), np.full_like(x, n_const))
    if preset == "shear":
        amp = float(params.get("amplitude", 1.0))
        rho = np.ones_like(x)
        return RawInitialData(rho, np.zeros_like(x),
                              rho * amp * np.sin(np.pi * x),
                              np.full_like(x, np.pi / 4.0))
    if preset == "smooth_random":
        seed = int(params.get("seed", 0))
        rng = np.random.default_rng(seed)
        rho = np.ones_like(x)
        u = np.zeros_like(x)
        v = np.zeros_like(x)
        n = np.full_like(x, float(params.get("n0", 0.5)))
        for k in range(1, 4):
            rho = rho + 0.15 / k * rng.uniform(-1, 1) * np.cos(k * np.pi * x)
            u = u + 0.3 / k * rng.uniform(-1, 1) * np.sin(k * np.pi * x)
            v = v + 0.3 / k * rng.uniform(-1, 1) * np.sin(k * np.pi * x)
            n = n + 0.3 / k * rng.uniform(-1, 1) * np.cos(k * np.pi * x)
        rho = np.maximum(rho, 0.3)
        return RawInitialData(rho, rho * u, rho * v, n)
    if preset == "rough_density":
        profile = str(params.get("profile", "sawtooth"))
        tent = np.minimum(x, 1.0 - x)
        if profile == "sawtooth":
            rho = np.interp(x, _SAW_X, _SAW_Y)
        elif profile == "tent":
            rho = 4.0 * tent
        elif profile == "vacuum_patch":
            rho = np.where((x >= 0.4) & (x <= 0.6), 0.0, 1.0)
        else:
            raise ValueError(f"unknown rough profile {profile!r}")
        # piecewise-linear momentum shapes: kinked but curvature-free in the
        # bulk, so the floor term dominates the mollification error cleanly
        w = 0.6 * tent
        z = -0.4 * tent
        sqrho = np.sqrt(rho)
        # integral of min(y, 1-y), a kinked but C^1 angle profile
        q = np.where(x <= 0.5, 0.5 * x * x, 0.25 - 0.5 * (1.0 - x) ** 2)
        n = np.pi / 4.0 + 0.5 * (4.0 * q - 1.0)
        return RawInitialData(rho, sqrho * w, sqrho * z, n)
    raise ValueError(f"unknown preset {preset!r}")


# =============================================================================
# Mollification
# =============================================================================

def _bump_weights(delta: float, dx: float) -> np.ndarray:
    """Discrete compact bump kernel sampled on the grid and normalized so
    convolution preserves constants exactly.  Degenerates to the identity
    once delta falls below the node spacing."""
    radius = int(np.floor(delta / dx - 1e-12))
    if radius < 1:
        return np.array([1.0])
    k = np.arange(-radius, radius + 1)
    y = k * dx / delta
    w = np.exp(-1.0 / (1.0 - y * y))
    return w / w.sum()


def _convolve_zero_extension(f: np.ndarray, weights: np.ndarray) -> np.ndarray:
    r = (weights.size - 1) // 2
    if r == 0:
        return f.copy()
    padded = np.concatenate([np.zeros(r), f, np.zeros(r)])
    return np.convolve(padded, weights[::-1], mode="valid")


def _convolve_even_extension(f: np.ndarray, weights: np.ndarray) -> np.ndarray:
    r = (weights.size - 1) // 2
    if r == 0:
        return f.copy()
    left = f[1:r + 1][::-1]
    right = f[-r - 1:-1][::-1]
    padded = np.concatenate([left, f, right])
    return np.convolve(padded, weights[::-1], mode="valid")


def mollify_initial_data(raw: RawInitialData, delta: float,
                         grid: Grid1D) -> FlowState:
    """Smooth rough initial data into a strictly positive-density state.

    Density gets a zero-extension convolution plus the additive floor delta,
    velocities are reconstructed from the convolved momentum-over-sqrt-density
    quotient (zero where the raw density vanishes), and the director angle is
    convolved after even reflection, which preserves the Neumann ends.  In
    angle form the unit-norm constraint holds automatically, so no
    renormalization step is needed (exact for angle oscillation below pi).
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    weights = _bump_weights(delta, grid.dx)
    rho = _convolve_zero_extension(raw.rho0, weights) + delta

    with np.errstate(divide="ignore", invalid="ignore"):
        w_u = np.where(raw.rho0 > 0.0, raw.m0 / np.sqrt(raw.rho0), 0.0)
        w_v = np.where(raw.rho0 > 0.0, raw.l0 / np.sqrt(raw.rho0), 0.0)
    u = _convolve_zero_extension(w_u, weights) / np.sqrt(rho)
    v = _convolve_zero_extension(w_v, weights) / np.sqrt(rho)
    u[0] = u[-1] = 0.0
    v[0] = v[-1] = 0.0
    n = _convolve_even_extension(raw.n0, weights)
    return FlowState(time=0.0, rho=rho, u=u, v=v, n=n)


def build_initial_state(config: RunConfig, grid: Grid1D) -> FlowState:
    raw = build_raw_initial_data(config, grid)
    if config.mollify_delta > 0.0:
        return mollify_initial_data(raw, config.mollify_delta, grid)
    if np.min(raw.rho0) <= 0.0:
        raise ValueError("raw density touches zero; set mollify_delta > 0")
    u = raw.m0 / raw.rho0
    v = raw.l0 / raw.rho0
    u[0] = u[-1] = 0.0
    v[0] = v[-1] = 0.0
    return FlowState(time=0.0, rho=raw.rho0.copy(), u=u, v=v, n=raw.n0.copy())


# =============================================================================
# Running and persistence
# =============================================================================

def run_simulation(config: RunConfig) -> galerkin.Trajectory:
    """Validate, build initial data, and integrate with the chosen scheme."""
    report = validate(config.coefficients)
    if not report.is_valid:
        names = ", ".join(c.name for c in report.failed())
        raise InvalidCoefficients(f"coefficient set fails: {names}")
    derived = derive_viscosities(config.coefficients)
    grid = Grid1D(config.grid_cells)
    state = build_initial_state(config, grid)
    if config.scheme == "galerkin":
        solver_cfg = galerkin.SolverConfig(dt=config.dt,
                                           picard_tol=config.picard_tol)
        return galerkin.run(state, config.modes, grid, config.coefficients,
                            derived, solver_cfg, config.t_end,
                            config.snapshot_every)
    oracle_cfg = fdsolver.OracleConfig(cfl=config.cfl, limiter=config.limiter)
    return fdsolver.run_fd(state, grid, config.coefficients, derived,
                           config.dt, config.t_end, oracle_cfg,
                           config.snapshot_every)


def density_bound_flags(traj: galerkin.Trajectory, factor: float = 10.0) -> int:
    """Count snapshots whose density leaves the exponential-in-time envelope
    implied by the initial bounds, widened by `factor`."""
    rho0 = traj.snapshots[0].rho
    rho0_min = float(np.min(rho0))
    if rho0_min <= 0.0:
        return 0
    c1 = max(float(np.max(rho0)), 1.0 / rho0_min)
    flags = 0
    for t, snap in zip(traj.times, traj.snapshots):
        hi = factor * c1 * np.exp(t)
        lo = 1.0 / hi
        if np.max(snap.rho) > hi or np.min(snap.rho) < lo:
            flags += 1
    return flags


def resolve_output_dir(config: RunConfig, override: Optional[str] = None) -> Path:
    base = override if override is not None else config.output_dir
    if base is None:
        raise ValueError("no output directory configured")
    root = os.environ.get(OUTPUT_ROOT_ENV)
    path = Path(root) / base if root else Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_outputs(traj: galerkin.Trajectory, config: RunConfig,
                  outdir: Path) -> dict:
    """Write energy.csv, per-snapshot field files, and summary.json."""
    lines = [diagnostics.EnergyLedger.CSV_HEADER]
    lines += [led.csv_row() for led in traj.ledgers]
    (outdir / "energy.csv").write_text("\n".join(lines) + "\n")

    x = traj.grid.x
    for idx, snap in enumerate(traj.snapshots):
        rows = ["x,rho,u,v,n"]
        for i in range(x.size):
            rows.append(",".join(f"{val:.17g}" for val in
                                 (x[i], snap.rho[i], snap.u[i], snap.v[i],
                                  snap.n[i])))
        (outdir / f"fields_{idx:04d}.csv").write_text("\n".join(rows) + "\n")

    defect, max_defect = diagnostics.energy_budget(traj.times, traj.ledgers)
    totals = np.array([led.total for led in traj.ledgers])
    final = traj.ledgers[-1]
    summary = {
        "config": config.to_dict(),
        "mass_scale": traj.mass_scale,
        "max_defect": max_defect,
        "energy_monotone_within_tol": bool(
            np.all(np.diff(totals) <= config.energy_tol)),
        "density_bound_flags": density_bound_flags(traj),
        "min_rho": float(min(np.min(s.rho) for s in traj.snapshots)),
        "final": {
            "time": final.time, "kinetic": final.kinetic,
            "internal": final.internal, "elastic": final.elastic,
            "total": final.total, "dissipation": final.dissipation,
            "mass": final.mass, "entropy": final.entropy,
            "rho2gamma": final.rho2gamma,
        },
        "metadata": {k: v for k, v in traj.metadata.items()
                     if k != "picard_iterations"},
    }
    picard = traj.metadata.get("picard_iterations")
    if picard:
        summary["metadata"]["picard_iterations_max"] = int(max(picard))
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


# =============================================================================
# Regularization sweep
# =============================================================================

@dataclass
class SweepMember:
    delta: float
    final_energy: float
    max_defect: float
    rho2gamma_spacetime: float
    entropy_series: list
    h_pair_series: list            # [(pair1, pair2), ...] per snapshot
    initial_errors: dict


class SweepAborted(RuntimeError):
    """A sweep member failed; carries the partial report of the members
    that completed."""

    def __init__(self, message: str, partial: "SweepReport"):
        super().__init__(message)
        self.partial = partial


@dataclass
class SweepReport:
    deltas: list
    members: list
    cauchy: dict
    statuses: dict
    observed_orders: dict

    def to_dict(self) -> dict:
        return {
            "deltas": self.deltas,
            "members": [
                {"delta": m.delta, "final_energy": m.final_energy,
                 "max_defect": m.max_defect,
                 "rho2gamma_spacetime": m.rho2gamma_spacetime,
                 "entropy_series": m.entropy_series,
                 "h_pair_series": m.h_pair_series,
                 "initial_errors": m.initial_errors}
                for m in self.members
            ],
            "cauchy": self.cauchy,
            "statuses": self.statuses,
            "observed_orders": self.observed_orders,
        }


def _initial_data_errors(raw: RawInitialData, state: FlowState, delta: float,
                         grid: Grid1D, gamma_ad: float) -> dict:
    """Discrete norms of the mollified-to-raw initial data distances."""
    dx = grid.dx

    def lp(err: np.ndarray, p: float) -> float:
        return float(np.trapezoid(np.abs(err) ** p, dx=dx) ** (1.0 / p))

    with np.errstate(divide="ignore", invalid="ignore"):
        w_u = np.where(raw.rho0 > 0.0, raw.m0 / np.sqrt(raw.rho0), 0.0)
        w_v = np.where(raw.rho0 > 0.0, raw.l0 / np.sqrt(raw.rho0), 0.0)
    diff_n = state.n - raw.n0
    diff_nx = gradient(state.n, dx, neumann_ends=True) - gradient(
        raw.n0, dx, neumann_ends=True)
    p_mom = 2.0 * gamma_ad / (gamma_ad + 1.0)
    return {
        "rho_Lgamma": lp(state.rho - raw.rho0, gamma_ad),
        "n_H1": float(np.sqrt(lp(diff_n, 2.0) ** 2 + lp(diff_nx, 2.0) ** 2)),
        "sqrho_u_L2": lp(np.sqrt(state.rho) * state.u - w_u, 2.0),
        "sqrho_v_L2": lp(np.sqrt(state.rho) * state.v - w_v, 2.0),
        "mom_u_L2g": lp(state.rho * state.u - raw.m0, p_mom),
        "mom_v_L2g": lp(state.rho * state.v - raw.l0, p_mom),
    }


def _sweep_member(args: tuple) -> SweepMember:
    config_dict, delta, subdir = args
    config = config_from_flat(_flat_items(config_dict))
    grid = Grid1D(config.grid_cells)
    raw = build_raw_initial_data(config, grid)
    state = mollify_initial_data(raw, delta, grid)
    derived = derive_viscosities(config.coefficients)

    if config.scheme == "galerkin":
        solver_cfg = galerkin.SolverConfig(dt=config.dt,
                                           picard_tol=config.picard_tol)
        traj = galerkin.run(state, config.modes, grid, config.coefficients,
                            derived, solver_cfg, config.t_end,
                            config.snapshot_every)
    else:
        traj = fdsolver.run_fd(state, grid, config.coefficients, derived,
                               config.dt, config.t_end,
                               fdsolver.OracleConfig(cfl=config.cfl,
                                                     limiter=config.limiter),
                               config.snapshot_every)

    window = np.sin(np.pi * grid.x) ** 2
    pairs = []
    for snap in traj.snapshots:
        h = diagnostics.effective_viscous_flux(snap, config.coefficients, grid)
        pairs.append((diagnostics.integrate(window * snap.rho * h.h1, grid),
                      diagnostics.integrate(window * snap.rho * h.h2, grid)))
    _, max_defect = diagnostics.energy_budget(traj.times, traj.ledgers)
    if subdir is not None:
        path = Path(subdir)
        path.mkdir(parents=True, exist_ok=True)
        write_outputs(traj, config, path)
    return SweepMember(
        delta=delta,
        final_energy=traj.ledgers[-1].total,
        max_defect=max_defect,
        rho2gamma_spacetime=diagnostics.high_integrability(
            traj.times, traj.ledgers),
        entropy_series=[led.entropy for led in traj.ledgers],
        h_pair_series=pairs,
        initial_errors=_initial_data_errors(raw, state, delta, grid,
                                            config.coefficients.gamma_ad),
    )


def _series_distance(a: Sequence, b: Sequence) -> float:
    arr_a = np.asarray(a, dtype=float)
    arr_b = np.asarray(b, dtype=float)
    m = min(arr_a.shape[0], arr_b.shape[0])
    return float(np.max(np.abs(arr_a[:m] - arr_b[:m])))


def _observed_order(deltas: Sequence[float], errors: Sequence[float]) -> float:
    d = np.log(np.asarray(deltas, dtype=float))
    e = np.asarray(errors, dtype=float)
    if d.size < 2:
        return float("nan")
    if np.any(e <= 0.0):
        return float("inf")
    slope = np.polyfit(d, np.log(e), 1)[0]
    return float(slope)


def run_sweep(config: RunConfig, deltas: Sequence[float],
              workers: int = 1, outdir: Optional[Path] = None) -> SweepReport:
    """Mollify the shared raw data at each delta, run the solver, and
    assemble the successive-delta Cauchy distances.

    Trends are reported, never silently asserted: a non-decreasing Cauchy
    series marks its status 'inconclusive'.
    """
    deltas = [float(d) for d in deltas]
    if any(d <= 0.0 for d in deltas):
        raise ValueError("all deltas must be positive")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")

    payload = [(config.to_dict(), d,
                None if outdir is None else str(outdir / f"delta_{d:g}"))
               for d in deltas]
    members = []
    failure: Optional[tuple[float, Exception]] = None
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_member, p) for p in payload]
            for d, fut in zip(deltas, futures):
                try:
                    members.append(fut.result())
                except Exception as exc:
                    failure = (d, exc)
                    break
    else:
        for d, p in zip(deltas, payload):
            try:
                members.append(_sweep_member(p))
            except Exception as exc:
                failure = (d, exc)
                break

    if failure is not None:
        d_bad, exc = failure
        partial = _assemble_report([m.delta for m in members], members)
        raise SweepAborted(
            f"sweep member delta={d_bad:g} failed: {exc}", partial) from exc
    return _assemble_report(deltas, members)


def _assemble_report(deltas: list, members: list) -> SweepReport:
    if not members:
        return SweepReport(deltas=deltas, members=[], cauchy={},
                           statuses={}, observed_orders={})
    cauchy = {
        "entropy": [_series_distance(a.entropy_series, b.entropy_series)
                    for a, b in zip(members, members[1:])],
        "final_energy": [abs(a.final_energy - b.final_energy)
                         for a, b in zip(members, members[1:])],
        "rho2gamma": [abs(a.rho2gamma_spacetime - b.rho2gamma_spacetime)
                      for a, b in zip(members, members[1:])],
        "h_pairing": [_series_distance(a.h_pair_series, b.h_pair_series)
                      for a, b in zip(members, members[1:])],
    }

    def trend_status(series: Sequence[float]) -> str:
        if len(series) < 2:
            return "inconclusive"
        return "decreasing" if all(b < a for a, b in zip(series, series[1:])) \
            else "inconclusive"

    statuses = {name: trend_status(vals) for name, vals in cauchy.items()}
    vals = [m.rho2gamma_spacetime for m in members]
    statuses["rho2gamma_spread"] = (max(vals) / min(vals)
                                    if min(vals) > 0 else float("inf"))

    orders = {}
    for key in members[0].initial_errors:
        errs = [m.initial_errors[key] for m in members]
        orders[key] = _observed_order(deltas, errs)

    return SweepReport(deltas=deltas, members=members, cauchy=cauchy,
                       statuses=statuses, observed_orders=orders)


def write_sweep(report: SweepReport, config: RunConfig, outdir: Path) -> None:
    (outdir / "sweep.json").write_text(
        json.dumps({"config": config.to_dict(), **report.to_dict()},
                   indent=2, sort_keys=True) + "\n")
