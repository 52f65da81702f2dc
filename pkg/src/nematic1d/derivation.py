"""Numerical certification of the tensor-to-scalar reduction and the energy
algebra: assembles the full 2x2 anisotropic stress from its nine terms, the
kinematic transport vector, and the completed-squares dissipation form, and
fuzz-tests the identities relating them to the flux brackets and the scalar
director equation.

All checks are pointwise algebraic facts evaluated on free-variable samples;
no PDE solve is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import (LeslieSet, example_set, quadratic_form,
                           quadratic_form_expanded, random_valid_set,
                           inverse_matrix_entries, matrix_entries)
from .fields import Grid1D, flux_bracket

# Richardson extrapolation of the x-derivative: three central-difference
# levels starting from this base step isolate algebra errors from
# discretization error.
RICHARDSON_BASE_STEP = 1e-3


@dataclass(frozen=True)
class KinematicSample:
    """Free local variables standing for field values and derivatives at a
    point; no consistency is assumed between them."""
    n: float
    n_x: float = 0.0
    n_xx: float = 0.0
    u_x: float = 0.0
    u_xx: float = 0.0
    v_x: float = 0.0
    v_xx: float = 0.0
    ndot: float = 0.0
    ndot_x: float = 0.0


@dataclass(frozen=True)
class StressSample:
    """Assembled pointwise quantities: the stress matrix, the kinematic
    transport vector g, and the constraint-multiplier vector."""
    sigma: np.ndarray
    g: np.ndarray
    lambda_n: np.ndarray


def assemble_stress(s: KinematicSample, c: LeslieSet) -> StressSample:
    """Sum the nine stress terms from the rate-of-strain decomposition.

    D and omega are the symmetric/antisymmetric parts of the velocity
    gradient for fields depending on x alone; N is the director rate
    relative to the rotating frame.
    """
    cs, sn = np.cos(s.n), np.sin(s.n)
    nvec = np.array([cs, sn])
    D = np.array([[s.u_x, 0.5 * s.v_x], [0.5 * s.v_x, 0.0]])
    N = (s.ndot - 0.5 * s.v_x) * np.array([-sn, cs])
    Dn = D @ nvec
    nDn = nvec @ Dn
    I2 = np.eye(2)
    a0, a1, a2, a3, a4, a5, a6, a7, a8 = c.alphas()

    sigma = (a0 * nDn * I2
             + a1 * nDn * np.outer(nvec, nvec)
             + a2 * np.outer(N, nvec)
             + a3 * np.outer(nvec, N)
             + a4 * D
             + a5 * np.outer(Dn, nvec)
             + a6 * np.outer(nvec, Dn)
             + a7 * np.trace(D) * I2
             + a8 * np.trace(D) * np.outer(nvec, nvec))

    g1 = a3 - a2
    g2 = a6 - a5
    g = g1 * N + g2 * Dn - g2 * nDn * nvec
    lambda_n = s.n_x * s.n_x * nvec
    return StressSample(sigma=sigma, g=g, lambda_n=lambda_n)


# =============================================================================
# Analytic trigonometric test profiles
# =============================================================================

@dataclass(frozen=True)
class TrigProfile:
    """Smooth test fields u, v, n, ndot built from single sine/cosine modes,
    with closed-form derivatives of every quantity the checks need.

    u = au sin(ku pi x), v = av sin(kv pi x),
    n = n0 + an cos(kn pi x), ndot = ad cos(kd pi x).
    """
    au: float = 1.0
    ku: int = 1
    av: float = 1.0
    kv: int = 2
    an: float = 1.0
    kn: int = 1
    n0: float = 0.0
    ad: float = 0.5
    kd: int = 1

    def sample(self, x) -> KinematicSample:
        x = np.asarray(x, dtype=float)
        wu, wv = self.ku * np.pi, self.kv * np.pi
        wn, wd = self.kn * np.pi, self.kd * np.pi
        return KinematicSample(
            n=self.n0 + self.an * np.cos(wn * x),
            n_x=-self.an * wn * np.sin(wn * x),
            n_xx=-self.an * wn * wn * np.cos(wn * x),
            u_x=self.au * wu * np.cos(wu * x),
            u_xx=-self.au * wu * wu * np.sin(wu * x),
            v_x=self.av * wv * np.cos(wv * x),
            v_xx=-self.av * wv * wv * np.sin(wv * x),
            ndot=self.ad * np.cos(wd * x),
            ndot_x=-self.ad * wd * np.sin(wd * x),
        )


def standard_profiles() -> list[TrigProfile]:
    """Five fixed smooth profiles exercising different mode mixes."""
    return [
        TrigProfile(au=1.0, ku=1, av=1.0, kv=2, an=1.0, kn=1, n0=0.0, ad=0.5, kd=1),
        TrigProfile(au=0.7, ku=2, av=-0.4, kv=1, an=0.6, kn=2, n0=0.8, ad=-0.3, kd=2),
        TrigProfile(au=-0.5, ku=3, av=0.9, kv=3, an=0.3, kn=1, n0=-0.4, ad=0.8, kd=1),
        TrigProfile(au=0.2, ku=1, av=0.3, kv=4, an=1.2, kn=3, n0=0.2, ad=0.1, kd=3),
        TrigProfile(au=1.3, ku=2, av=0.6, kv=2, an=0.5, kn=2, n0=1.5, ad=-0.6, kd=2),
    ]


def random_profile(rng: np.random.Generator) -> TrigProfile:
    return TrigProfile(
        au=rng.uniform(-1.5, 1.5), ku=int(rng.integers(1, 4)),
        av=rng.uniform(-1.5, 1.5), kv=int(rng.integers(1, 4)),
        an=rng.uniform(-1.2, 1.2), kn=int(rng.integers(1, 4)),
        n0=rng.uniform(-np.pi, np.pi), ad=rng.uniform(-1.0, 1.0),
        kd=int(rng.integers(1, 4)),
    )


# =============================================================================
# Identity checks
# =============================================================================

def _richardson_dx(f, x: np.ndarray, h: float = RICHARDSON_BASE_STEP) -> np.ndarray:
    """Three-level Richardson extrapolation of d/dx for a vectorized f(x)."""
    def central(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    d0, d1, d2 = central(h), central(h / 2), central(h / 4)
    r0 = (4.0 * d1 - d0) / 3.0
    r1 = (4.0 * d2 - d1) / 3.0
    return (16.0 * r1 - r0) / 15.0


def check_divergence_identity(c: LeslieSet, profile: TrigProfile,
                              grid: Grid1D, _flip_sign: bool = False) -> float:
    """Max relative gap between d/dx of the assembled stress column
    (sigma11, sigma21) and d/dx of the flux brackets, at every node.

    Both sides use the same Richardson differentiation, so the result
    measures the algebraic agreement of the two assembly routes.
    `_flip_sign` corrupts the director-rate term on the flux side; it exists
    so the verification suite can prove it detects broken formulas.
    """
    x = grid.x

    def stress_col(xx):
        xx = np.atleast_1d(xx)
        col = np.empty((2, xx.size))
        for i, xi in enumerate(xx):
            s = profile.sample(xi)
            sigma = assemble_stress(s, c).sigma
            col[0, i] = sigma[0, 0]
            col[1, i] = sigma[1, 0]
        return col

    def bracket(xx):
        s = profile.sample(xx)
        sign = -1.0 if _flip_sign else 1.0
        f1, f2 = flux_bracket(c, s.u_x, s.v_x, s.n, sign * s.ndot)
        return np.stack([f1, f2])

    lhs = _richardson_dx(stress_col, x)
    rhs = _richardson_dx(bracket, x)
    scale = np.maximum(np.max(np.abs(rhs)), 1.0)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def check_director_identity(s: KinematicSample, c: LeslieSet) -> float:
    """Project the vector director equation onto the tangent direction and
    subtract the scalar double-angle form; returns the difference.

    The normal projection vanishes identically because the constraint
    multiplier absorbs the |n_x|^2 curvature term exactly.
    """
    assembled = assemble_stress(s, c)
    cs, sn = np.cos(s.n), np.sin(s.n)
    # vector residual g - Delta(n-vector) - lambda*n, whose curvature parts
    # cancel, leaving g minus the tangential diffusion
    tangential = assembled.g @ np.array([-sn, cs]) - s.n_xx
    g1 = c.gamma1
    g2 = c.gamma2
    scalar = (g1 * s.ndot - 0.5 * g2 * s.u_x * np.sin(2.0 * s.n)
              - 0.5 * (g1 - g2 * np.cos(2.0 * s.n)) * s.v_x - s.n_xx)
    return float(tangential - scalar)


def director_normal_component(s: KinematicSample, c: LeslieSet) -> float:
    """Normal-direction component of the vector director equation residual."""
    assembled = assemble_stress(s, c)
    cs, sn = np.cos(s.n), np.sin(s.n)
    return float(assembled.g @ np.array([cs, sn]))


def check_energy_identity(a: float, b: float, m: float, n: float,
                          c: LeslieSet) -> float:
    """Difference between the direct dissipation quadratic form and its
    completed-squares expansion, at one sample (a, b, m, n) standing for
    (u_x, v_x, ndot, n).

    The expansion carries the longitudinal-viscosity term with coefficient
    (alpha4 + alpha7); fuzzing confirms that normalization (a doubled
    coefficient breaks the identity by exactly (alpha4+alpha7) a^2).
    """
    g1 = c.gamma1
    g2 = c.gamma2
    s2n = np.sin(2.0 * n)
    c2n = np.cos(2.0 * n)
    lhs = (g1 * m * m - g2 * a * m * s2n - (g1 - g2 * c2n) * b * m
           + quadratic_form(c, n, a, b))

    a0, a1, _, _, a4, a5, a6, a7, a8 = c.alphas()
    q = a1 + g2 * g2 / g1
    sq = (np.sqrt(g1) * m
          - (g2 * a * s2n + (g1 - g2 * c2n) * b) / (2.0 * np.sqrt(g1))) ** 2
    rhs = (sq
           + (0.25 * (-q) + (a4 + a7)) * a * a
           + 0.25 * (2 * a4 + a5 + a6 - g2 * g2 / g1) * b * b
           + 0.25 * q * (a * c2n + b * s2n) ** 2
           + (a0 + a1 + a5 + a6 + a8)
           * ((a * np.cos(n) + 0.5 * b * np.sin(n)) ** 2
              - 0.25 * b * b * np.sin(n) ** 2))
    return float(lhs - rhs)


# =============================================================================
# The full identity suite (drives the `verify` CLI command)
# =============================================================================

@dataclass(frozen=True)
class SuiteRow:
    name: str
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.threshold


def run_identity_suite(seed: int = 0, samples: int = 10_000,
                       num_sets: int = 20, grid_cells: int = 64,
                       canary: bool = False) -> list[SuiteRow]:
    """Fuzz every identity over random admissible coefficient sets.

    With canary=True the divergence check runs with a deliberately corrupted
    director-rate sign and is expected to fail; this proves the suite has
    teeth.
    """
    rng = np.random.default_rng(seed)
    grid = Grid1D(grid_cells)
    sets = [example_set()] + [random_valid_set(rng) for _ in range(num_sets - 1)]
    profiles = standard_profiles()

    rows: list[SuiteRow] = []

    worst = 0.0
    for cs in sets:
        for p in profiles:
            worst = max(worst,
                        check_divergence_identity(cs, p, grid, _flip_sign=canary))
    rows.append(SuiteRow("divergence: stress column vs flux bracket", worst, 1e-8))

    worst = 0.0
    per_set = max(1, samples // len(sets))
    for cs in sets:
        for _ in range(per_set):
            s = KinematicSample(
                n=rng.uniform(-np.pi, np.pi),
                n_x=rng.uniform(-2, 2), n_xx=rng.uniform(-20, 20),
                u_x=rng.uniform(-3, 3), v_x=rng.uniform(-3, 3),
                ndot=rng.uniform(-3, 3))
            worst = max(worst, abs(check_director_identity(s, cs)))
            worst = max(worst, abs(director_normal_component(s, cs)))
    rows.append(SuiteRow("director: vector projection vs scalar form", worst, 1e-12))

    worst = 0.0
    for cs in sets:
        a = rng.uniform(-3, 3, per_set)
        b = rng.uniform(-3, 3, per_set)
        m = rng.uniform(-3, 3, per_set)
        nn = rng.uniform(-np.pi, np.pi, per_set)
        scale = 1.0 + np.max(a * a + b * b + m * m)
        res = np.array([check_energy_identity(a[i], b[i], m[i], nn[i], cs)
                        for i in range(per_set)])
        worst = max(worst, float(np.max(np.abs(res)) / scale))
    rows.append(SuiteRow("energy: direct vs completed squares (scaled)", worst, 1e-11))

    worst = 0.0
    for cs in sets:
        nn = rng.uniform(-np.pi, np.pi, per_set)
        y1 = rng.uniform(-3, 3, per_set)
        y2 = rng.uniform(-3, 3, per_set)
        direct = quadratic_form(cs, nn, y1, y2)
        expanded = quadratic_form_expanded(cs, nn, y1, y2)
        scale = 1.0 + np.max(np.abs(direct))
        worst = max(worst, float(np.max(np.abs(direct - expanded)) / scale))
    rows.append(SuiteRow("quadratic form: entries vs expansion (scaled)", worst, 1e-12))

    worst = 0.0
    inv11_min = np.inf
    for cs in sets:
        nn = rng.uniform(-np.pi, np.pi, 64)
        a11, a12, a21, a22 = matrix_entries(cs, nn)
        i11, i12, i21, i22 = inverse_matrix_entries(cs, nn)
        worst = max(worst, float(np.max(np.abs(i11 * a11 + i12 * a21 - 1.0))))
        worst = max(worst, float(np.max(np.abs(i11 * a12 + i12 * a22))))
        worst = max(worst, float(np.max(np.abs(i21 * a11 + i22 * a21))))
        worst = max(worst, float(np.max(np.abs(i21 * a12 + i22 * a22 - 1.0))))
        inv11_min = min(inv11_min, float(np.min(i11)))
    rows.append(SuiteRow("inverse: A^-1 A = I", worst, 1e-12))
    rows.append(SuiteRow("inverse: (A^-1)_11 > 0 (negated min)", -inv11_min, 0.0))

    return rows
