"""Interval-by-interval decomposition v = z + w for the L^2 x L^2 global theory.

On each interval of length T the quadruple (u, v, w, z) evolves by

    i u_t + u_xx = alpha u v + beta |u|^2 u
    v_t + gamma v_xxx - delta v_xxxxx + v v_x = epsilon (|u|^2)_x
    w_t + gamma w_xxx - delta w_xxxxx + 1/2 ((v + z) w)_x = epsilon (|u|^2)_x
    z_t + gamma z_xxx - delta z_xxxxx + z z_x = 0

from w = 0, z = v. At the end of the interval z and w are reset, and the
growth of ||v||_{L^2} is tracked through ||v(T)|| <= ||z(T)|| + ||w(T)||
with ||z(T)|| = ||v(0)||.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import SolverConfig, _step_plan
from .errors import BlowupDetected, InsufficientData
from .etd import ETDRK4
from .propagators import PhysParams, kawahara_symbol, schrodinger_symbol
from .spectral import Grid, dealias_mask, l2_norm

log = logging.getLogger(__name__)


@dataclass
class QuadState:
    grid: Grid
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    z: np.ndarray
    t: float = 0.0

    @classmethod
    def initial(cls, grid: Grid, u0, v0, t: float = 0.0) -> "QuadState":
        v0 = np.asarray(v0, dtype=float)
        return cls(grid, np.asarray(u0, dtype=complex), v0.copy(), np.zeros_like(v0), v0.copy(), t)

    def identity_residual(self) -> float:
        return l2_norm(self.v - self.z - self.w, self.grid)


@dataclass(frozen=True)
class IntervalReport:
    interval_index: int
    T: float
    w_norm_end: float
    v_norm_end: float
    z_norm_end: float
    identity_residual: float
    v_norm_start: float
    u_norm_end: float

    FIELDS = (
        "interval_index",
        "T",
        "w_norm_end",
        "v_norm_end",
        "z_norm_end",
        "identity_residual",
        "v_norm_start",
        "u_norm_end",
    )

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


class QuadSystem:
    def __init__(self, grid: Grid, params: PhysParams, config: SolverConfig):
        self.grid = grid
        self.params = params
        self.config = config
        self.n = n = grid.n_points
        self.mask = dealias_mask(n, config.dealias_rule)
        self.ik_odd = 1j * grid.odd_wavenumbers
        k = kawahara_symbol(grid, params)
        self.stepper = ETDRK4(np.concatenate([schrodinger_symbol(grid), k, k, k]), self.spectral_nonlinear)

    def to_spectral(self, st: QuadState) -> np.ndarray:
        return np.concatenate([np.fft.fft(f) for f in (st.u, st.v, st.w, st.z)])

    def to_state(self, y, t) -> QuadState:
        n = self.n
        u = np.fft.ifft(y[:n])
        v, w, z = (np.fft.ifft(y[i * n : (i + 1) * n]).real for i in (1, 2, 3))
        return QuadState(self.grid, u, v, w, z, t)

    def physical(self, y):
        n = self.n
        return (np.fft.ifft(y[:n]),) + tuple(np.fft.ifft(y[i * n : (i + 1) * n]).real for i in (1, 2, 3))

    def spectral_nonlinear(self, y) -> np.ndarray:
        u, v, w, z = self.physical(y)
        p, cfg = self.params, self.config
        n_u, n_v, n_w, n_z = quad_terms(u, v, w, z, p, cfg)
        fft, m, ik = np.fft.fft, self.mask, self.ik_odd
        return np.concatenate([m * -1j * fft(n_u), m * ik * fft(n_v), m * ik * fft(n_w), m * ik * fft(n_z)])


def quad_terms(u, v, w, z, params: PhysParams, config: SolverConfig):
    """Pointwise nonlinear fluxes: u-term g with u_t = ... - i g, and x-fluxes for v, w, z."""
    a, b, _, _, eps = params.as_tuple()
    abs_u2 = u.real**2 + u.imag**2
    g = np.zeros_like(u)
    if config.enabled("coupling_uv"):
        g = g + a * u * v
    if config.enabled("cubic_u"):
        g = g + b * abs_u2 * u
    source = eps * abs_u2 if config.enabled("source_u2") else 0.0
    if config.enabled("burgers_v"):
        fv = -0.5 * v * v + source
        fw = -0.5 * (v + z) * w + source
        fz = -0.5 * z * z
    else:
        fv = source + 0.0 * v
        fw = source + 0.0 * w
        fz = 0.0 * z
    return g, fv, fw, fz


def quad_rhs(state: QuadState, params: PhysParams, config: SolverConfig):
    """Dealiased nonlinear increments (du, dv, dw, dz) in physical space."""
    system = QuadSystem(state.grid, params, config)
    y = system.spectral_nonlinear(system.to_spectral(state))
    _, dv, dw, dz = system.physical(y)
    return np.fft.ifft(y[: system.n]), dv, dw, dz


def evolve_interval(state: QuadState, T: float, params: PhysParams, config: SolverConfig, system: QuadSystem | None = None) -> QuadState:
    """Integrate the quadruple system over one interval of length T."""
    if system is None:
        system = QuadSystem(state.grid, params, config)
    y = system.to_spectral(state)
    n_full, rest = _step_plan(0.0, T, config.dt)
    t = state.t
    for k in range(n_full):
        y = system.stepper.step(y, config.dt)
        t = state.t + (k + 1) * config.dt
        if not np.all(np.isfinite(y)):
            raise BlowupDetected(f"non-finite field at t={t:.6g}", t=t)
    if rest > 0.0:
        y = system.stepper.step(y, rest)
        if not np.all(np.isfinite(y)):
            raise BlowupDetected(f"non-finite field at t={state.t + T:.6g}", t=state.t + T)
    return system.to_state(y, state.t + T)


def smallness_advisory(u0_norm: float, T: float, constant: float = 1.0) -> bool:
    """True when C^3 T^{5/8} ||u0||^3 <= 1 with a nominal constant C."""
    return constant**3 * T ** (5 / 8) * u0_norm**3 <= 1.0


def run_globalization(
    u0,
    v0,
    params: PhysParams,
    config: SolverConfig,
    T: float,
    m: int,
    grid: Grid,
) -> list[IntervalReport]:
    """Run m intervals of length T, resetting z = v and w = 0 at each start."""
    if not T > 0:
        raise ValueError(f"T must be positive, got {T!r}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m!r}")
    system = QuadSystem(grid, params, config)
    u = np.asarray(grid.check(u0), dtype=complex)
    v = np.asarray(grid.check(v0), dtype=float)
    if config.project_initial:
        u = np.fft.ifft(system.mask * np.fft.fft(u))
        v = np.fft.ifft(system.mask * np.fft.fft(v)).real
    u_norm = l2_norm(u, grid)
    if not smallness_advisory(u_norm, T):
        log.warning("T^(5/8) ||u0||^3 = %.3g exceeds 1; interval length may be outside the perturbative regime", T ** (5 / 8) * u_norm**3)

    reports = []
    t = 0.0
    for i in range(m):
        start = QuadState.initial(grid, u, v, t)
        v_start = l2_norm(v, grid)
        try:
            end = evolve_interval(start, T, params, config, system)
        except BlowupDetected as exc:
            raise BlowupDetected(f"interval {i}: {exc}", t=exc.t, interval_index=i) from exc
        reports.append(
            IntervalReport(
                interval_index=i,
                T=T,
                w_norm_end=l2_norm(end.w, grid),
                v_norm_end=l2_norm(end.v, grid),
                z_norm_end=l2_norm(end.z, grid),
                identity_residual=end.identity_residual(),
                v_norm_start=v_start,
                u_norm_end=l2_norm(end.u, grid),
            )
        )
        u, v, t = end.u, end.v, end.t
    return reports


def doubling_interval_count(v0_norm: float, u0_norm: float, T: float) -> float:
    """Heuristic number of intervals before ||v|| doubles: ||v0|| / (T^{1/2} ||u0||^2)."""
    return v0_norm / (np.sqrt(T) * u0_norm**2)


def fitted_growth_constant(reports: list[IntervalReport], u0_norm: float, v0_norm: float) -> float:
    """Smallest C with ||v(kT)|| <= ||v0|| + C k T^{1/2} ||u0||^2 for all reported k."""
    if u0_norm == 0:
        raise InsufficientData("u0 is zero; the growth constant is undefined")
    best = 0.0
    for k, rep in enumerate(reports, start=1):
        best = max(best, (rep.v_norm_end - v0_norm) / (k * np.sqrt(rep.T) * u0_norm**2))
    return best


# --------------------------------------------------------------------------
# amplitude / interval sweeps


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    amplitudes: tuple
    w_norms: tuple


def _w_norm_after(args) -> float:
    u0, v0, params, config, T, grid = args
    state = QuadState.initial(grid, u0, v0)
    return l2_norm(evolve_interval(state, T, params, config).w, grid)


def _map(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def growth_fit(
    amplitudes,
    profile,
    v0,
    params: PhysParams,
    config: SolverConfig,
    T: float,
    grid: Grid,
    workers: int = 1,
) -> GrowthFit:
    """Log-log slope of ||w(T)|| against the amplitude a of u0 = a * profile."""
    amps = np.asarray(sorted(set(float(a) for a in amplitudes)))
    if amps.size < 4:
        raise InsufficientData(f"need at least 4 distinct amplitudes, got {amps.size}")
    if np.any(amps <= 0):
        raise InsufficientData("amplitudes must be positive")
    profile = np.asarray(profile, dtype=complex)
    if not np.any(profile):
        raise InsufficientData("u0 profile is identically zero")
    jobs = [(a * profile, v0, params, config, T, grid) for a in amps]
    norms = np.array(_map(_w_norm_after, jobs, workers))
    if np.any(norms <= 0) or not np.all(np.isfinite(norms)):
        raise InsufficientData("w(T) vanished for some amplitude; nothing to fit")
    slope, intercept = np.polyfit(np.log(amps), np.log(norms), 1)
    return GrowthFit(float(slope), float(intercept), tuple(amps), tuple(norms))


@dataclass(frozen=True)
class BoundSweep:
    """Ratios ||w(T)|| / (T^{1/2} ||u0||^2) over a (T, amplitude) sweep."""

    constant: float
    ratios: dict
    t_exponent: float


def bound_sweep(
    intervals,
    amplitudes,
    profile,
    v0,
    params: PhysParams,
    config: SolverConfig,
    grid: Grid,
    workers: int = 1,
) -> BoundSweep:
    profile = np.asarray(profile, dtype=complex)
    pnorm = l2_norm(profile, grid)
    if pnorm == 0:
        raise InsufficientData("u0 profile is identically zero")
    keys = [(float(T), float(a)) for T in intervals for a in amplitudes]
    jobs = [(a * profile, v0, params, config, T, grid) for T, a in keys]
    norms = _map(_w_norm_after, jobs, workers)
    ratios = {key: w / (np.sqrt(key[0]) * (key[1] * pnorm) ** 2) for key, w in zip(keys, norms)}
    # T-exponent of ||w(T)|| at the smallest amplitude; reported, not asserted
    a0 = min(float(a) for a in amplitudes)
    ts = sorted(float(T) for T in intervals)
    ws = [dict(zip(keys, norms))[(T, a0)] for T in ts]
    t_exp = float(np.polyfit(np.log(ts), np.log(ws), 1)[0]) if len(ts) >= 2 else float("nan")
    return BoundSweep(max(ratios.values()), ratios, t_exp)
