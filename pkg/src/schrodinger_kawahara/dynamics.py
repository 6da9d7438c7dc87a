"""Time integration of the coupled Schrodinger-Kawahara system.

    i u_t + u_xx = alpha u v + beta |u|^2 u
    v_t + gamma v_xxx - delta v_xxxxx + v v_x = epsilon (|u|^2)_x

Fields live on a periodic :class:`~schrodinger_kawahara.spectral.Grid`. The
linear dispersion is integrated exactly inside an ETDRK4 scheme, the
nonlinear terms are formed pseudo-spectrally and dealiased.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import BlowupDetected
from .etd import ETDRK4
from .propagators import PhysParams, kawahara_symbol, schrodinger_symbol
from .spectral import Grid, dealias_mask, integrate_quadrature, l2_norm, spectral_derivative

NONLINEAR_SWITCHES = frozenset({"coupling_uv", "cubic_u", "burgers_v", "source_u2"})
ENERGY_FORMS = ("conserved", "opposite_sign")


@dataclass(frozen=True)
class SolverConfig:
    """Integrator settings.

    ``disable_nonlinear`` switches individual nonlinear terms off; it exists
    for isolating terms in tests. With ``project_initial`` the initial data
    are truncated to the dealiased band before integrating, which makes the
    discrete system a Galerkin truncation.
    """

    dt: float = 1e-3
    dealias_rule: Fraction = Fraction(1, 2)
    disable_nonlinear: frozenset = frozenset()
    project_initial: bool = True

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        object.__setattr__(self, "dealias_rule", Fraction(self.dealias_rule).limit_denominator(64))
        switches = frozenset(self.disable_nonlinear)
        unknown = switches - NONLINEAR_SWITCHES
        if unknown:
            raise ValueError(f"unknown nonlinear switches: {sorted(unknown)}")
        object.__setattr__(self, "disable_nonlinear", switches)

    def enabled(self, name: str) -> bool:
        return name not in self.disable_nonlinear


@dataclass
class CoupledState:
    grid: Grid
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.grid.check(self.u), dtype=complex)
        v = np.asarray(self.grid.check(self.v))
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag), initial=0.0) > 1e-12 * (1 + np.max(np.abs(v.real), initial=0.0)):
                raise ValueError("v must be real")
            v = v.real
        self.v = np.asarray(v, dtype=float)
        self.t = float(self.t)

    def copy(self) -> "CoupledState":
        return CoupledState(self.grid, self.u.copy(), self.v.copy(), self.t)


class ConservedSet(NamedTuple):
    mass: float
    momentum: float
    energy: float


class DerivativeCheck(NamedTuple):
    """Instantaneous dM/dt, dQ/dt, dE/dt and the magnitudes they are measured against."""

    dmass: float
    dmomentum: float
    denergy: float
    mass_scale: float
    momentum_scale: float
    energy_scale: float


@dataclass
class Diagnostics:
    """Time series recorded by :func:`integrate` at the observer cadence."""

    rows: list = field(default_factory=list)

    def append(self, t, conserved: ConservedSet, norms: dict):
        self.rows.append({"t": t, **conserved._asdict(), **norms})

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def __len__(self):
        return len(self.rows)


# --------------------------------------------------------------------------
# discrete system


class CoupledSystem:
    """Spectral right-hand side and ETDRK4 stepper for the coupled system.

    ``schrodinger_coeff`` multiplies u_xx. It is 1 for the system itself and
    is exposed so that the dilated system (coefficient lambda^3 on u_xx) can
    be solved with the same machinery.
    """

    def __init__(
        self,
        grid: Grid,
        params: PhysParams,
        config: SolverConfig,
        schrodinger_coeff: float = 1.0,
    ):
        self.grid = grid
        self.params = params
        self.config = config
        self.schrodinger_coeff = schrodinger_coeff
        n = grid.n_points
        self.n = n
        self.mask = dealias_mask(n, config.dealias_rule)
        self.ik_odd = 1j * grid.odd_wavenumbers
        linear = np.concatenate([schrodinger_symbol(grid, schrodinger_coeff), kawahara_symbol(grid, params)])
        self.stepper = ETDRK4(linear, self.spectral_nonlinear)

    # spectral layout: y = [u_hat, v_hat] with numpy's unnormalised FFT
    def to_spectral(self, u, v) -> np.ndarray:
        return np.concatenate([np.fft.fft(u), np.fft.fft(v)])

    def to_physical(self, y) -> tuple[np.ndarray, np.ndarray]:
        n = self.n
        return np.fft.ifft(y[:n]), np.fft.ifft(y[n:]).real

    def project(self, y) -> np.ndarray:
        return y * np.concatenate([self.mask, self.mask])

    def spectral_nonlinear(self, y) -> np.ndarray:
        p, cfg = self.params, self.config
        u, v = self.to_physical(y)
        g = np.zeros(self.n, dtype=complex)
        if cfg.enabled("coupling_uv") and p.alpha != 0:
            g += p.alpha * u * v
        abs_u2 = (u.real**2 + u.imag**2) if cfg.enabled("cubic_u") or cfg.enabled("source_u2") else None
        if cfg.enabled("cubic_u") and p.beta != 0:
            g += p.beta * abs_u2 * u
        nu = -1j * np.fft.fft(g)

        h = np.zeros(self.n)
        if cfg.enabled("burgers_v"):
            h -= 0.5 * v * v
        if cfg.enabled("source_u2") and p.epsilon != 0:
            h += p.epsilon * abs_u2
        nv = self.ik_odd * np.fft.fft(h)
        return np.concatenate([nu * self.mask, nv * self.mask])

    def step_spectral(self, y, h: float, t: float = 0.0) -> np.ndarray:
        out = self.stepper.step(y, h)
        if not np.all(np.isfinite(out)):
            raise BlowupDetected(f"non-finite field after step to t={t + h:.6g}", t=t + h)
        return out


def nonlinear_rhs(state: CoupledState, params: PhysParams, config: SolverConfig):
    """Dealiased nonlinear parts (du, dv) of the time derivatives in physical space.

    du = -i (alpha u v + beta |u|^2 u), dv = -v v_x + epsilon (|u|^2)_x.
    """
    system = CoupledSystem(state.grid, params, config)
    y = system.spectral_nonlinear(system.to_spectral(state.u, state.v))
    n = state.grid.n_points
    return np.fft.ifft(y[:n]), np.fft.ifft(y[n:]).real


def _check_finite(state: CoupledState):
    if not (np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.v))):
        raise BlowupDetected(f"non-finite field in state at t={state.t:.6g}", t=state.t)


def etdrk4_step(state: CoupledState, params: PhysParams, config: SolverConfig, system: CoupledSystem | None = None) -> CoupledState:
    """Advance ``state`` by one step of size ``config.dt``."""
    _check_finite(state)
    if system is None:
        system = CoupledSystem(state.grid, params, config)
    y = system.step_spectral(system.to_spectral(state.u, state.v), config.dt, state.t)
    u, v = system.to_physical(y)
    return CoupledState(state.grid, u, v, state.t + config.dt)


def _step_plan(t0: float, t_end: float, dt: float) -> tuple[int, float]:
    span = t_end - t0
    n_full = int(math.floor(span / dt * (1 + 1e-12)))
    rest = span - n_full * dt
    if rest <= 1e-12 * max(abs(t_end), dt):
        rest = 0.0
    return n_full, rest


def integrate(
    state0: CoupledState,
    t_end: float,
    params: PhysParams,
    config: SolverConfig,
    observer: Callable | None = None,
    every: int = 1,
    energy_form: str = "conserved",
    schrodinger_coeff: float = 1.0,
) -> tuple[CoupledState, Diagnostics]:
    """Integrate from ``state0.t`` to ``t_end``.

    Full steps of ``config.dt`` are followed by one fractional step. The
    observer, if given, is called as ``observer(t, conserved, norms)`` at the
    initial time, after every ``every``-th step and at ``t_end``; the same
    records are collected in the returned :class:`Diagnostics`.
    """
    if t_end < state0.t:
        raise ValueError(f"t_end={t_end} precedes the initial time {state0.t}")
    _check_finite(state0)
    grid = state0.grid
    system = CoupledSystem(grid, params, config, schrodinger_coeff=schrodinger_coeff)
    diagnostics = Diagnostics()

    def record(t, y):
        u, v = system.to_physical(y)
        st = CoupledState(grid, u, v, t)
        cons = conserved_quantities(st, params, energy_form=energy_form)
        norms = {"l2_u": l2_norm(u, grid), "l2_v": l2_norm(v, grid), "l2_w": float("nan")}
        diagnostics.append(t, cons, norms)
        if observer is not None:
            observer(t, cons, norms)

    if t_end == state0.t:
        record(state0.t, system.to_spectral(state0.u, state0.v))
        return state0.copy(), diagnostics

    y = system.to_spectral(state0.u, state0.v)
    if config.project_initial:
        y = system.project(y)
    t0 = state0.t
    n_full, rest = _step_plan(t0, t_end, config.dt)
    record(t0, y)
    t = t0
    for k in range(1, n_full + 1):
        y = system.step_spectral(y, config.dt, t)
        t = t0 + k * config.dt
        if k % every == 0 and not (k == n_full and rest == 0.0):
            record(t, y)
    if rest > 0.0:
        y = system.step_spectral(y, rest, t)
    t = t_end
    record(t, y)
    u, v = system.to_physical(y)
    return CoupledState(grid, u, v, t), diagnostics


class KawaharaSystem:
    """v_t + gamma v_xxx - delta v_xxxxx + v v_x = 0 alone, on real spectra."""

    def __init__(self, grid: Grid, params: PhysParams, config: SolverConfig):
        self.grid = grid
        self.mask = dealias_mask(grid.n_points, config.dealias_rule)
        self.ik_odd = 1j * grid.odd_wavenumbers
        self.burgers = config.enabled("burgers_v")
        self.stepper = ETDRK4(kawahara_symbol(grid, params), self.spectral_nonlinear)

    def spectral_nonlinear(self, y):
        if not self.burgers:
            return np.zeros_like(y)
        z = np.fft.ifft(y).real
        return self.mask * self.ik_odd * np.fft.fft(-0.5 * z * z)


def kawahara_integrate(v0, t_end: float, params: PhysParams, config: SolverConfig, grid: Grid) -> np.ndarray:
    """Solve the standalone Kawahara equation from ``v0`` over [0, t_end]."""
    v0 = np.asarray(grid.check(v0), dtype=float)
    if not np.all(np.isfinite(v0)):
        raise BlowupDetected("non-finite initial data", t=0.0)
    system = KawaharaSystem(grid, params, config)
    y = np.fft.fft(v0)
    if config.project_initial:
        y = y * system.mask
    n_full, rest = _step_plan(0.0, t_end, config.dt)
    t = 0.0
    for k in range(1, n_full + 1):
        y = system.stepper.step(y, config.dt)
        if not np.all(np.isfinite(y)):
            raise BlowupDetected(f"non-finite field at t={t + config.dt:.6g}", t=t + config.dt)
        t = k * config.dt
    if rest > 0.0:
        y = system.stepper.step(y, rest)
    return np.fft.ifft(y).real


# --------------------------------------------------------------------------
# conserved quantities


def _check_energy_form(energy_form: str) -> float:
    if energy_form not in ENERGY_FORMS:
        raise ValueError(f"energy_form must be one of {ENERGY_FORMS}, got {energy_form!r}")
    # sign in front of (alpha delta / 2) |v_xx|^2
    return 1.0 if energy_form == "conserved" else -1.0


def conserved_quantities(state: CoupledState, params: PhysParams, energy_form: str = "conserved") -> ConservedSet:
    """Mass, momentum and energy of ``state``.

    ``energy_form="opposite_sign"`` evaluates the energy with ``-(alpha delta/2)
    |v_xx|^2``; the default uses ``+(alpha delta/2) |v_xx|^2``, the sign for
    which the energy is a constant of motion of the system as written above
    (see :func:`conservation_derivative_check`).
    """
    sign = _check_energy_form(energy_form)
    g = state.grid
    a, b, gam, d, eps = params.as_tuple()
    u, v = state.u, state.v
    ux = spectral_derivative(u, g, 1)
    vx = spectral_derivative(v, g, 1)
    vxx = spectral_derivative(v, g, 2)
    abs_u2 = np.abs(u) ** 2

    mass = integrate_quadrature(abs_u2, g)
    momentum = integrate_quadrature(a * v**2 + 2 * eps * np.imag(u * np.conj(ux)), g)
    energy_density = (
        a * eps * abs_u2 * v
        - a / 6 * v**3
        + b * eps / 2 * abs_u2**2
        + a * gam / 2 * vx**2
        + sign * a * d / 2 * vxx**2
        + eps * np.abs(ux) ** 2
    )
    return ConservedSet(mass, momentum, integrate_quadrature(energy_density, g))


def full_rhs(state: CoupledState, params: PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """u_t and v_t of the PDE at ``state``, without dealiasing."""
    g = state.grid
    a, b, gam, d, eps = params.as_tuple()
    u, v = state.u, state.v
    abs_u2 = np.abs(u) ** 2
    ut = 1j * spectral_derivative(u, g, 2) - 1j * (a * u * v + b * abs_u2 * u)
    vt = (
        -gam * spectral_derivative(v, g, 3)
        + d * spectral_derivative(v, g, 5)
        - v * spectral_derivative(v, g, 1)
        + eps * spectral_derivative(abs_u2, g, 1)
    )
    return ut, vt


def conservation_derivative_check(state: CoupledState, params: PhysParams, energy_form: str = "conserved") -> DerivativeCheck:
    """Time derivatives of M, Q, E obtained by the chain rule along the PDE.

    Independent of any time stepping: u_t, v_t come from :func:`full_rhs`.
    Each scale is the sum over terms of the integral of the absolute
    integrand, so that ``|dX/dt| / scale`` is a relative cancellation error.
    """
    sign = _check_energy_form(energy_form)
    g = state.grid
    a, b, gam, d, eps = params.as_tuple()
    u, v = state.u, state.v
    ut, vt = full_rhs(state, params)
    D = lambda f, k: spectral_derivative(f, g, k)  # noqa: E731
    ux, vx, vxx = D(u, 1), D(v, 1), D(v, 2)
    abs_u2 = np.abs(u) ** 2
    dabs_u2 = 2 * np.real(np.conj(u) * ut)

    def total(terms):
        val = sum(integrate_quadrature(term, g) for term in terms)
        scale = sum(integrate_quadrature(np.abs(term), g) for term in terms)
        return val, scale

    dm, sm = total([dabs_u2])
    dq, sq = total([2 * a * v * vt, 2 * eps * np.imag(ut * np.conj(ux) + u * np.conj(D(ut, 1)))])
    de, se = total(
        [
            a * eps * (dabs_u2 * v + abs_u2 * vt),
            -a / 2 * v**2 * vt,
            b * eps * abs_u2 * dabs_u2,
            a * gam * vx * D(vt, 1),
            sign * a * d * vxx * D(vt, 2),
            2 * eps * np.real(np.conj(ux) * D(ut, 1)),
        ]
    )
    return DerivativeCheck(dm, dq, de, sm, sq, se)


def with_dt(config: SolverConfig, dt: float) -> SolverConfig:
    return replace(config, dt=dt)
