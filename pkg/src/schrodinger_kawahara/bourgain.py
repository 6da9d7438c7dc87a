"""Discrete Fourier-restriction (Bourgain) norms on a space-time torus.

A :class:`SpaceTimeField` holds samples u(x_j, t_m) on [-L/2, L/2) x
[-T_w/2, T_w/2). Its spectrum approximates

    u_hat(xi, tau) = int int exp(-i (x xi + t tau)) u(x, t) dx dt

on the lattice (2 pi / L) Z x (2 pi / T_w) Z, and every norm below is a
weighted l^2 sum with the Plancherel weight dxi dtau / (2 pi)^2, so that the
s = b = 0 norms equal the space-time L^2 norm.

Modulations are tau + xi^2 (Schrodinger, "X" spaces) and tau - p(xi)
(Kawahara, "Y" spaces). Besov-type variants aggregate the dyadic modulation
shells phi_j with an l^1 sum or an l^infinity sup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InsufficientData, ShapeError, SpaceMismatch
from .propagators import PhysParams, dispersion_p
from .spectral import Grid, make_grid

KINDS = ("schrodinger", "kawahara")


# --------------------------------------------------------------------------
# smooth cutoffs


def _bump_exp(s):
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def smooth_step(s):
    """C-infinity, nonincreasing; 1 for s <= 0 and 0 for s >= 1."""
    s = np.asarray(s, dtype=float)
    a = _bump_exp(1.0 - s)
    b = _bump_exp(s)
    return a / (a + b)


def phi0(xi):
    """Even bump: 1 for |xi| <= 5/4, 0 for |xi| >= 3/2."""
    return smooth_step((np.abs(np.asarray(xi, dtype=float)) - 1.25) * 4.0)


def phi(j: int, xi):
    """Dyadic piece phi_j(xi) = phi0(xi / 2^j) - phi0(xi / 2^(j-1)) for j >= 1."""
    if j < 0:
        raise ValueError("shell index must be nonnegative")
    if j == 0:
        return phi0(xi)
    xi = np.asarray(xi, dtype=float)
    return phi0(xi / 2.0**j) - phi0(xi / 2.0 ** (j - 1))


@dataclass(frozen=True)
class DyadicPartition:
    j_max: int

    @property
    def covered(self) -> float:
        """sum_{j <= j_max} phi_j = 1 on |xi| <= covered."""
        return 1.25 * 2.0**self.j_max

    def __call__(self, j: int, xi):
        if not 0 <= j <= self.j_max:
            raise IndexError(f"shell {j} outside 0..{self.j_max}")
        return phi(j, xi)

    def shells(self, xi) -> np.ndarray:
        """Stack of phi_0..phi_{j_max} evaluated at xi (leading axis = shell)."""
        return np.stack([phi(j, xi) for j in range(self.j_max + 1)])

    def support(self, j: int) -> tuple[float, float]:
        if j == 0:
            return (0.0, 1.5)
        return (1.25 * 2.0 ** (j - 1), 1.5 * 2.0**j)


def lp_partition(j_max: int) -> DyadicPartition:
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    return DyadicPartition(int(j_max))


def shells_needed(max_abs: float) -> int:
    """Smallest j_max whose partition covers |xi| <= max_abs."""
    if max_abs <= 1.25:
        return 0
    return int(math.ceil(math.log2(max_abs / 1.25)))


def time_cutoff(T: float):
    """psi_T(t) = psi(t / T) with psi = 1 on [-1, 1] and 0 outside [-2, 2]."""
    if not T > 0:
        raise ValueError("T must be positive")

    def psi_T(t):
        return smooth_step(np.abs(np.asarray(t, dtype=float)) / T - 1.0)

    return psi_T


def high_pass(f, grid: Grid, cutoff: float) -> np.ndarray:
    """P^N f: keep the Fourier modes with |xi| >= cutoff."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    f = grid.check(f)
    out = np.fft.ifft(np.where(np.abs(grid.wavenumbers) >= cutoff, np.fft.fft(f), 0))
    return out.real if np.isrealobj(f) else out


def resonance_weight(xi, xi1, params: PhysParams, power: float = 0.5):
    """|5 delta xi^4 + 3 gamma xi^2 + 2 xi1|^power."""
    xi = np.asarray(xi, dtype=float)
    return np.abs(5 * params.delta * xi**4 + 3 * params.gamma * xi**2 + 2 * np.asarray(xi1, dtype=float)) ** power


def japanese(x):
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def sobolev_norm(f, grid: Grid, s: float) -> float:
    """(int <xi>^{2s} |f_hat|^2 dxi / 2 pi)^{1/2} on the grid lattice."""
    f = grid.check(f)
    c = grid.dx * np.fft.fft(f)
    return float(np.sqrt(grid.dxi / (2 * np.pi) * np.sum(japanese(grid.wavenumbers) ** (2 * s) * np.abs(c) ** 2)))


# --------------------------------------------------------------------------
# space-time fields


@dataclass
class SpaceTimeField:
    grid: Grid
    time_window: float
    samples: np.ndarray
    modulation_kind: str
    _spectrum: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.modulation_kind not in KINDS:
            raise ValueError(f"modulation_kind must be one of {KINDS}")
        if not self.time_window > 0:
            raise ValueError("time_window must be positive")
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 2 or self.samples.shape[0] != self.grid.n_points:
            raise ShapeError(f"samples must have shape ({self.grid.n_points}, M), got {self.samples.shape}")
        if self.n_time % 2:
            raise ShapeError("n_time must be even")

    @property
    def n_time(self) -> int:
        return self.samples.shape[1]

    @property
    def dt(self) -> float:
        return self.time_window / self.n_time

    @property
    def t(self) -> np.ndarray:
        return -0.5 * self.time_window + self.dt * np.arange(self.n_time)

    @property
    def tau(self) -> np.ndarray:
        return (2 * np.pi / self.time_window) * np.fft.fftfreq(self.n_time, d=1.0 / self.n_time)

    @property
    def weight(self) -> float:
        """Plancherel measure of one lattice cell, dxi dtau / (2 pi)^2."""
        return 1.0 / (self.grid.length * self.time_window)

    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            xi, tau = self.grid.wavenumbers, self.tau
            phase = np.exp(0.5j * (xi[:, None] * self.grid.length + tau[None, :] * self.time_window))
            self._spectrum = self.grid.dx * self.dt * np.fft.fft2(self.samples) * phase
        return self._spectrum

    @classmethod
    def from_spectrum(cls, grid: Grid, time_window: float, spectrum, kind: str) -> "SpaceTimeField":
        spectrum = np.asarray(spectrum, dtype=complex)
        m = spectrum.shape[1]
        tau = (2 * np.pi / time_window) * np.fft.fftfreq(m, d=1.0 / m)
        phase = np.exp(0.5j * (grid.wavenumbers[:, None] * grid.length + tau[None, :] * time_window))
        samples = np.fft.ifft2(spectrum / phase) / (grid.dx * time_window / m)
        out = cls(grid, time_window, samples, kind)
        out._spectrum = spectrum.copy()
        return out

    def modulation(self, params: PhysParams | None = None) -> np.ndarray:
        xi, tau = self.grid.wavenumbers[:, None], self.tau[None, :]
        if self.modulation_kind == "schrodinger":
            return tau + xi**2
        if params is None:
            raise ValueError("Kawahara modulation requires PhysParams")
        return tau - dispersion_p(xi, params)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.grid.dx * self.dt * np.sum(np.abs(self.samples) ** 2)))

    def retag(self, kind: str) -> "SpaceTimeField":
        out = SpaceTimeField(self.grid, self.time_window, self.samples, kind)
        out._spectrum = self._spectrum
        return out


def space_time_grid(n: int, length: float, n_time: int, time_window: float):
    """Sample coordinates (x[:, None], t[None, :]) for building fields."""
    grid = make_grid(n, length)
    dt = time_window / n_time
    t = -0.5 * time_window + dt * np.arange(n_time)
    return grid, grid.x[:, None], t[None, :]


def _expect(f: SpaceTimeField, kind: str):
    if f.modulation_kind != kind:
        raise SpaceMismatch(f"field carries {f.modulation_kind} modulation, {kind} space requested")


def _weighted(f: SpaceTimeField, s: float) -> np.ndarray:
    return japanese(f.grid.wavenumbers)[:, None] ** s * np.abs(f.spectrum())


def _xsb(f: SpaceTimeField, s, b, params) -> float:
    w = _weighted(f, s) * japanese(f.modulation(params)) ** b
    return float(np.sqrt(f.weight * np.sum(w**2)))


def xsb_norm(f: SpaceTimeField, s: float, b: float) -> float:
    """||<xi>^s <tau + xi^2>^b u_hat||_{L^2}."""
    _expect(f, "schrodinger")
    return _xsb(f, s, b, None)


def ysb_norm(f: SpaceTimeField, s: float, b: float, params: PhysParams) -> float:
    """||<xi>^s <tau - p(xi)>^b u_hat||_{L^2}."""
    _expect(f, "kawahara")
    return _xsb(f, s, b, params)


def shell_norms(f: SpaceTimeField, s: float, params: PhysParams | None = None) -> np.ndarray:
    """||<xi>^s phi_j(modulation) u_hat||_{L^2} for j = 0..j_max (covering the lattice)."""
    mod = f.modulation(params)
    part = lp_partition(shells_needed(float(np.max(np.abs(mod)))))
    w = _weighted(f, s)
    return np.array([np.sqrt(f.weight * np.sum((part(j, mod) * w) ** 2)) for j in range(part.j_max + 1)])


def _besov(f, s, b, q, params) -> float:
    shells = shell_norms(f, s, params)
    weighted = 2.0 ** (b * np.arange(shells.size)) * shells
    if q == 1:
        return float(np.sum(weighted))
    if q == math.inf or q == "inf":
        return float(np.max(weighted))
    raise ValueError(f"q must be 1 or inf, got {q!r}")


def besov_xsb_norm(f: SpaceTimeField, s: float, b: float, q=1) -> float:
    """X^{s,b,q}: l^q over dyadic shells of tau + xi^2, q in {1, inf}."""
    _expect(f, "schrodinger")
    return _besov(f, s, b, q, None)


def besov_ysb_norm(f: SpaceTimeField, s: float, b: float, params: PhysParams, q=1) -> float:
    """Y^{s,b,q}: l^q over dyadic shells of tau - p(xi), q in {1, inf}."""
    _expect(f, "kawahara")
    return _besov(f, s, b, q, params)


def dominant_shell(f: SpaceTimeField, s: float = 0.0, params: PhysParams | None = None) -> int:
    return int(np.argmax(shell_norms(f, s, params)))


# --------------------------------------------------------------------------
# bilinear / trilinear estimate experiments

CASES = {
    # case: (input kinds, output kind, degree, derivative, conjugate second input)
    "uv": (("schrodinger", "kawahara"), "schrodinger", 2, False, False),
    "cubic": (("schrodinger", "schrodinger", "schrodinger"), "schrodinger", 3, False, True),
    "vvx": (("kawahara", "kawahara"), "kawahara", 2, True, False),
    "u2x": (("schrodinger", "schrodinger"), "kawahara", 2, True, True),
}
B_IN = 3 / 8
B_OUT = -1 / 4


def _padded_samples(f: SpaceTimeField, factor: int) -> np.ndarray:
    """Samples of the same lattice spectrum on a grid ``factor`` times finer."""
    n, m = f.samples.shape
    c = np.fft.fft2(f.samples)
    out = np.zeros((factor * n, factor * m), dtype=complex)
    kx = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    kt = np.fft.fftfreq(m, d=1.0 / m).astype(int)
    out[np.ix_(kx % (factor * n), kt % (factor * m))] = c
    return np.fft.ifft2(out) * factor**2


def product_field(case: str, inputs, params: PhysParams | None = None) -> SpaceTimeField:
    """Left-hand-side field of the selected estimate, computed without aliasing.

    Inputs are zero-padded so the pointwise product on the finer grid is the
    exact lattice convolution; the result lives on the padded grid with the
    same L and T_w.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {sorted(CASES)}")
    kinds, out_kind, degree, deriv, conj = CASES[case]
    if len(inputs) != len(kinds):
        raise ValueError(f"case {case!r} takes {len(kinds)} inputs")
    base = inputs[0]
    for f, kind in zip(inputs, kinds):
        _expect(f, kind)
        if f.samples.shape != base.samples.shape or f.grid.length != base.grid.length or f.time_window != base.time_window:
            raise ShapeError("inputs must share one space-time lattice")
        if not np.any(f.samples):
            raise InsufficientData("zero input")
    padded = [_padded_samples(f, degree) for f in inputs]
    if conj:
        padded[1] = np.conj(padded[1])
    prod = padded[0]
    for p in padded[1:]:
        prod = prod * p
    grid = make_grid(degree * base.grid.n_points, base.grid.length)
    if deriv:
        prod = np.fft.ifft(1j * grid.wavenumbers[:, None] * np.fft.fft(prod, axis=0), axis=0)
    return SpaceTimeField(grid, base.time_window, prod, out_kind)


def _in_norm(f: SpaceTimeField, params):
    if f.modulation_kind == "schrodinger":
        return besov_xsb_norm(f, 0.0, B_IN, q=1)
    return besov_ysb_norm(f, 0.0, B_IN, params, q=1)


def _out_norm(f: SpaceTimeField, params):
    if f.modulation_kind == "schrodinger":
        return besov_xsb_norm(f, 0.0, B_OUT, q=math.inf)
    return besov_ysb_norm(f, 0.0, B_OUT, params, q=math.inf)


def bilinear_ratio(case: str, inputs, params: PhysParams) -> float:
    """LHS / RHS of the selected product estimate on the space-time torus.

    Cases: ``uv``   ||u v||_{X^{0,-1/4,inf}} vs ||u||_{X^{0,3/8,1}} ||v||_{Y^{0,3/8,1}};
    ``cubic`` ||u1 conj(u2) u3||_{X^{0,-1/4,inf}} vs the three X^{0,3/8,1} norms;
    ``vvx``  ||(v1 v2)_x||_{Y^{0,-1/4,inf}} vs two Y^{0,3/8,1} norms;
    ``u2x``  ||(u1 conj(u2))_x||_{Y^{0,-1/4,inf}} vs two X^{0,3/8,1} norms.
    """
    lhs = _out_norm(product_field(case, inputs, params), params)
    rhs = 1.0
    for f in inputs:
        rhs *= _in_norm(f, params)
    if rhs == 0:
        raise InsufficientData("an input has zero norm")
    return lhs / rhs


@dataclass(frozen=True)
class LatticeSpec:
    n: int = 32
    length: float = 2 * np.pi
    n_time: int = 32
    time_window: float = 2 * np.pi
    band: float = 0.5
    modulation_decay: float = 1.0

    def grid(self) -> Grid:
        return make_grid(self.n, self.length)


def random_field(lattice: LatticeSpec, kind: str, rng: np.random.Generator, params: PhysParams | None = None) -> SpaceTimeField:
    """Band-limited random space-time field: complex Gaussian coefficients on
    |k| <= band * n/2 and |m| <= band * n_time/2, zero elsewhere, damped by
    <modulation>^(-modulation_decay) to concentrate near the dispersion surface."""
    grid = lattice.grid()
    kx = np.abs(np.fft.fftfreq(lattice.n, d=1.0 / lattice.n))
    kt = np.abs(np.fft.fftfreq(lattice.n_time, d=1.0 / lattice.n_time))
    mask = (kx[:, None] <= lattice.band * lattice.n / 2) & (kt[None, :] <= lattice.band * lattice.n_time / 2)
    mask[lattice.n // 2, :] = False
    mask[:, lattice.n_time // 2] = False
    coeff = (rng.standard_normal(mask.shape) + 1j * rng.standard_normal(mask.shape)) * mask
    if lattice.modulation_decay:
        probe = SpaceTimeField(grid, lattice.time_window, np.zeros(mask.shape), kind)
        coeff = coeff * japanese(probe.modulation(params)) ** -lattice.modulation_decay
    return SpaceTimeField.from_spectrum(grid, lattice.time_window, coeff, kind)


@dataclass(frozen=True)
class EnsembleReport:
    case: str
    seed: int
    n: int
    n_samples: int
    max_ratio: float
    argmax: int
    ratios: tuple = field(repr=False)

    def as_row(self) -> dict:
        return {
            "case": self.case,
            "seed": self.seed,
            "n": self.n,
            "n_samples": self.n_samples,
            "max_ratio": self.max_ratio,
            "argmax_sample": f"seed={self.seed}:sample={self.argmax}",
        }


def bilinear_ensemble(case: str, n_samples: int, seed: int, params: PhysParams, lattice: LatticeSpec = LatticeSpec()) -> EnsembleReport:
    """Empirical maximum of :func:`bilinear_ratio` over seeded random inputs."""
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    if n_samples < 1:
        raise InsufficientData("need at least one sample")
    rng = np.random.default_rng(seed)
    kinds = CASES[case][0]
    ratios = []
    for _ in range(n_samples):
        inputs = [random_field(lattice, kind, rng, params) for kind in kinds]
        ratios.append(bilinear_ratio(case, inputs, params))
    ratios = np.array(ratios)
    i = int(np.argmax(ratios))
    return EnsembleReport(case, seed, lattice.n, n_samples, float(ratios[i]), i, tuple(ratios))


def _ensemble_job(args) -> EnsembleReport:
    case, n_samples, seed, params, lattice = args
    return bilinear_ensemble(case, n_samples, seed, params, lattice)


def ensemble_sweep(cases, seeds, resolutions, n_samples: int, params: PhysParams, workers: int = 1, base: LatticeSpec = LatticeSpec()) -> list[EnsembleReport]:
    """Independent ensembles for every (case, resolution, seed); each job owns its seed."""
    from concurrent.futures import ProcessPoolExecutor

    jobs = [
        (case, n_samples, seed, params, replace(base, n=n, n_time=n))
        for case in cases
        for n in resolutions
        for seed in seeds
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_ensemble_job, jobs))
    return [_ensemble_job(job) for job in jobs]
