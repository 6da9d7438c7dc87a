"""Periodic grids, Fourier transforms, spectral derivatives and dealiasing.

The real line is replaced by the torus [-L/2, L/2). Spectra approximate the
continuous transform ``f_hat(xi) = int exp(-i x xi) f(x) dx`` sampled on the
lattice ``xi_k = 2 pi k / L``, so that

    ||f||_{L^2}^2 = dx * sum |f_j|^2 = (dxi / 2 pi) * sum |f_hat_k|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidGrid, ShapeError, UnsupportedRule

SUPPORTED_RULES = (Fraction(1, 2), Fraction(2, 3))


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-length/2, length/2) with ``n_points`` samples."""

    n_points: int
    length: float
    x: np.ndarray = field(repr=False, compare=False)
    wavenumbers: np.ndarray = field(repr=False, compare=False)

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers k in FFT layout {0, ..., N/2-1, -N/2, ..., -1}."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def odd_wavenumbers(self) -> np.ndarray:
        """Wavenumbers with the Nyquist entry zeroed (for odd symbols)."""
        xi = self.wavenumbers.copy()
        xi[self.n_points // 2] = 0.0
        return xi

    def check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.n_points,):
            raise ShapeError(f"expected {self.n_points} samples, got shape {f.shape}")
        return f


def make_grid(n: int, length: float) -> Grid:
    if int(n) != n or n < 4 or n % 2:
        raise InvalidGrid(f"n must be an even integer >= 4, got {n!r}")
    if not length > 0:
        raise InvalidGrid(f"length must be positive, got {length!r}")
    n = int(n)
    length = float(length)
    dx = length / n
    x = -0.5 * length + dx * np.arange(n)
    xi = (2.0 * np.pi / length) * np.fft.fftfreq(n, d=1.0 / n)
    x.flags.writeable = False
    xi.flags.writeable = False
    return Grid(n, length, x, xi)


def _shift_phase(grid: Grid) -> np.ndarray:
    # exp(-i xi x_0) with x_0 = -L/2 makes the DFT approximate the continuous transform
    return np.exp(0.5j * grid.wavenumbers * grid.length)


def transform_forward(f, grid: Grid) -> np.ndarray:
    f = grid.check(f)
    return grid.dx * np.fft.fft(f) * _shift_phase(grid)


def transform_inverse(spectrum, grid: Grid) -> np.ndarray:
    spectrum = grid.check(spectrum)
    return np.fft.ifft(spectrum / _shift_phase(grid)) / grid.dx


def l2_norm(f, grid: Grid) -> float:
    f = grid.check(f)
    return float(np.sqrt(grid.dx * np.sum(np.abs(f) ** 2)))


def spectrum_norm(spectrum, grid: Grid) -> float:
    spectrum = grid.check(spectrum)
    return float(np.sqrt(grid.dxi / (2.0 * np.pi) * np.sum(np.abs(spectrum) ** 2)))


def derivative_symbol(grid: Grid, order: int) -> np.ndarray:
    """(i xi)^order, with the Nyquist mode zeroed for odd orders."""
    if order < 0 or int(order) != order:
        raise ValueError(f"order must be a nonnegative integer, got {order!r}")
    xi = grid.odd_wavenumbers if order % 2 else grid.wavenumbers
    return (1j * xi) ** int(order)


def spectral_derivative(f, grid: Grid, order: int = 1) -> np.ndarray:
    f = grid.check(f)
    if order == 0:
        return f.copy()
    out = np.fft.ifft(derivative_symbol(grid, order) * np.fft.fft(f))
    return out.real if np.isrealobj(f) else out


def _as_rule(rule) -> Fraction:
    try:
        exact = Fraction(rule)
        r = exact.limit_denominator(64)
    except (TypeError, ValueError) as exc:
        raise UnsupportedRule(f"unsupported dealiasing rule {rule!r}") from exc
    if r not in SUPPORTED_RULES or abs(float(exact) - float(r)) > 1e-12:
        raise UnsupportedRule(f"dealiasing rule must be 1/2 or 2/3, got {rule!r}")
    return r


def dealias_mask(n: int, rule) -> np.ndarray:
    """Boolean mask of retained modes, |k| <= rule * n/2, in FFT layout."""
    r = _as_rule(rule)
    k = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    return k <= r * (n // 2)


def dealias(spectrum, rule=Fraction(1, 2)) -> np.ndarray:
    spectrum = np.asarray(spectrum)
    if spectrum.ndim != 1:
        raise ShapeError("dealias expects a one-dimensional spectrum")
    return np.where(dealias_mask(spectrum.shape[0], rule), spectrum, 0)


def integrate_quadrature(f, grid: Grid) -> float:
    """Trapezoid rule on the torus; spectrally accurate for smooth periodic data."""
    f = grid.check(f)
    return float(grid.dx * np.sum(f).real)
