import math

import numpy as np
import pytest

from schrodinger_kawahara import bourgain as bg
from schrodinger_kawahara.errors import InsufficientData, ShapeError, SpaceMismatch
from schrodinger_kawahara.propagators import PhysParams, dispersion_p, kawahara_propagate, schrodinger_propagate
from schrodinger_kawahara.spectral import l2_norm, make_grid

P = PhysParams()
XI = np.random.default_rng(2024).uniform(-300, 300, 10_000)


# -------------------------------------------------------------- cutoffs


def test_phi0_plateau_and_support():
    a = np.abs(XI)
    v = bg.phi0(XI)
    assert np.all(v[a <= 1.25] == 1.0)
    assert np.all(v[a >= 1.5] == 0.0)
    assert np.all((v >= 0) & (v <= 1))
    assert np.array_equal(bg.phi0(-XI), v)


def test_partition_of_unity_pointwise():
    part = bg.lp_partition(bg.shells_needed(300))
    assert part.covered >= 300
    shells = part.shells(XI)
    assert np.max(np.abs(shells.sum(axis=0) - 1.0)) <= 1e-15
    assert np.all(shells >= 0)
    for j in range(part.j_max + 1):
        lo, hi = part.support(j)
        outside = (np.abs(XI) < lo) | (np.abs(XI) > hi)
        assert np.all(shells[j][outside] == 0.0)


def test_partition_index_checks():
    part = bg.lp_partition(3)
    with pytest.raises(IndexError):
        part(4, 1.0)
    with pytest.raises(ValueError):
        bg.phi(-1, 1.0)
    with pytest.raises(ValueError):
        bg.lp_partition(-1)
    assert bg.shells_needed(1.0) == 0 and bg.shells_needed(2.6) == 2


def test_smooth_step_is_monotone_and_smooth():
    s = np.linspace(-0.5, 1.5, 20001)
    f = bg.smooth_step(s)
    assert np.all(np.diff(f) <= 0)
    assert f[0] == 1.0 and f[-1] == 0.0
    assert bg.smooth_step(np.array([0.5]))[0] == pytest.approx(0.5)
    # all derivatives vanish at the ends: values approach 0 and 1 faster than any power
    assert bg.smooth_step(np.array([0.98]))[0] < 1e-20


def test_time_cutoff():
    psi = bg.time_cutoff(0.5)
    t = np.random.default_rng(1).uniform(-3, 3, 10_000)
    v = psi(t)
    assert np.all(v[np.abs(t) <= 0.5] == 1.0)
    assert np.all(v[np.abs(t) >= 1.0] == 0.0)
    with pytest.raises(ValueError):
        bg.time_cutoff(0.0)


def test_high_pass_and_weights():
    grid = make_grid(32, 2 * np.pi)
    f = np.cos(2 * grid.x) + np.cos(7 * grid.x)
    np.testing.assert_allclose(bg.high_pass(f, grid, 5.0), np.cos(7 * grid.x), atol=1e-14)
    with pytest.raises(ValueError):
        bg.high_pass(f, grid, -1)
    assert bg.resonance_weight(2.0, 3.0, PhysParams(gamma=1, delta=1)) == pytest.approx(math.sqrt(80 + 12 + 6))
    assert bg.sobolev_norm(f, grid, 0) == pytest.approx(l2_norm(f, grid), rel=1e-14)
    # <xi>^s on single modes
    assert bg.sobolev_norm(np.cos(2 * grid.x), grid, 1) == pytest.approx(math.sqrt(5) * l2_norm(np.cos(2 * grid.x), grid), rel=1e-13)


# -------------------------------------------------------------- norms vs brute force


def _brute_spectrum(f: bg.SpaceTimeField):
    """Direct double sum of dx dt f(x, t) exp(-i (xi x + tau t)) over all samples."""
    x, t = f.grid.x, f.t
    xi, tau = f.grid.wavenumbers, f.tau
    out = np.zeros((xi.size, tau.size), dtype=complex)
    for a, xa in enumerate(xi):
        for b, tb in enumerate(tau):
            acc = 0j
            for j, xj in enumerate(x):
                acc += np.sum(f.samples[j] * np.exp(-1j * (xa * xj + tb * t)))
            out[a, b] = acc * f.grid.dx * f.dt
    return out


def _brute_xsb(f, s, b, params=None):
    c = _brute_spectrum(f)
    total = 0.0
    for a, xa in enumerate(f.grid.wavenumbers):
        for k, tk in enumerate(f.tau):
            mod = tk + xa**2 if f.modulation_kind == "schrodinger" else tk - dispersion_p(xa, params)
            total += (1 + xa**2) ** s * (1 + mod**2) ** b * abs(c[a, k]) ** 2
    return math.sqrt(total / (f.grid.length * f.time_window))


def _brute_besov(f, s, b, q, params=None):
    c = _brute_spectrum(f)
    xi = f.grid.wavenumbers[:, None]
    mod = f.tau[None, :] + xi**2 if f.modulation_kind == "schrodinger" else f.tau[None, :] - dispersion_p(xi, params)
    jmax = bg.shells_needed(np.max(np.abs(mod)))
    pieces = []
    for j in range(jmax + 1):
        acc = 0.0
        for a in range(c.shape[0]):
            for k in range(c.shape[1]):
                acc += (bg.phi(j, mod[a, k]) * (1 + xi[a, 0] ** 2) ** (s / 2) * abs(c[a, k])) ** 2
        pieces.append(2.0 ** (b * j) * math.sqrt(acc / (f.grid.length * f.time_window)))
    return sum(pieces) if q == 1 else max(pieces)


def _random(kind, n=8, m=8, seed=0, length=3.0, window=2.0):
    rng = np.random.default_rng(seed)
    grid = make_grid(n, length)
    return bg.SpaceTimeField(grid, window, rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)), kind)


def test_spectrum_matches_direct_sum():
    f = _random("schrodinger")
    assert np.max(np.abs(f.spectrum() - _brute_spectrum(f))) <= 1e-12 * np.max(np.abs(f.spectrum()))


@pytest.mark.parametrize("s, b", [(0, 0), (0.5, 0.375), (-1, -0.25), (2, 0.5)])
def test_xsb_and_ysb_match_brute_force(s, b):
    fx = _random("schrodinger", seed=1)
    assert bg.xsb_norm(fx, s, b) == pytest.approx(_brute_xsb(fx, s, b), rel=1e-12)
    fy = _random("kawahara", seed=2)
    assert bg.ysb_norm(fy, s, b, P) == pytest.approx(_brute_xsb(fy, s, b, P), rel=1e-12)


@pytest.mark.parametrize("q", [1, math.inf])
def test_besov_norms_match_brute_force(q):
    fx = _random("schrodinger", seed=3)
    assert bg.besov_xsb_norm(fx, 0.5, 0.375, q) == pytest.approx(_brute_besov(fx, 0.5, 0.375, q), rel=1e-12)
    fy = _random("kawahara", seed=4)
    assert bg.besov_ysb_norm(fy, 0, -0.25, P, q) == pytest.approx(_brute_besov(fy, 0, -0.25, q, P), rel=1e-12)


def test_x00_is_space_time_l2_and_besov_ordering():
    lat = bg.LatticeSpec(modulation_decay=0.0)
    rng = np.random.default_rng(11)
    for i in range(100):
        f = bg.random_field(lat, "schrodinger", rng)
        l2 = math.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dx * f.dt)
        assert abs(bg.xsb_norm(f, 0, 0) - l2) <= 1e-12 * l2
        assert f.l2_norm() == pytest.approx(l2, rel=1e-14)
        s, b = rng.uniform(-1, 1, 2)
        assert bg.besov_xsb_norm(f, s, b, math.inf) <= bg.besov_xsb_norm(f, s, b, 1) * (1 + 1e-14)


def test_space_mismatch_and_bad_q():
    f = _random("schrodinger")
    with pytest.raises(SpaceMismatch):
        bg.ysb_norm(f, 0, 0, P)
    with pytest.raises(SpaceMismatch):
        bg.besov_ysb_norm(f, 0, 0, P)
    with pytest.raises(SpaceMismatch):
        bg.xsb_norm(f.retag("kawahara"), 0, 0)
    with pytest.raises(ValueError):
        bg.besov_xsb_norm(f, 0, 0, q=2)
    with pytest.raises(ShapeError):
        bg.SpaceTimeField(make_grid(8, 1.0), 1.0, np.zeros((8, 7)), "schrodinger")
    with pytest.raises(ValueError):
        bg.SpaceTimeField(make_grid(8, 1.0), 1.0, np.zeros((8, 8)), "other")


def test_from_spectrum_round_trip():
    f = _random("kawahara", n=16, m=12, seed=9)
    g = bg.SpaceTimeField.from_spectrum(f.grid, f.time_window, f.spectrum(), "kawahara")
    np.testing.assert_allclose(g.samples, f.samples, atol=1e-13)


@pytest.mark.parametrize("kind", bg.KINDS)
def test_free_solutions_live_in_shell_zero(kind):
    grid, _, t = bg.space_time_grid(64, 2 * np.pi, 64, 8 * np.pi)
    u0 = np.exp(-4 * grid.x**2) + 0j
    psi = bg.time_cutoff(2.0)
    if kind == "schrodinger":
        samples = np.stack([schrodinger_propagate(u0, tt, grid) for tt in t[0]], axis=1)
    else:
        samples = np.stack([kawahara_propagate(u0.real, tt, P, grid) for tt in t[0]], axis=1)
    f = bg.SpaceTimeField(grid, 8 * np.pi, samples * psi(t), kind)
    assert bg.dominant_shell(f, 0.0, P) == 0


# -------------------------------------------------------------- bilinear experiments


def _mode(grid, window, m_time, k, m, kind):
    _, x, t = bg.space_time_grid(grid.n_points, grid.length, m_time, window)
    return bg.SpaceTimeField(grid, window, np.exp(1j * (2 * np.pi * k / grid.length * x + 2 * np.pi * m / window * t)), kind)


def _besov_mode(mod, b, q):
    """X^{0,b,q} norm of a unit-amplitude lattice mode divided by sqrt(L T_w)."""
    j = np.arange(0, 40)
    vals = 2.0 ** (b * j) * np.array([bg.phi(jj, mod) for jj in j])
    return vals.sum() if q == 1 else vals.max()


SINGLE = [
    ("uv", [(1, 2), (2, -1)]),
    ("uv", [(-3, 5), (1, 0)]),
    ("cubic", [(1, 1), (2, -3), (0, 4)]),
    ("vvx", [(1, 2), (2, 3)]),
    ("vvx", [(-2, -4), (3, 7)]),
    ("u2x", [(3, 1), (1, -2)]),
]


@pytest.mark.parametrize("case, modes", SINGLE)
def test_single_mode_closed_form(case, modes):
    # unit modes have |f_hat| = L T_w at one lattice point, so each norm is sqrt(L T_w) times a shell sum
    grid, window, m = make_grid(16, 2 * np.pi), 2 * np.pi, 16
    kinds, out_kind, _, deriv, conj = bg.CASES[case]
    fields = [_mode(grid, window, m, k, mm, kind) for (k, mm), kind in zip(modes, kinds)]
    signs = [1] * len(modes)
    if conj:
        signs[1] = -1
    k_out = sum(s * k for s, (k, _) in zip(signs, modes))
    m_out = sum(s * mm for s, (_, mm) in zip(signs, modes))

    def mod(kind, k, mm):
        return mm + k**2 if kind == "schrodinger" else mm - dispersion_p(k, P)

    area = grid.length * window
    denom = np.prod([math.sqrt(area) * _besov_mode(mod(kind, k, mm), bg.B_IN, 1) for (k, mm), kind in zip(modes, kinds)])
    numer = math.sqrt(area) * _besov_mode(mod(out_kind, k_out, m_out), bg.B_OUT, math.inf) * (abs(k_out) if deriv else 1)
    assert bg.bilinear_ratio(case, fields, P) == pytest.approx(numer / denom, rel=1e-10)


def test_product_is_unaliased():
    grid, window = make_grid(8, 2 * np.pi), 2 * np.pi
    a = _mode(grid, window, 8, 3, 3, "schrodinger")
    b = _mode(grid, window, 8, 3, 3, "kawahara")
    prod = bg.product_field("uv", [a, b], P)
    c = np.abs(prod.spectrum())
    # the sum frequency (6, 6) exceeds the input band but fits the doubled grid
    k = np.argmax(c)
    assert np.unravel_index(k, c.shape) == (6, 6)


def test_bilinear_errors():
    grid = make_grid(8, 2 * np.pi)
    a = _mode(grid, 2 * np.pi, 8, 1, 1, "schrodinger")
    zero = bg.SpaceTimeField(grid, 2 * np.pi, np.zeros((8, 8)), "kawahara")
    with pytest.raises(InsufficientData):
        bg.bilinear_ratio("uv", [a, zero], P)
    with pytest.raises(SpaceMismatch):
        bg.bilinear_ratio("uv", [a, a], P)
    with pytest.raises(ValueError):
        bg.bilinear_ratio("nope", [a], P)
    with pytest.raises(ValueError):
        bg.bilinear_ratio("uv", [a], P)
    other = _mode(make_grid(16, 2 * np.pi), 2 * np.pi, 8, 1, 1, "kawahara")
    with pytest.raises(ShapeError):
        bg.bilinear_ratio("uv", [a, other], P)


def test_ensembles_are_seeded_and_finite():
    a = bg.bilinear_ensemble("uv", 5, 3, P)
    b = bg.bilinear_ensemble("uv", 5, 3, P)
    assert a.ratios == b.ratios
    assert a.max_ratio == max(a.ratios) and np.isfinite(a.max_ratio)
    assert a.as_row()["argmax_sample"] == f"seed=3:sample={a.argmax}"
    with pytest.raises(InsufficientData):
        bg.bilinear_ensemble("uv", 0, 1, P)
    sweep = bg.ensemble_sweep(["vvx"], [1, 2], [16], 3, P)
    assert [(r.case, r.seed, r.n) for r in sweep] == [("vvx", 1, 16), ("vvx", 2, 16)]


def test_random_fields_are_band_limited():
    lat = bg.LatticeSpec(n=16, n_time=16)
    f = bg.random_field(lat, "kawahara", np.random.default_rng(0), P)
    c = np.abs(np.fft.fft2(f.samples))
    kx = np.abs(np.fft.fftfreq(16, d=1 / 16))
    assert np.all(c[kx > 4, :] < 1e-10)
    assert np.all(c[:, kx > 4] < 1e-10)
