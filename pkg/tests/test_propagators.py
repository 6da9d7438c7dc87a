import numpy as np
import pytest
from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from schrodinger_kawahara.propagators import (
    PhysParams,
    dispersion_p,
    kawahara_propagate,
    kawahara_symbol,
    schrodinger_propagate,
    unit_phase,
)
from schrodinger_kawahara.spectral import l2_norm, make_grid


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(delta=0.0)
    with pytest.raises(ValueError):
        PhysParams(alpha=np.nan)
    assert PhysParams(2, 3, 4, 5, 6).as_tuple() == (2, 3, 4, 5, 6)


def test_dispersion_relation():
    p = PhysParams(gamma=2.0, delta=-0.5)
    assert dispersion_p(2.0, p) == 2 * 8 - 0.5 * 32


@pytest.mark.parametrize("k", [-7, -1, 0, 2, 9])
def test_schrodinger_plane_wave(k):
    g = make_grid(64, 2 * np.pi)
    t = 0.37
    # i u_t + u_xx = 0 is solved by exp(i (k x - k^2 t))
    out = schrodinger_propagate(np.exp(1j * k * g.x), t, g)
    assert np.max(np.abs(out - np.exp(1j * (k * g.x - k**2 * t)))) <= 1e-12


@pytest.mark.parametrize("k", [-6, -1, 1, 3, 10])
def test_kawahara_plane_wave(k):
    g = make_grid(64, 2 * np.pi)
    p = PhysParams(gamma=1.3, delta=-0.7)
    t = 0.011
    # v_t + gamma v_xxx - delta v_xxxxx = 0 with v = exp(i(kx - w t)) gives w = -(gamma k^3 + delta k^5)
    omega = -(p.gamma * k**3 + p.delta * k**5)
    out = kawahara_propagate(np.exp(1j * k * g.x), t, p, g)
    assert np.max(np.abs(out - np.exp(1j * (k * g.x - omega * t)))) <= 1e-12
    real = kawahara_propagate(np.cos(k * g.x), t, p, g)
    assert np.isrealobj(real)
    assert np.max(np.abs(real - np.cos(k * g.x - omega * t))) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-50, 50), st.floats(-5, 5), st.floats(-5, 5))
def test_unitarity_and_group_law(seed, t, s1, s2):
    # the group law is exact only when s1 + s2 is itself exact in floating point
    assume(Fraction(s1) + Fraction(s2) == Fraction(s1 + s2))
    g = make_grid(128, 30.0)
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    v = rng.standard_normal(128)
    p = PhysParams()
    assert abs(l2_norm(schrodinger_propagate(f, t, g), g) - l2_norm(f, g)) <= 1e-12 * l2_norm(f, g)
    assert abs(l2_norm(kawahara_propagate(v, t, p, g), g) - l2_norm(v, g)) <= 1e-12 * l2_norm(v, g)
    two = schrodinger_propagate(schrodinger_propagate(f, s1, g), s2, g)
    assert np.max(np.abs(two - schrodinger_propagate(f, s1 + s2, g))) <= 1e-12 * np.max(np.abs(f)) * 10
    twok = kawahara_propagate(kawahara_propagate(v, s1, p, g), s2, p, g)
    assert np.max(np.abs(twok - kawahara_propagate(v, s1 + s2, p, g))) <= 1e-12 * np.max(np.abs(v)) * 10


def test_kawahara_nyquist_is_static():
    g = make_grid(16, 2 * np.pi)
    assert kawahara_symbol(g, PhysParams())[8] == 0


def test_time_zero_is_identity():
    g = make_grid(16, 1.0)
    f = np.arange(16.0)
    assert np.array_equal(schrodinger_propagate(f, 0.0, g), f.astype(complex))
    assert np.array_equal(kawahara_propagate(f, 0.0, PhysParams(), g), f)


def test_unit_phase_is_accurate_for_huge_phases():
    mp = pytest.importorskip("mpmath")
    omega = np.random.default_rng(3).uniform(-1e9, 1e9, 100)
    t = 0.7
    got = unit_phase(t, omega)
    with mp.workdps(40):
        exact = np.array([complex(mp.expj(mp.mpf(t) * mp.mpf(w))) for w in omega])
    assert np.max(np.abs(got - exact)) < 2e-15
