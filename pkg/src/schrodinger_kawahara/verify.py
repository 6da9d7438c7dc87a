"""Self-check suite run by ``skw verify``.

Each check returns a :class:`CheckResult`; the quick subset takes seconds,
the full suite adds the convergence, sweep and ensemble experiments.
"""

from __future__ import annotations

import tempfile
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bourgain as bg
from .dynamics import CoupledState, SolverConfig, conservation_derivative_check, conserved_quantities, integrate, kawahara_integrate, with_dt
from .errors import ResolutionWarning
from .globalization import growth_fit, run_globalization
from .io import make_initial_condition, parse_config, read_snapshot, serialize_config, write_snapshot
from .propagators import PhysParams, dispersion_p, kawahara_propagate, schrodinger_propagate
from .scaling import dilate_field, dilated_residual
from .spectral import l2_norm, make_grid, spectrum_norm, transform_forward


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


P = PhysParams()


def _smooth_state(n=128, length=50.0, seed=0):
    grid = make_grid(n, length)
    rng = np.random.default_rng(seed)
    x = grid.x
    a, b, c = rng.uniform(0.5, 1.5, 3)
    u = a * np.exp(-((x - rng.uniform(-2, 2)) ** 2) / 2) * np.exp(1j * rng.uniform(-1, 1) * x)
    v = b * np.exp(-((x - rng.uniform(-2, 2)) ** 2) / 3) + c * np.exp(-(x**2)) * np.cos(x)
    return CoupledState(grid, u, v, 0.0)


def check_parseval():
    grid = make_grid(64, 10.0)
    f = np.random.default_rng(1).standard_normal(64) + 0j
    err = abs(l2_norm(f, grid) - spectrum_norm(transform_forward(f, grid), grid)) / l2_norm(f, grid)
    return err <= 1e-13, f"relative mismatch {err:.1e}"


def check_propagators():
    grid = make_grid(64, 2 * np.pi)
    k, t = 3, 0.7
    u = schrodinger_propagate(np.exp(1j * k * grid.x), t, grid)
    e1 = np.max(np.abs(u - np.exp(1j * (k * grid.x - k**2 * t))))
    v = kawahara_propagate(np.cos(k * grid.x), t, P, grid)
    e2 = np.max(np.abs(v - np.cos(k * grid.x + dispersion_p(k, P) * t)))
    f = make_initial_condition("random_bandlimited(1, 20)", grid, 3)
    e3 = abs(l2_norm(schrodinger_propagate(f, 5.0, grid), grid) - l2_norm(f, grid))
    e4 = np.max(np.abs(schrodinger_propagate(schrodinger_propagate(f, 0.3, grid), 0.4, grid) - schrodinger_propagate(f, 0.7, grid)))
    err = max(e1, e2, e3, e4)
    return err <= 1e-12, f"max error {err:.1e}"


def check_conservation():
    st = _smooth_state()
    cfg = SolverConfig(dt=2e-3)
    _, diag = integrate(st, 0.2, P, cfg)
    out = []
    for name in ("mass", "momentum", "energy"):
        col = diag.column(name)
        out.append(np.max(np.abs(col - col[0])) / abs(col[0]))
    ok = out[0] <= 1e-10 and max(out[1:]) <= 1e-6
    return ok, "relative drift M {:.1e} Q {:.1e} E {:.1e}".format(*out)


def check_derivative_identity():
    worst = 0.0
    for seed in range(3):
        dc = conservation_derivative_check(_smooth_state(256, 60.0, seed), P)
        worst = max(worst, abs(dc.dmomentum) / dc.momentum_scale, abs(dc.denergy) / dc.energy_scale)
    return worst <= 1e-8, f"max |d/dt| / scale = {worst:.1e}"


def check_kawahara_l2():
    grid = make_grid(128, 40.0)
    v0 = np.exp(-grid.x**2) + 0.3 * np.cos(2 * np.pi * 3 * grid.x / grid.length)
    v = kawahara_integrate(v0, 0.2, P, SolverConfig(dt=1e-3), grid)
    v0p = np.fft.ifft(np.fft.fft(v0) * (np.abs(grid.mode_index) <= 32)).real
    drift = abs(l2_norm(v, grid) - l2_norm(v0p, grid)) / l2_norm(v0p, grid)
    return drift <= 1e-9, f"relative L2 drift {drift:.1e}"


def check_cht():
    st = _smooth_state()
    cfg = SolverConfig(dt=2e-3)
    reps = run_globalization(0.3 * st.u, st.v, P, cfg, 0.05, 3, st.grid)
    ident = max(r.identity_residual for r in reps)
    ctrl = run_globalization(0.3 * st.u, st.v, PhysParams(epsilon=0.0), cfg, 0.05, 2, st.grid)
    w0 = max(r.w_norm_end for r in ctrl)
    return ident <= 1e-8 and w0 <= 1e-10, f"identity {ident:.1e}, eps=0 control |w| {w0:.1e}"


def check_dilation_norm():
    grid = make_grid(256, 60.0)
    v0 = np.exp(-grid.x**2)
    lam = 0.5
    g2, v2 = dilate_field(v0, grid, lam)
    err = abs(l2_norm(v2, g2) - lam**3.5 * l2_norm(v0, grid)) / l2_norm(v0, grid)
    return err <= 1e-10, f"L2 scaling mismatch {err:.1e}"


def check_partition():
    xi = np.random.default_rng(5).uniform(-200, 200, 10_000)
    part = bg.lp_partition(bg.shells_needed(200))
    err = np.max(np.abs(part.shells(xi).sum(axis=0) - 1))
    return err <= 1e-14, f"partition-of-unity error {err:.1e}"


def check_xsb():
    lat = bg.LatticeSpec(modulation_decay=0.0)
    rng = np.random.default_rng(7)
    worst, order = 0.0, True
    for _ in range(10):
        f = bg.random_field(lat, "schrodinger", rng)
        l2 = np.sqrt(np.sum(np.abs(f.samples) ** 2) * f.grid.dx * f.time_window / f.n_time)
        worst = max(worst, abs(bg.xsb_norm(f, 0, 0) - l2) / l2)
        order &= bg.besov_xsb_norm(f, 0.5, 0.5, np.inf) <= bg.besov_xsb_norm(f, 0.5, 0.5, 1) * (1 + 1e-12)
    return worst <= 1e-12 and order, f"X^00 vs L2 {worst:.1e}, inf<=1 ordering {'ok' if order else 'violated'}"


def check_round_trips():
    st = _smooth_state(32, 10.0)
    cfg = parse_config("n = 32\nlength = 10\nic_u = sech(1, 0)\n")
    same_cfg = parse_config(serialize_config(cfg)) == cfg
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "s.skw"
        write_snapshot(path, st, P)
        back, params = read_snapshot(path)
    exact = (
        params == P
        and back.u.tobytes() == st.u.astype(complex).tobytes()
        and back.v.tobytes() == st.v.astype(float).tobytes()
        and back.t == st.t
    )
    return same_cfg and exact, f"config {'ok' if same_cfg else 'differs'}, snapshot {'bit-exact' if exact else 'differs'}"


def check_convergence():
    grid = make_grid(256, 100.0)
    u0 = make_initial_condition("gaussian(1, 0, 0, 2)", grid)
    v0 = make_initial_condition("gaussian(1, 0, 0, 2)", grid, real=True)
    st = CoupledState(grid, u0, v0, 0.0)
    dts = [8e-3, 4e-3, 2e-3, 1e-3, 5e-4]
    finals = [integrate(st, 0.5, P, with_dt(SolverConfig(), dt))[0] for dt in dts]
    errs = [l2_norm(f.u - finals[-1].u, grid) + l2_norm(f.v - finals[-1].v, grid) for f in finals[:-1]]
    slope = np.polyfit(np.log(dts[:-1]), np.log(errs), 1)[0]
    return abs(slope - 4) <= 0.3, f"self-convergence slope {slope:.2f}"


def check_growth_exponent():
    grid = make_grid(128, 50.0)
    u0 = np.exp(-grid.x**2) + 0j
    v0 = np.exp(-(grid.x**2) / 2)
    fit = growth_fit([0.05, 0.1, 0.2, 0.4], u0 / l2_norm(u0, grid), v0, P, SolverConfig(dt=2e-3), 0.1, grid)
    return abs(fit.slope - 2) <= 0.1, f"amplitude exponent {fit.slope:.3f}"


def check_dilated_residual():
    grid = make_grid(256, 100.0)
    u0 = make_initial_condition("gaussian(1, 0, 0, 2)", grid)
    v0 = make_initial_condition("gaussian(1, 0, 0, 2)", grid, real=True)
    cfg = SolverConfig(dt=1e-3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        base = dilated_residual(u0, v0, 1.0, 0.05, P, cfg, grid)
        half = dilated_residual(u0, v0, 0.5, 0.05, P, cfg, grid)
    ratio = half.relative / base.relative
    return ratio <= 10, f"relative residual ratio {ratio:.2f}"


def check_ensembles():
    lat = bg.LatticeSpec()
    maxima = [bg.bilinear_ensemble(case, 10, 1, P, lat).max_ratio for case in bg.CASES]
    ok = all(np.isfinite(m) and m > 0 for m in maxima)
    return ok, "max ratios " + ", ".join(f"{c}={m:.3g}" for c, m in zip(bg.CASES, maxima))


QUICK = (
    ("parseval", check_parseval),
    ("propagators", check_propagators),
    ("conservation", check_conservation),
    ("derivative identities", check_derivative_identity),
    ("kawahara L2", check_kawahara_l2),
    ("decomposition", check_cht),
    ("dilation L2 law", check_dilation_norm),
    ("partition of unity", check_partition),
    ("X^{s,b} norms", check_xsb),
    ("round trips", check_round_trips),
)

FULL = QUICK + (
    ("integrator order", check_convergence),
    ("amplitude exponent", check_growth_exponent),
    ("dilated residual", check_dilated_residual),
    ("bilinear ensembles", check_ensembles),
)


def run_checks(quick: bool = True, report=print) -> list[CheckResult]:
    results = []
    for name, fn in QUICK if quick else FULL:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - start)
        if report is not None:
            report(res.line())
        results.append(res)
    return results
