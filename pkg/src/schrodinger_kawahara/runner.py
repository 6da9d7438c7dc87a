"""Drivers behind the CLI subcommands; each writes its results into one directory."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .bourgain import CASES, LatticeSpec, ensemble_sweep
from .dynamics import CoupledState, conserved_quantities, integrate, kawahara_integrate
from .globalization import IntervalReport, run_globalization
from .io import (
    DIAGNOSTIC_COLUMNS,
    RunConfig,
    initial_state,
    make_initial_condition,
    read_snapshot,
    serialize_config,
    write_csv,
    write_diagnostics_csv,
    write_snapshot,
)
from .scaling import dilated_residual
from .spectral import l2_norm

log = logging.getLogger(__name__)


def _prepare(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    return out


def _segments(t0: float, t_end: float, dt: float, steps: int):
    """Segment end times every ``steps`` steps of size dt, then t_end."""
    if steps <= 0:
        return [t_end]
    ends = []
    k = 1
    while t0 + k * steps * dt < t_end - 1e-12 * max(abs(t_end), dt):
        ends.append(t0 + k * steps * dt)
        k += 1
    return ends + [t_end]


def run_simulation(cfg: RunConfig, out_dir, resume=None, stop_at: float | None = None) -> CoupledState:
    """Integrate the coupled system per ``cfg``.

    Writes ``config.cfg``, ``diagnostics.csv`` and ``final.skw``; with
    ``snapshot_every > 0`` a checkpoint ``checkpoint_<step>.skw`` is written
    every that many steps. ``resume`` names a snapshot to continue from;
    ``stop_at`` ends the run early (the final snapshot then holds that time).
    """
    out = _prepare(out_dir)
    (out / "config.cfg").write_text(serialize_config(cfg))
    if resume is not None:
        state, params = read_snapshot(resume)
        if params != cfg.params:
            log.warning("snapshot coefficients %s differ from config; using the snapshot's", params.as_tuple())
    else:
        state, params = initial_state(cfg), cfg.params
    t_end = cfg.t_end if stop_at is None else min(stop_at, cfg.t_end)
    dt = cfg.solver.dt
    rows = []
    for i, seg_end in enumerate(_segments(state.t, t_end, dt, cfg.snapshot_every)):
        state, diag = integrate(state, seg_end, params, cfg.solver, every=cfg.cadence)
        # the first record of a later segment repeats the previous last one
        rows.extend(diag.rows if i == 0 or not rows else diag.rows[1:])
        if cfg.snapshot_every and seg_end < t_end:
            step = int(round(seg_end / dt))
            write_snapshot(out / f"checkpoint_{step:08d}.skw", state, params)
    write_diagnostics_csv(out / "diagnostics.csv", rows)
    write_snapshot(out / "final.skw", state, params)
    return state


def run_kawahara(cfg: RunConfig, out_dir) -> np.ndarray:
    """Standalone Kawahara flow of ``ic_v``; u is identically zero in the diagnostics."""
    out = _prepare(out_dir)
    (out / "config.cfg").write_text(serialize_config(cfg))
    grid = cfg.grid()
    v = make_initial_condition(cfg.ic_v, grid, cfg.seed + 1, real=True)
    zero = np.zeros(grid.n_points, dtype=complex)
    chunk = cfg.cadence * cfg.solver.dt
    rows = []
    t = 0.0

    def record(t, v):
        cons = conserved_quantities(CoupledState(grid, zero, v, t), cfg.params)
        rows.append({"t": t, **cons._asdict(), "l2_u": 0.0, "l2_v": l2_norm(v, grid), "l2_w": float("nan")})

    record(t, v)
    while t < cfg.t_end * (1 - 1e-12):
        step = min(chunk, cfg.t_end - t)
        v = kawahara_integrate(v, step, cfg.params, cfg.solver, grid)
        t = min(t + chunk, cfg.t_end)
        record(t, v)
    write_diagnostics_csv(out / "diagnostics.csv", rows)
    write_snapshot(out / "final.skw", CoupledState(grid, zero, v, t), cfg.params)
    return v


def run_cht(cfg: RunConfig, out_dir, T: float, intervals: int) -> list[IntervalReport]:
    out = _prepare(out_dir)
    (out / "config.cfg").write_text(serialize_config(cfg))
    state = initial_state(cfg)
    reports = run_globalization(state.u, state.v, cfg.params, cfg.solver, T, intervals, cfg.grid())
    write_csv(out / "intervals.csv", IntervalReport.FIELDS, [r.as_row() for r in reports])
    return reports


def run_scale_check(cfg: RunConfig, out_dir, lam: float) -> dict:
    """Residual of the dilated trajectory at ``lam`` against the lam = 1 baseline."""
    out = _prepare(out_dir)
    state = initial_state(cfg)
    grid = cfg.grid()
    base = dilated_residual(state.u, state.v, 1.0, cfg.t_end, cfg.params, cfg.solver, grid)
    dil = dilated_residual(state.u, state.v, lam, cfg.t_end, cfg.params, cfg.solver, grid)
    result = {
        "lambda": lam,
        "baseline": {k: v for k, v in asdict(base).items() if k != "lam"} | {"relative": base.relative},
        "dilated": {k: v for k, v in asdict(dil).items() if k != "lam"} | {"relative": dil.relative},
        "relative_ratio": dil.relative / base.relative if base.relative else float("inf"),
    }
    (out / "scale_check.json").write_text(json.dumps(result, indent=2))
    return result


ENSEMBLE_COLUMNS = ("case", "seed", "n", "n_samples", "max_ratio", "argmax_sample")


def run_norms(out_dir, cases, seeds, resolutions, n_samples, params, workers=1, lattice=LatticeSpec()):
    out = _prepare(out_dir)
    unknown = set(cases) - set(CASES)
    if unknown:
        raise ValueError(f"unknown cases {sorted(unknown)}; known: {sorted(CASES)}")
    reports = ensemble_sweep(cases, seeds, resolutions, n_samples, params, workers, lattice)
    write_csv(out / "ensemble.csv", ENSEMBLE_COLUMNS, [r.as_row() for r in reports])
    return reports


__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "ENSEMBLE_COLUMNS",
    "run_cht",
    "run_kawahara",
    "run_norms",
    "run_scale_check",
    "run_simulation",
]
