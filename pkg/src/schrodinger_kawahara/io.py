"""Run configuration, initial-condition presets, snapshots and CSV output.

Configuration files are flat ``key = value`` text; ``#`` starts a comment.
Recognised keys and defaults are listed in :data:`DEFAULTS`.

Snapshot layout (``SKW1``, all little-endian)::

    magic    4 bytes  b"SKW1"
    version  u32      1
    n        u64      number of grid points
    length   f64      domain length L
    t        f64      time
    alpha, beta, gamma, delta, epsilon   f64 each
    u        2n f64   interleaved (re, im)
    v        n f64
"""

from __future__ import annotations

import csv
import math
import os
import re
import struct
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .dynamics import NONLINEAR_SWITCHES, CoupledState, SolverConfig
from .errors import ConfigError, FormatError
from .propagators import PhysParams
from .spectral import Grid, make_grid

OUTPUT_ROOT_ENV = "SKW_OUTPUT_ROOT"

DEFAULTS = {
    "alpha": "1",
    "beta": "1",
    "gamma": "1",
    "delta": "1",
    "epsilon": "1",
    "n": "256",
    "length": "100",
    "dt": "0.001",
    "dealias": "1/2",
    "disable": "",
    "project_initial": "true",
    "t_end": "1",
    "ic_u": "gaussian(1, 0, 0)",
    "ic_v": "gaussian(1, 0, 0)",
    "seed": "0",
    "output_dir": "",
    "cadence": "10",
    "snapshot_every": "0",
}


@dataclass(frozen=True)
class ICDescriptor:
    name: str
    args: tuple = ()
    seed: int | None = None

    def __str__(self):
        body = ", ".join(_fmt(a) for a in self.args)
        return f"{self.name}({body})"


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams = field(default_factory=PhysParams)
    n: int = 256
    length: float = 100.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    t_end: float = 1.0
    ic_u: ICDescriptor = ICDescriptor("gaussian", (1.0, 0.0, 0.0))
    ic_v: ICDescriptor = ICDescriptor("gaussian", (1.0, 0.0, 0.0))
    seed: int = 0
    output_dir: str = ""
    cadence: int = 10
    snapshot_every: int = 0

    def grid(self) -> Grid:
        return make_grid(self.n, self.length)

    def output_path(self) -> Path:
        if self.output_dir:
            return Path(self.output_dir)
        return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


# --------------------------------------------------------------------------
# config text


_IC_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*\((.*)\)\s*$")


def parse_ic(text: str, line: int | None = None) -> ICDescriptor:
    m = _IC_RE.match(text)
    if not m:
        raise ConfigError(f"malformed initial condition {text!r}; expected name(arg, ...)", line)
    name, body = m.group(1), m.group(2).strip()
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}", line)
    args = []
    if body:
        for tok in body.split(","):
            try:
                args.append(float(tok))
            except ValueError:
                raise ConfigError(f"bad numeric argument {tok.strip()!r} in {text!r}", line) from None
    lo, hi = PRESETS[name][1]
    if not lo <= len(args) <= hi:
        raise ConfigError(f"preset {name!r} takes {lo}..{hi} arguments, got {len(args)}", line)
    return ICDescriptor(name, tuple(args))


def _parse_bool(value: str, line) -> bool:
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}", line)


def _parse_float(value: str, key: str, line) -> float:
    try:
        x = float(Fraction(value)) if "/" in value else float(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: expected a number, got {value!r}", line) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite", line)
    return x


def _parse_int(value: str, key: str, line) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}", line) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a flat ``key = value`` configuration."""
    values: dict[str, tuple[str, int | None]] = {k: (v, None) for k, v in DEFAULTS.items()}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        seen.add(key)
        values[key] = (value, lineno)

    def get_float(k):
        return _parse_float(values[k][0], k, values[k][1])

    def get_int(k):
        return _parse_int(values[k][0], k, values[k][1])

    coeffs = {k: get_float(k) for k in ("alpha", "beta", "gamma", "delta", "epsilon")}
    if coeffs["delta"] == 0:
        raise ConfigError("delta must be nonzero (well-posedness requires fifth-order dispersion)", values["delta"][1])
    params = PhysParams(**coeffs)

    n = get_int("n")
    length = get_float("length")
    if n < 4 or n % 2:
        raise ConfigError(f"n must be an even integer >= 4, got {n}", values["n"][1])
    if length <= 0:
        raise ConfigError("length must be positive", values["length"][1])

    dt = get_float("dt")
    if dt <= 0:
        raise ConfigError("dt must be positive", values["dt"][1])
    rule_text, rule_line = values["dealias"]
    try:
        rule = Fraction(rule_text).limit_denominator(64)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"dealias: expected 1/2 or 2/3, got {rule_text!r}", rule_line) from None
    if rule not in (Fraction(1, 2), Fraction(2, 3)):
        raise ConfigError(f"dealias: expected 1/2 or 2/3, got {rule_text!r}", rule_line)
    disable_text, disable_line = values["disable"]
    disable = frozenset(s.strip() for s in disable_text.split(",") if s.strip())
    if disable - NONLINEAR_SWITCHES:
        raise ConfigError(f"disable: unknown switches {sorted(disable - NONLINEAR_SWITCHES)}", disable_line)
    solver = SolverConfig(dt=dt, dealias_rule=rule, disable_nonlinear=disable, project_initial=_parse_bool(*values["project_initial"]))

    t_end = get_float("t_end")
    if t_end < 0:
        raise ConfigError("t_end must be >= 0", values["t_end"][1])
    cadence = get_int("cadence")
    if cadence < 1:
        raise ConfigError("cadence must be >= 1", values["cadence"][1])
    snapshot_every = get_int("snapshot_every")
    if snapshot_every < 0:
        raise ConfigError("snapshot_every must be >= 0", values["snapshot_every"][1])

    return RunConfig(
        params=params,
        n=n,
        length=length,
        solver=solver,
        t_end=t_end,
        ic_u=parse_ic(*values["ic_u"]),
        ic_v=parse_ic(*values["ic_v"]),
        seed=get_int("seed"),
        output_dir=values["output_dir"][0],
        cadence=cadence,
        snapshot_every=snapshot_every,
    )


def serialize_config(cfg: RunConfig) -> str:
    p = cfg.params
    rule = cfg.solver.dealias_rule
    lines = [
        f"alpha = {p.alpha!r}",
        f"beta = {p.beta!r}",
        f"gamma = {p.gamma!r}",
        f"delta = {p.delta!r}",
        f"epsilon = {p.epsilon!r}",
        f"n = {cfg.n}",
        f"length = {cfg.length!r}",
        f"dt = {cfg.solver.dt!r}",
        f"dealias = {rule.numerator}/{rule.denominator}",
        f"disable = {','.join(sorted(cfg.solver.disable_nonlinear))}",
        f"project_initial = {'true' if cfg.solver.project_initial else 'false'}",
        f"t_end = {cfg.t_end!r}",
        f"ic_u = {cfg.ic_u}",
        f"ic_v = {cfg.ic_v}",
        f"seed = {cfg.seed}",
        f"output_dir = {cfg.output_dir}",
        f"cadence = {cfg.cadence}",
        f"snapshot_every = {cfg.snapshot_every}",
    ]
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        return parse_config(text)
    except ConfigError as exc:
        err = ConfigError(f"{path}: {exc}")
        err.line = exc.line
        raise err from exc


# --------------------------------------------------------------------------
# initial conditions


def _gaussian(grid: Grid, rng, a, x0, k0, width=1.0):
    return a * np.exp(-(((grid.x - x0) / width) ** 2)) * np.exp(1j * k0 * grid.x)


def _sech(grid: Grid, rng, a, x0):
    return a / np.cosh(grid.x - x0) + 0j


def _cosine(grid: Grid, rng, a, k):
    if k != int(k):
        raise ConfigError("cosine: mode number must be an integer")
    return a * np.cos(2 * np.pi * int(k) * grid.x / grid.length) + 0j


def _random_bandlimited(grid: Grid, rng, a, kmax, seed=None):
    if seed is not None:
        rng = np.random.default_rng(int(seed))
    kmax = int(kmax)
    if not 0 <= kmax < grid.n_points // 2:
        raise ConfigError(f"random_bandlimited: kmax must lie in [0, {grid.n_points // 2})")
    k = grid.mode_index
    sel = np.abs(k) <= kmax
    c = np.zeros(grid.n_points, dtype=complex)
    c[sel] = rng.standard_normal(sel.sum()) + 1j * rng.standard_normal(sel.sum())
    f = np.fft.ifft(c)
    peak = np.max(np.abs(f))
    return a * f / peak if peak > 0 else f


# name -> (builder, (min args, max args))
PRESETS = {
    "gaussian": (_gaussian, (3, 4)),
    "sech": (_sech, (2, 2)),
    "cosine": (_cosine, (2, 2)),
    "random_bandlimited": (_random_bandlimited, (2, 3)),
}


def make_initial_condition(descriptor, grid: Grid, seed: int | None = 0, real: bool = False) -> np.ndarray:
    """Sample a preset on ``grid``.

    Presets: ``gaussian(a, x0, k0[, width])`` = a exp(-((x-x0)/width)^2) exp(i k0 x);
    ``sech(a, x0)``; ``cosine(a, k)`` = a cos(2 pi k x / L);
    ``random_bandlimited(a, kmax[, seed])`` with modes |k| <= kmax and peak
    modulus a. With ``real=True`` the real part is returned (for v). The
    generator is numpy's PCG64 seeded with ``seed``; a seed in the descriptor
    takes precedence.
    """
    if isinstance(descriptor, str):
        descriptor = parse_ic(descriptor)
    if descriptor.name not in PRESETS:
        raise ConfigError(f"unknown preset {descriptor.name!r}")
    builder, (lo, hi) = PRESETS[descriptor.name]
    if not lo <= len(descriptor.args) <= hi:
        raise ConfigError(f"preset {descriptor.name!r} takes {lo}..{hi} arguments")
    if descriptor.seed is not None:
        seed = descriptor.seed
    rng = np.random.default_rng(seed)
    f = builder(grid, rng, *descriptor.args)
    if real:
        if descriptor.name == "random_bandlimited":
            f = f.real / max(np.max(np.abs(f.real)), 1e-300) * descriptor.args[0]
        else:
            f = f.real
    return f


def initial_state(cfg: RunConfig) -> CoupledState:
    grid = cfg.grid()
    u0 = make_initial_condition(cfg.ic_u, grid, cfg.seed)
    v0 = make_initial_condition(cfg.ic_v, grid, cfg.seed + 1, real=True)
    return CoupledState(grid, u0, v0, 0.0)


# --------------------------------------------------------------------------
# snapshots

MAGIC = b"SKW1"
VERSION = 1
_HEADER = struct.Struct("<4sIQdd5d")


def encode_snapshot(state: CoupledState, params: PhysParams) -> bytes:
    n = state.grid.n_points
    header = _HEADER.pack(MAGIC, VERSION, n, state.grid.length, state.t, *params.as_tuple())
    u = np.empty(2 * n, dtype="<f8")
    u[0::2] = state.u.real
    u[1::2] = state.u.imag
    return header + u.tobytes() + np.asarray(state.v, dtype="<f8").tobytes()


def decode_snapshot(data: bytes) -> tuple[CoupledState, PhysParams]:
    if len(data) < _HEADER.size:
        raise FormatError(f"snapshot truncated: {len(data)} bytes < header size {_HEADER.size}")
    magic, version, n, length, t, *coeffs = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 24 * n
    if len(data) != expected:
        raise FormatError(f"snapshot length {len(data)} does not match header (expected {expected})")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    u = body[0 : 2 * n : 2] + 1j * body[1 : 2 * n : 2]
    v = body[2 * n :].astype(float)
    try:
        grid = make_grid(n, length)
        params = PhysParams(*coeffs)
    except ValueError as exc:
        raise FormatError(f"invalid snapshot header: {exc}") from exc
    return CoupledState(grid, u, v, t), params


def write_snapshot(path, state: CoupledState, params: PhysParams) -> None:
    path = Path(path)
    try:
        path.write_bytes(encode_snapshot(state, params))
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path}: {exc.strerror or exc}") from exc


def read_snapshot(path) -> tuple[CoupledState, PhysParams]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read snapshot {path}: {exc.strerror or exc}") from exc
    try:
        return decode_snapshot(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# CSV

DIAGNOSTIC_COLUMNS = ("t", "mass", "momentum", "energy", "l2_u", "l2_v", "l2_w")


def _num(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path, columns, rows) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([row[c] if isinstance(row[c], str) else _num(row[c]) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_diagnostics_csv(path, rows) -> None:
    """One row per observer event with header ``t,mass,momentum,energy,l2_u,l2_v,l2_w``."""
    rows = [{c: row.get(c, float("nan")) for c in DIAGNOSTIC_COLUMNS} for row in rows]
    write_csv(path, DIAGNOSTIC_COLUMNS, rows)


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **kw)
