"""Command-line entry point ``skw``.

Exit status: 0 on success, 1 when a run fails (the message names the
offending path), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .bourgain import CASES, LatticeSpec
from .errors import SKError
from .io import OUTPUT_ROOT_ENV, load_config
from .propagators import PhysParams

log = logging.getLogger("schrodinger_kawahara")


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skw",
        description="Coupled Schrodinger-Kawahara solver and estimate experiments.",
        epilog=f"Outputs go to --out, else output_dir from the config, else ${OUTPUT_ROOT_ENV}, else ./runs.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def with_config(p):
        p.add_argument("--config", required=True, type=Path, help="flat key = value run configuration")
        p.add_argument("--out", type=Path, help="output directory")
        return p

    sim = with_config(sub.add_parser("simulate", help="integrate the coupled system"))
    sim.add_argument("--resume", type=Path, help="continue from an SKW1 snapshot")
    sim.add_argument("--stop-at", type=float, help="stop early at this time (for checkpointing)")

    with_config(sub.add_parser("kawahara", help="integrate the standalone Kawahara equation for ic_v"))

    cht = with_config(sub.add_parser("cht", help="interval decomposition run; writes intervals.csv"))
    cht.add_argument("--T", type=_positive_float, required=True, help="interval length")
    cht.add_argument("--intervals", type=int, required=True, help="number of intervals")

    sc = with_config(sub.add_parser("scale-check", help="residual of the dilated trajectory"))
    sc.add_argument("--lambda", dest="lam", type=_positive_float, default=0.5, help="dilation factor in (0, 1]")

    nm = sub.add_parser("norms", help="bilinear-estimate ensembles; writes ensemble.csv")
    nm.add_argument("--case", choices=sorted(CASES) + ["all"], default="all")
    nm.add_argument("--samples", type=int, default=100)
    nm.add_argument("--seeds", type=_int_list, default=[1, 2, 3])
    nm.add_argument("--resolutions", type=_int_list, default=[32, 64])
    nm.add_argument("--modulation-decay", type=float, default=LatticeSpec().modulation_decay)
    nm.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    nm.add_argument("--out", type=Path)

    vf = sub.add_parser("verify", help="run the invariant suite; nonzero exit on any failure")
    vf.add_argument("--quick", action="store_true", help="fast subset only")
    return parser


def _default_out(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / name


def _out_for(args, cfg, name: str) -> Path:
    if args.out is not None:
        return args.out
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return _default_out(name)


def _dispatch(args) -> int:
    from . import runner

    if args.command == "verify":
        from .verify import run_checks

        results = run_checks(quick=args.quick)
        failed = [r.name for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return 1 if failed else 0

    if args.command == "norms":
        cases = sorted(CASES) if args.case == "all" else [args.case]
        out = args.out or _default_out("norms")
        lattice = LatticeSpec(modulation_decay=args.modulation_decay)
        reports = runner.run_norms(out, cases, args.seeds, args.resolutions, args.samples, PhysParams(), args.workers, lattice)
        for r in reports:
            print(f"{r.case:6s} n={r.n:3d} seed={r.seed} max_ratio={r.max_ratio:.6g}")
        print(f"wrote {out / 'ensemble.csv'}")
        return 0

    cfg = load_config(args.config)
    if args.command == "simulate":
        out = _out_for(args, cfg, "simulate")
        state = runner.run_simulation(cfg, out, resume=args.resume, stop_at=args.stop_at)
        print(f"t = {state.t:.6g}; wrote {out}")
    elif args.command == "kawahara":
        out = _out_for(args, cfg, "kawahara")
        runner.run_kawahara(cfg, out)
        print(f"wrote {out}")
    elif args.command == "cht":
        if args.intervals < 1:
            raise SKError("--intervals must be >= 1")
        out = _out_for(args, cfg, "cht")
        reports = runner.run_cht(cfg, out, args.T, args.intervals)
        print(f"{len(reports)} intervals; wrote {out / 'intervals.csv'}")
    elif args.command == "scale-check":
        out = _out_for(args, cfg, "scale-check")
        res = runner.run_scale_check(cfg, out, args.lam)
        print(
            f"lambda={res['lambda']} relative residual {res['dilated']['relative']:.3e} "
            f"(baseline {res['baseline']['relative']:.3e}, ratio {res['relative_ratio']:.3g})"
        )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 with usage on bad input
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except (SKError, OSError, ValueError) as exc:
        print(f"skw {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
