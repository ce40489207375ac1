"""Command line: ``ifofdm {dof,sweep,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .dof import DofQuery, mimo_circulant_ic_dof, sum_dof_symmetric, sum_dof_theorem1, tdma_ofdm_dof
from .sweep import SCHEMES, ExperimentConfig, emit_csv, run_sweep
from .validate import run_checks

__all__ = ["build_parser", "cli_main", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; route through cli_main so it can return 2
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _snr_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric SNR range {text!r}")
    if step <= 0:
        raise argparse.ArgumentTypeError("SNR step must be positive")
    return start, stop, step


def _schemes(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in names if s not in SCHEMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {', '.join(SCHEMES)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ifofdm", description="IF-OFDM simulator and DoF calculator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    d = sub.add_parser("dof", help="closed-form sum-DoF values")
    d.add_argument("--k", type=int, required=True, help="number of users")
    d.add_argument("--ld", type=int, required=True, help="desired-link taps L_D")
    d.add_argument("--li", type=int, required=True, help="interfering-link taps L_I")
    d.add_argument("--desired", type=_int_list, help="per-user desired taps (overrides --ld)")
    d.add_argument("--m", type=int, default=64, help="TDMA-OFDM IDFT size")
    d.add_argument("--antennas", type=int, help="antennas per node for the circulant MIMO IC")

    s = sub.add_parser("sweep", help="Monte-Carlo ergodic sum-SE sweep to CSV")
    s.add_argument("--scheme", type=_schemes, default=("if-ofdm",), help="comma list of schemes")
    s.add_argument("--k", type=_int_list, required=True, help="comma list of user counts")
    s.add_argument("--ld", type=int, required=True)
    s.add_argument("--li", type=int, required=True)
    s.add_argument("--snr", type=_snr_range, default=(0.0, 30.0, 5.0), help="start:stop:step in dB")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta", type=float, default=0.0, help="tap power decay rate")
    s.add_argument("--b", type=int, default=64, help="subblocks per block")
    s.add_argument("--tdma-m", type=int, default=64, help="TDMA-OFDM IDFT size")
    s.add_argument("--guard-variant", action="store_true", help="guard slots instead of SIC")
    s.add_argument("--out", type=Path, required=True)

    sub.add_parser("validate", help="run the invariant checks")
    return p


def _show(label: str, value: Fraction) -> str:
    return f"{label}: {value} (= {float(value):.6f})"


def _cmd_dof(args) -> int:
    taps = args.desired if args.desired else [args.ld] * args.k
    if len(taps) != args.k:
        raise _UsageError(f"--desired has {len(taps)} entries but --k is {args.k}")
    L_D = max(taps)
    try:
        print(_show("theorem1", sum_dof_theorem1(DofQuery(tuple(taps), args.li))))
        if args.desired is None and L_D > args.li:
            print(_show("symmetric", sum_dof_symmetric(args.k, L_D, args.li)))
        print(_show(f"tdma_ofdm(M={args.m})", tdma_ofdm_dof(args.m, L_D, args.li)))
        if args.antennas is not None:
            print(_show(f"mimo_circulant(antennas={args.antennas})", mimo_circulant_ic_dof(args.k, args.antennas)))
    except ValueError as exc:
        raise _UsageError(str(exc))
    return 0


def _cmd_sweep(args) -> int:
    try:
        cfg = ExperimentConfig(
            K=tuple(args.k),
            L_D=args.ld,
            L_I=args.li,
            schemes=args.scheme,
            snr_db=args.snr,
            trials=args.trials,
            B=args.b,
            seed=args.seed,
            beta=args.beta,
            tdma_M=args.tdma_m,
            guard_variant=args.guard_variant,
            out=args.out,
        )
    except ValueError as exc:
        raise _UsageError(str(exc))
    result = run_sweep(cfg)
    for r in result.rows:
        if r.error:
            print(f"warning: {r.scheme} K={r.k}: {r.error}", file=sys.stderr)
    path = emit_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {path}")
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 2
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        if args.command == "dof":
            return _cmd_dof(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return 0 if run_checks() else 1
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
