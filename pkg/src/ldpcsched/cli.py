"""Command-line front end for the FER simulation harness.

Example (Fig. 1-style recipe: all schedules at 1.75 dB):

    ldpcsched --code src/ldpcsched/data/qc_rate12_z54.qc --code-format qc \\
        --schedule flooding,lbp,rbp,arbp,nw-rbp,nw-arbp,pnw-arbp --p 54 \\
        --ebno-db 1.75 --max-iters 200 --frames 20000 --min-errors 0 \\
        --seed 1 --out fig1.csv
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .channel import ChannelParams, frame_rng, transmit_all_zero
from .codes import CodeFormatError, load_code
from .schedules import DecodeConfig, ScheduleKind, decode
from .sim import (Experiment, design_rate, diagnostics_trapping, emit_csv,
                  emit_trapping_csv, run_experiment)

_KIND_NAMES = {k.value: k for k in ScheduleKind}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ldpcsched",
        description="Monte-Carlo FER simulation of BP LDPC decoding under "
                    "flooding, layered, and residual-scheduled decoders.")
    ap.add_argument("--code", required=True, help="path to the code file")
    ap.add_argument("--code-format", required=True, choices=["alist", "qc"])
    ap.add_argument("--schedule", required=True,
                    help="comma-separated list from: " + ",".join(_KIND_NAMES))
    ap.add_argument("--ebno-db", required=True,
                    help="comma-separated SNR points in dB")
    ap.add_argument("--max-iters", type=int, default=50)
    ap.add_argument("--frames", type=int, default=1000,
                    help="minimum frames per (schedule, SNR) point")
    ap.add_argument("--min-errors", type=int, default=100,
                    help="minimum frame errors at the largest iteration cap "
                         "(0 disables the error target)")
    ap.add_argument("--seed", type=int, default=1, help="master seed")
    ap.add_argument("--p", type=int, default=1,
                    help="batch size for pnw-arbp")
    ap.add_argument("--snr-convention", choices=["ebno", "snr"], default="ebno")
    ap.add_argument("--out", required=True, help="output CSV path")
    ap.add_argument("--trace", default=None,
                    help="write the selection trace of frame 0 of the first "
                         "(schedule, SNR) point to this CSV")
    ap.add_argument("--max-frames", type=int, default=0,
                    help="hard frame cap per point (0 = none)")
    ap.add_argument("--serial", action="store_true",
                    help="decode frames serially instead of across threads")
    ap.add_argument("--diagnose", default=None, metavar="REF,CAND",
                    help="also run the trapping-set divergence report for the "
                         "given reference,candidate schedules")
    ap.add_argument("--diagnose-out", default=None,
                    help="output CSV path for --diagnose")
    return ap


def _parse_schedules(text: str, parser: argparse.ArgumentParser) -> list[ScheduleKind]:
    kinds = []
    for name in text.split(","):
        name = name.strip()
        if name not in _KIND_NAMES:
            parser.error(f"unknown schedule {name!r} (choose from {','.join(_KIND_NAMES)})")
        kinds.append(_KIND_NAMES[name])
    return kinds


def _write_trace(args, exp: Experiment) -> None:
    graph = load_code(exp.code_path, exp.code_format)
    params = ChannelParams(exp.ebno_db[0], design_rate(graph), exp.snr_convention)
    llr = transmit_all_zero(params, graph.n_vars, frame_rng(exp.master_seed, 0))
    cfg = DecodeConfig(schedule=exp.schedules[0], max_iters=exp.max_iters, p=exp.p)
    outcome = decode(graph, llr, cfg, trace=True)
    lines = ["step,kind,check,var,residual"]
    for step, row in enumerate(outcome.trace):
        kind = "node" if row[0] > 0.5 else "edge"
        lines.append(f"{step},{kind},{int(row[1])},{int(row[2])},{float(row[3])!r}")
    Path(args.trace).write_text("\n".join(lines) + "\n", encoding="ascii")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        schedules = _parse_schedules(args.schedule, parser)
        try:
            ebno = [float(x) for x in args.ebno_db.split(",")]
        except ValueError:
            parser.error(f"bad --ebno-db list {args.ebno_db!r}")
        if args.p < 1:
            parser.error(f"--p must be >= 1, got {args.p}")
    except SystemExit as e:
        return int(e.code or 2)

    try:
        exp = Experiment(
            code_path=args.code,
            code_format=args.code_format,
            schedules=tuple(schedules),
            ebno_db=tuple(ebno),
            max_iters=args.max_iters,
            min_frames=args.frames,
            min_errors=args.min_errors,
            master_seed=args.seed,
            snr_convention=args.snr_convention,
            p=args.p,
            max_frames=args.max_frames,
        )
        records = run_experiment(exp, parallel=not args.serial,
                                 log=lambda s: print(s, file=sys.stderr))
        Path(args.out).write_text(emit_csv(records), encoding="ascii")
        if args.trace:
            _write_trace(args, exp)
        if args.diagnose:
            names = args.diagnose.split(",")
            if len(names) != 2 or any(n not in _KIND_NAMES for n in names):
                print(f"error: --diagnose expects REF,CAND schedule names, got "
                      f"{args.diagnose!r}", file=sys.stderr)
                return 2
            if not args.diagnose_out:
                print("error: --diagnose requires --diagnose-out", file=sys.stderr)
                return 2
            report = diagnostics_trapping(exp, _KIND_NAMES[names[0]],
                                          _KIND_NAMES[names[1]],
                                          parallel=not args.serial)
            Path(args.diagnose_out).write_text(emit_trapping_csv(report),
                                               encoding="ascii")
    except (OSError, CodeFormatError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
