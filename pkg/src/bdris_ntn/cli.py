"""Command line entry point: ``bdris-ntn run | sweep | trace``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .config import ConfigError, SystemConfig, load_config, w_to_dbm
from .harness import (
    ARCHITECTURES,
    SWEEP_VARIABLES,
    TRACE_HEADER,
    SweepSpec,
    channel_hash,
    emit_csv,
    emit_trace_csv,
    run_sweep,
    solve_trial,
    trace_rows,
    write_csv,
)


def _load(args) -> SystemConfig:
    cfg = load_config(args.config) if args.config else SystemConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from None


def _archs(text: str) -> tuple[str, ...]:
    archs = tuple(a.strip() for a in text.split(",") if a.strip())
    bad = [a for a in archs if a not in ARCHITECTURES]
    if bad or not archs:
        raise argparse.ArgumentTypeError(f"architectures must be from {ARCHITECTURES}")
    return archs


def cmd_run(args) -> int:
    cfg = _load(args)
    ch, sol = solve_trial(cfg, args.trial, args.arch)
    lines = [
        f"architecture        {args.arch}",
        f"trial               {args.trial}",
        f"users / elements    {cfg.num_users} / {cfg.ris_elements}",
        f"HAPS budget         {w_to_dbm(cfg.haps_power_w):.2f} dBm",
        f"interference cap    {cfg.interference_cap_w:.3g} W",
        f"sum rate            {sol.asr:.6f} bit/s/Hz",
        f"AO iterations       {sol.iterations_used} (converged: {sol.converged})",
        f"powers [W]          {np.array2string(sol.p, precision=6)}",
        f"total power [W]     {np.sum(sol.p):.6g}",
        f"interference [W]    {np.array2string(sol.interference, precision=4)}",
        f"channel hash        {channel_hash(ch)}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = SweepSpec(args.var, args.values, args.trials or cfg.trials, args.arch)
    records = run_sweep(cfg, spec, jobs=args.jobs)
    if args.out:
        emit_csv(records, args.out)
    else:
        write_csv(records, sys.stdout)
    failed = sum(not np.isfinite(r.asr) for r in records)
    if failed:
        logging.getLogger(__name__).warning("%d trial(s) failed", failed)
    return 0


def cmd_trace(args) -> int:
    cfg = _load(args)
    _, sol = solve_trial(cfg, args.trial, args.arch)
    if args.out:
        emit_trace_csv(sol.trace, args.out)
    else:
        sys.stdout.write(",".join(TRACE_HEADER) + "\n")
        for row in trace_rows(sol.trace):
            sys.stdout.write(",".join(row) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes (0 = all cores)")

    parser = argparse.ArgumentParser(
        prog="bdris-ntn",
        description="BD-RIS assisted HAPS spectrum sharing under LEO interference caps")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="solve one scenario")
    run.add_argument("--trial", type=int, default=0)
    run.add_argument("--arch", choices=ARCHITECTURES, default="bdris")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", parents=[common], help="Monte Carlo parameter sweep")
    sweep.add_argument("--var", required=True, choices=SWEEP_VARIABLES + ("interference_cap_W",))
    sweep.add_argument("--values", required=True, type=_values, help="comma separated")
    sweep.add_argument("--trials", type=int, help="trials per point (default: config trials)")
    sweep.add_argument("--arch", type=_archs, default=ARCHITECTURES, help="e.g. bdris,dris")
    sweep.set_defaults(func=cmd_sweep)

    trace = sub.add_parser("trace", parents=[common], help="per-iteration AO convergence CSV")
    trace.add_argument("--trial", type=int, default=0)
    trace.add_argument("--arch", choices=ARCHITECTURES, default="bdris")
    trace.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs == 0:
        args.jobs = os.cpu_count() or 1
    try:
        return args.func(args)
    except ConfigError as exc:
        parser.exit(2, f"bdris-ntn: config error: {exc}\n")
    except OSError as exc:
        parser.exit(1, f"bdris-ntn: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
