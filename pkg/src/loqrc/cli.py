"""Command line entry point: ``loqrc <subcommand> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import List, Optional

from .experiments import ExperimentSpec, load_config, run
from .plotting import emit_plot_scripts


def _floats(s: str) -> tuple:
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s: str) -> tuple:
    return tuple(int(float(v)) for v in s.split(",") if v.strip())


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON experiment config (CLI flags override it)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--realizations", type=int)
    p.add_argument("--alpha-fb", type=_floats, help="comma-separated feedback gains")
    p.add_argument("--alpha-in", type=_floats, help="comma-separated input strengths")
    p.add_argument("--exact", action="store_true", help="expectation-value features (no shot noise)")
    p.add_argument("--shots", type=_ints, help="comma-separated measurement budgets N_m")
    p.add_argument("--eta", type=float, help="detection efficiency")
    p.add_argument("--jobs", type=int, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loqrc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("memory-capacity", help="MC(tau) and MC_tot versus feedback gain")
    _common(p)
    p.add_argument("--max-delay", type=int)

    p = sub.add_parser("forecast", help="Mackey-Glass / NARMA / Ising forecasting NMSE")
    _common(p)
    p.add_argument("--task", choices=("mg", "narma", "ising"), required=True)
    p.add_argument("--horizons", type=_ints, help="prediction horizons (mg, ising)")
    p.add_argument("--orders", type=_ints, help="NARMA orders")

    p = sub.add_parser("shot-noise", help="MC_tot versus measurement budget")
    _common(p)
    p.add_argument("--max-delay", type=int)

    p = sub.add_parser("plot", help="emit gnuplot scripts for result CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out", help="directory for the scripts (default: next to each CSV)")
    return parser


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    spec = load_config(args.config) if args.config else ExperimentSpec()
    over = {"kind": args.command}
    res = {}
    for flag, key in (("seed", "master_seed"), ("out", "out"), ("realizations", "realizations"),
                      ("alpha_fb", "alpha_fb"), ("alpha_in", "alpha_in"), ("jobs", "jobs"),
                      ("max_delay", "max_delay"), ("horizons", "horizons"),
                      ("orders", "narma_orders"), ("task", "task")):
        val = getattr(args, flag, None)
        if val is not None:
            over[key] = val
    if args.eta is not None:
        res["eta_eff"] = args.eta
    if args.shots is not None:
        if args.command == "shot-noise":
            over["shots"] = args.shots
        elif args.exact:
            raise ValueError("--exact and --shots are mutually exclusive")
        elif len(args.shots) != 1:
            raise ValueError(f"{args.command} takes a single --shots value")
        else:
            res["shots"] = args.shots[0]
    if args.exact:
        res["shots"] = None
    if res:
        over["reservoir"] = dataclasses.replace(spec.reservoir, **res)
    return dataclasses.replace(spec, **over)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "plot":
            for path in emit_plot_scripts(args.csv, args.out):
                print(path)
            return 0
        result = run(spec_from_args(args))
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"loqrc: error: {exc}", file=sys.stderr)
        return 1
    for path in result["paths"].values():
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
