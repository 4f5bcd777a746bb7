"""Forecasting NMSE for Mackey-Glass, Ising and NARMA-n at the default gains.

    python scripts/forecast_benchmarks.py --tasks mg ising narma --realizations 30
"""

import argparse

from loqrc.experiments import DEFAULT_GAINS, ExperimentSpec, run
from loqrc.plotting import emit_plot_scripts


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--tasks", nargs="+", default=["mg", "ising", "narma"],
                   choices=["mg", "ising", "narma"])
    p.add_argument("--realizations", type=int, default=None,
                   help="default: 30 for MG and Ising, 20 for NARMA")
    p.add_argument("--horizons", type=int, nargs="+", default=[1, 2, 3, 5, 7, 10])
    p.add_argument("--orders", type=int, nargs="+", default=[7, 10])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/forecast")
    args = p.parse_args()

    for task in args.tasks:
        n = args.realizations or (20 if task == "narma" else 30)
        spec = ExperimentSpec(kind="forecast", task=task, alpha_fb=DEFAULT_GAINS, alpha_in=(0.001,),
                              horizons=tuple(args.horizons), narma_orders=tuple(args.orders),
                              realizations=n, jobs=args.jobs, out=args.out)
        res = run(spec)
        for name, a_fb, h, err in res["rows"]:
            print(f"{name:<6} alpha_fb={a_fb:<4} horizon/order={h:<3} NMSE={err:.3e}")
        if res["failures"]:
            print(f"{task}: diverged instances {res['failures']}")
        emit_plot_scripts([res["paths"]["forecast"]])


if __name__ == "__main__":
    main()
