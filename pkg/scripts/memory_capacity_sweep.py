"""MC(tau) curves and MC_tot versus feedback gain at (M, N) = (16, 4), exact mode.

    python scripts/memory_capacity_sweep.py --realizations 30 --out results/memory_capacity
    python scripts/memory_capacity_sweep.py --alt-gains   # 1.5, 1.8, 2.25, 2.75
"""

import argparse

from loqrc.experiments import DEFAULT_GAINS, ExperimentSpec, run
from loqrc.plotting import emit_plot_scripts

ALT_GAINS = (1.5, 1.8, 2.25, 2.75)


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--realizations", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/memory_capacity")
    p.add_argument("--alt-gains", action="store_true",
                   help="use the alternative gain set 1.5, 1.8, 2.25, 2.75")
    args = p.parse_args()

    gains = ALT_GAINS if args.alt_gains else DEFAULT_GAINS
    spec = ExperimentSpec(kind="memory-capacity", alpha_fb=(0.0,) + gains, alpha_in=(0.001,),
                          realizations=args.realizations, master_seed=args.seed,
                          jobs=args.jobs, out=args.out)
    res = run(spec)
    for a_fb, total in res["total_rows"]:
        print(f"alpha_fb={a_fb:<5} MC_tot={total:.2f}")
    emit_plot_scripts([res["paths"]["mc_tau"], res["paths"]["mc_total"]])


if __name__ == "__main__":
    main()
