"""MC_tot versus the measurement budget N_m for three input strengths.

Finite-shot runs feed the noisy coincidence estimates back into the wedge.

    python scripts/shot_noise_sweep.py --realizations 10 --jobs 4
"""

import argparse

from loqrc.experiments import ExperimentSpec, run
from loqrc.plotting import emit_plot_scripts


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--alpha-in", type=float, nargs="+", default=[0.001, 0.01, 0.1])
    p.add_argument("--alpha-fb", type=float, nargs="+", default=[1.5, 2.2, 3.2, 4.6])
    p.add_argument("--max-exponent", type=int, default=12)
    p.add_argument("--realizations", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/shot_noise")
    args = p.parse_args()

    shots = tuple(10**e for e in range(2, args.max_exponent + 1, 2))
    spec = ExperimentSpec(kind="shot-noise", alpha_in=tuple(args.alpha_in),
                          alpha_fb=tuple(args.alpha_fb), shots=shots,
                          realizations=args.realizations, jobs=args.jobs, out=args.out)
    res = run(spec)
    for a_in, a_fb, n_m, mc, exact in res["rows"]:
        print(f"alpha_in={a_in:<6} alpha_fb={a_fb:<4} N_m=1e{len(str(n_m)) - 1:<3} "
              f"MC_tot={mc:6.2f} (exact {exact:.2f})")
    emit_plot_scripts([res["paths"]["shot_noise"]])


if __name__ == "__main__":
    main()
