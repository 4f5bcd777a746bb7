"""Fine scan of MC_tot over the feedback gain to locate the stability boundary.

With the light-cone wedge used here (33 feedback MZIs) the collapse to zero
capacity sits between alpha_fb = 5 and 6 rather than near 4.7.

    python scripts/gain_scan.py --start 0 --stop 6.5 --step 0.25 --realizations 5
"""

import argparse

import numpy as np

from loqrc.experiments import ExperimentSpec, run


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=6.5)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--alpha-in", type=float, default=0.001)
    p.add_argument("--realizations", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results/gain_scan")
    args = p.parse_args()

    gains = tuple(round(float(g), 6) for g in np.arange(args.start, args.stop + 1e-9, args.step))
    spec = ExperimentSpec(kind="memory-capacity", alpha_fb=gains, alpha_in=(args.alpha_in,),
                          realizations=args.realizations, jobs=args.jobs, out=args.out)
    res = run(spec)
    peak = max(res["total_rows"], key=lambda r: r[1])
    for a_fb, total in res["total_rows"]:
        bar = "#" * int(round(total))
        print(f"{a_fb:6.2f} {total:6.2f} {bar}")
    print(f"peak MC_tot={peak[1]:.2f} at alpha_fb={peak[0]}")


if __name__ == "__main__":
    main()
