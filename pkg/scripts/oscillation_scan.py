"""Running-average oscillation of the skew product versus a plain rotation.

    python3 scripts/oscillation_scan.py --n 1000000 10000000 --start 1/3

For each N prints the skew amplitude, the control amplitude and their ratio
over checkpoints past q_5.
"""
from __future__ import annotations

import argparse
from fractions import Fraction

from slitflow.dynamics import SkewState, build_skew, control_trace, iterate, oscillation_stats
from slitflow.flatsurf import make_surface


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[10**5, 10**6, 10**7])
    ap.add_argument("--start", default="1/3")
    ap.add_argument("--sheet", type=int, choices=(0, 1), default=0)
    args = ap.parse_args()
    start = Fraction(args.start)
    X = make_surface()
    print("N,amplitude,control_amplitude,ratio,final_average")
    for n in args.n:
        system = build_skew(X, n)
        tr = iterate(system, SkewState(start, args.sheet), n)
        ctrl = control_trace(system, SkewState(start, 0), n)
        st = oscillation_stats(tr, control=ctrl)
        print(f"{n},{float(st.amplitude):.6f},{float(st.control_amplitude):.3e},"
              f"{st.ratio:.1f},{float(tr.averages[-1]):.6f}")


if __name__ == "__main__":
    main()
