"""Stage checks across the X_c family.

    python3 scripts/sweep_c.py --to 8 --c 0,1/4,1/2,-1/4

Prints one row per c with the slit-length products and the check outcomes.
"""
from __future__ import annotations

import argparse
from fractions import Fraction

from slitflow.constants import load_constants
from slitflow.witness import StageConfig, check_gap_growth, check_slit_decay, check_thickness, run_stages


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--to", type=int, default=8)
    ap.add_argument("--c", default="0,1/4,1/2", help="comma-separated values in (-1, 1)")
    args = ap.parse_args()
    const = load_constants()
    window = tuple(const["length_product_window"])
    print("c,min_product,max_product,slit_decay,gap_growth,thickness")
    for c in map(Fraction, args.c.split(",")):
        recs = run_stages(1, args.to, StageConfig(c=c, intersections=False))
        prods = [float(r.len_times_a) for r in recs]
        decay = check_slit_decay(recs, window=window).passed
        growth = check_gap_growth(recs, c_bound=const["gap_growth_C_bound"]).passed
        thick = check_thickness(recs, eps_floor=0.5).passed
        print(f"{c},{min(prods):.6f},{max(prods):.6f},{decay},{growth},{thick}")


if __name__ == "__main__":
    main()
