"""Sweep the length b of [0, b] for <1, x, cos x, sin x> with the pair (1, x).

Writes one row per b: closed-form nodes and regime next to the general
pipeline's verdict, and prints where the regime changes.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from cheb_bernstein import (Interval, Nonexistence, build_bernstein_basis, build_operator,
                            constant, make_haar_pair, make_trig_space, monomial, rho0, trig_case)


def scan(bs):
    rows = []
    for b in bs:
        case = trig_case(b)
        try:
            op = build_operator(build_bernstein_basis(make_trig_space(b)),
                                make_haar_pair(constant(1.0), monomial(1), Interval(0.0, b)))
            diff = float(np.abs(op.nodes - case.nodes).max()) if case.exists else float("nan")
            built = True
        except Nonexistence:
            built, diff = False, float("nan")
        rows.append((b, case.regime, case.t1, case.t2, built, diff))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=400)
    parser.add_argument("--out", default="results/trig_scan.csv")
    args = parser.parse_args()

    bs = np.linspace(0.0, 2 * math.pi, args.points + 2)[1:-1]
    rows = scan(bs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("b,regime,t1,t2,pipeline_exists,pipeline_node_diff\n")
        for b, regime, t1, t2, built, diff in rows:
            fh.write(f"{b:.17g},{regime},{t1:.17g},{t2:.17g},{str(built).lower()},{diff:.17g}\n")

    print(f"rho0 = {rho0():.12f}")
    for prev, cur in zip(rows, rows[1:]):
        if prev[1] != cur[1]:
            print(f"regime {prev[1]} -> {cur[1]} between b = {prev[0]:.4f} and {cur[0]:.4f}")
    agree = all(r[4] == (r[1] != "nonexistent") for r in rows)
    worst = np.nanmax([r[5] for r in rows])
    print(f"pipeline agrees on existence: {agree}; worst node difference {worst:.2e}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
