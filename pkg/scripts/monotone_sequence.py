"""Watch B_n f decrease towards f for convex f along nested chains.

For each chain and test function, records the sup-norm gap ||B_n f - f||
and the smallest value of B_n f - B_{n+1} f over a grid.
"""

import argparse
from pathlib import Path

import numpy as np

from cheb_bernstein import (Interval, apply_operator, build_chain, constant, exp_monomial,
                            make_exponential_space, make_haar_pair, make_polynomial_space,
                            monomial)

UNIT = Interval(0.0, 1.0)

FUNCTIONS = {
    "x^2": lambda x: np.asarray(x) ** 2,
    "e^2x": lambda x: np.exp(2 * np.asarray(x)),
    "|x-1/2|": lambda x: np.abs(np.asarray(x) - 0.5),
}


def chains(top):
    yield "polynomial", build_chain([make_polynomial_space(n, UNIT) for n in range(1, top + 1)],
                                    make_haar_pair(constant(1.0), monomial(1), UNIT))
    lams = list(range(top + 1))
    yield "exponential", build_chain([make_exponential_space(lams[:n + 1], UNIT) for n in range(1, top + 1)],
                                     make_haar_pair(constant(1.0), exp_monomial(0, 1.0), UNIT))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--top", type=int, default=8)
    parser.add_argument("--grid", type=int, default=257)
    parser.add_argument("--out", default="results/monotone_sequence.csv")
    args = parser.parse_args()

    x = UNIT.grid(args.grid)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("chain,function,n,sup_gap,min_step\n")
        for cname, chain in chains(args.top):
            for fname, f in FUNCTIONS.items():
                images = [apply_operator(chain[n], f, x) for n in chain.levels]
                for i, n in enumerate(chain.levels):
                    gap = float(np.abs(images[i] - f(x)).max())
                    step = float((images[i] - images[i + 1]).min()) if i + 1 < len(images) else float("nan")
                    fh.write(f"{cname},{fname},{n},{gap:.17g},{step:.17g}\n")
                gaps = [float(np.abs(B - f(x)).max()) for B in images]
                print(f"{cname:12s} {fname:8s} sup gap n=1: {gaps[0]:.3e}  n={args.top}: {gaps[-1]:.3e}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
