"""At b = pi the trigonometric operator has coalesced nodes t1 = t2 = pi/2.

Compares its approximation error on [0, pi] with the classical cubic
operator for a few functions. Demonstration only; no claims are checked.
"""

import math

import numpy as np

from cheb_bernstein import (Interval, apply_operator, build_bernstein_basis, build_operator,
                            constant, make_haar_pair, make_polynomial_space, make_trig_space,
                            monomial)

FUNCTIONS = {
    "|x - pi/2|": lambda x: np.abs(np.asarray(x) - math.pi / 2),
    "sin x": np.sin,
    "x^2": lambda x: np.asarray(x) ** 2,
    "e^(-x)": lambda x: np.exp(-np.asarray(x)),
}


def main():
    iv = Interval(0.0, math.pi)
    pair = make_haar_pair(constant(1.0), monomial(1), iv)
    trig = build_operator(build_bernstein_basis(make_trig_space(math.pi)), pair)
    poly = build_operator(build_bernstein_basis(make_polynomial_space(3, iv)), pair)
    x = iv.grid(1001)
    print(f"trig nodes: {np.round(trig.nodes, 12)}")
    print(f"poly nodes: {np.round(poly.nodes, 12)}")
    print(f"{'function':12s} {'trig error':>12s} {'cubic error':>12s}")
    for name, f in FUNCTIONS.items():
        et = np.abs(apply_operator(trig, f, x) - f(x)).max()
        ep = np.abs(apply_operator(poly, f, x) - f(x)).max()
        print(f"{name:12s} {et:12.4e} {ep:12.4e}")


if __name__ == "__main__":
    main()
