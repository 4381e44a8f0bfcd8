"""Explicit reference operators, written independently of the general solver.

* The operator on polynomials of degree ``n`` over ``[0, 1]`` fixing ``1`` and
  ``x**j``: binomial basis, unit weights, nodes ``gamma_k ** (1/j)``.
* The space ``<1, x, cos x, sin x>`` on ``[0, b]`` with the pair ``(1, x)``:
  explicit basis, nodes and weights as functions of ``b``, and the critical
  length ``rho0`` beyond which no operator exists.

These serve as oracles for the general pipeline, so none of the kernel or
triangular solves from :mod:`cheb_bernstein.basis` are used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .basis import BernsteinBasis
from .errors import DomainError
from .operator import BernsteinOperator, ExpansionCoeffs, classify_nodes
from .spaces import (FunctionDescriptor, Interval, constant, make_haar_pair, make_polynomial_space,
                     monomial)


def power_gamma(n: int, j: int) -> np.ndarray:
    """Binomial-basis coordinates of ``x**j`` among polynomials of degree ``n``."""
    return np.array([math.perm(k, j) / math.perm(n, j) if k >= j else 0.0 for k in range(n + 1)])


def binomial_basis_coeffs(n: int) -> np.ndarray:
    """Monomial coefficients of ``C(n,k) x^k (1-x)^(n-k)``, row ``k``."""
    C = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        for m in range(k, n + 1):
            C[k, m] = math.comb(n, k) * math.comb(n - k, m - k) * (-1) ** (m - k)
    return C


def power_fixing_operator(n: int, j: int) -> BernsteinOperator:
    """Operator on ``[0, 1]`` fixing ``1`` and ``x**j``.

    Weights are all one in the binomial normalization; the first ``j`` nodes
    coincide at zero.
    """
    if not (isinstance(n, int) and isinstance(j, int)) or not 1 <= j <= n:
        raise DomainError(f"need integers 1 <= j <= n, got n={n}, j={j}")
    interval = Interval(0.0, 1.0)
    coeffs = binomial_basis_coeffs(n)
    coeffs.setflags(write=False)
    basis = BernsteinBasis(make_polynomial_space(n, interval, centered=False), coeffs, "binomial")
    gamma = power_gamma(n, j)
    nodes = gamma ** (1.0 / j)
    weights = np.ones(n + 1)
    pair = make_haar_pair(constant(1.0), monomial(j), interval)
    return BernsteinOperator(basis, nodes, weights, classify_nodes(nodes, 1.0), pair,
                             ExpansionCoeffs(np.ones(n + 1), gamma))


def _rho_function(b):
    return math.sin(b) - b * math.cos(b)


def rho0() -> float:
    """First positive root of ``sin b - b cos b`` (about 4.4934)."""
    return brentq(_rho_function, math.pi, 1.5 * math.pi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


STRICT_INCREASING = "strict-increasing"
COALESCED = "coalesced"
REVERSED = "reversed"
NONEXISTENT = "nonexistent"


@dataclass(frozen=True)
class TrigCaseResult:
    b: float
    exists: bool
    nodes: Optional[np.ndarray]
    weights: Optional[np.ndarray]
    regime: str
    t1: float
    t2: float


def _check_b(b: float):
    if not 0.0 < b < 2.0 * math.pi:
        raise DomainError(f"need 0 < b < 2*pi, got {b}")


def trig_nodes(b: float) -> tuple:
    """``(t1, t2)``; ``t2`` is negative past the critical length."""
    _check_b(b)
    t1 = (b - math.sin(b)) / (1.0 - math.cos(b))
    return t1, b - t1


def trig_weights(b: float) -> np.ndarray:
    """Weights in the unnormalized basis of :func:`trig_basis_closed` (equal to the ``beta_k``)."""
    _check_b(b)
    end = 1.0 / (b - math.sin(b))
    inner = -((1.0 - math.cos(b)) / (b - math.sin(b))) / (b * math.sin(b) - 2.0 + 2.0 * math.cos(b))
    return np.array([end, inner, inner, end])


def trig_case(b: float, coalesce_rtol: float = 1e-10) -> TrigCaseResult:
    t1, t2 = trig_nodes(b)
    if -1e-12 * b <= t2 < 0:
        # b at the critical length up to rounding: the node sits on the endpoint
        t1, t2 = b, 0.0
    if t2 < 0:
        return TrigCaseResult(b, False, None, None, NONEXISTENT, t1, t2)
    if abs(t1 - t2) <= coalesce_rtol * b:
        regime = COALESCED
    elif t1 < t2:
        regime = STRICT_INCREASING
    else:
        regime = REVERSED
    return TrigCaseResult(b, True, np.array([0.0, t1, t2, b]), trig_weights(b), regime, t1, t2)


def _x_minus_sin(x, order: int):
    x = np.asarray(x, dtype=float)
    # derivatives of sin cycle sin, cos, -sin, -cos
    sin_k = [np.sin(x), np.cos(x), -np.sin(x), -np.cos(x)][order % 4]
    base = x if order == 0 else (np.ones_like(x) if order == 1 else np.zeros_like(x))
    return (base - sin_k)[()]


def _one_minus_cos(x, order: int):
    x = np.asarray(x, dtype=float)
    cos_k = [np.cos(x), -np.sin(x), -np.cos(x), np.sin(x)][order % 4]
    base = np.ones_like(x) if order == 0 else np.zeros_like(x)
    return (base - cos_k)[()]


def _reflect(f: FunctionDescriptor, b: float, name: str) -> FunctionDescriptor:
    return FunctionDescriptor(lambda x, order: (-1) ** order * f(b - np.asarray(x, dtype=float), order),
                              f.max_order, name)


def trig_basis_closed(b: float) -> tuple:
    """``(p30, p31, p32, p33)``: the explicit non-negative Bernstein basis on ``[0, b]``."""
    _check_b(b)
    sb, cb = math.sin(b), math.cos(b)
    p33 = FunctionDescriptor(_x_minus_sin, name="p33")
    p32 = FunctionDescriptor(
        lambda x, order: (b - sb) * _one_minus_cos(x, order) - (1.0 - cb) * _x_minus_sin(x, order),
        name="p32")
    return (_reflect(p33, b, "p30"), _reflect(p32, b, "p31"), p32, p33)


def trig_operator_apply(b: float, f, x):
    """Apply the closed-form operator fixing ``(1, x)``; ``b`` must be at most ``rho0``."""
    case = trig_case(b)
    if not case.exists:
        raise DomainError(f"no Bernstein operator fixing (1, x) for b={b}")
    x = np.asarray(x, dtype=float)
    basis = trig_basis_closed(b)
    fk = [float(f(t)) for t in case.nodes]
    return sum(fk[k] * case.weights[k] * basis[k](x) for k in range(4))


@dataclass(frozen=True)
class TrigCounterexample:
    b: float
    t1: float
    t2: float
    endpoint_value: float
    second_derivative_at_0: float
    verdict: str
    kernel_verdict: str


def trig_counterexample(b: float, grid: int = 129) -> TrigCounterexample:
    """Convex ``f = (x - t1)(x - t2)`` whose image is not convex when ``pi < b <= rho0``.

    The image is ``beta_0 f(0) F`` with ``F = p30 + p33``, whose second
    derivative at zero is ``sin b < 0``. ``verdict`` classifies the image,
    ``kernel_verdict`` classifies ``F``; they differ only at ``b = rho0``,
    where ``f(0) = 0`` and the image vanishes identically.
    """
    from .convexity import is_convex_sampled, standard_pair

    r0 = rho0()
    if not math.pi < b <= r0 * (1 + 1e-12):
        raise DomainError(f"counterexample needs pi < b <= rho0 = {r0:.6f}, got {b}")
    case = trig_case(b)
    t1, t2 = case.t1, case.t2
    p30, _, _, p33 = trig_basis_closed(b)
    F2 = float(p30(0.0, 2) + p33(0.0, 2))

    def f(x):
        return (np.asarray(x, dtype=float) - t1) * (np.asarray(x, dtype=float) - t2)

    pair = standard_pair(0.0, b)
    image = is_convex_sampled(pair, lambda x: trig_operator_apply(b, f, x), grid)
    kernel = is_convex_sampled(pair, lambda x: p30(x) + p33(x), grid)
    return TrigCounterexample(b, t1, t2, float(f(0.0)), F2, image.verdict, kernel.verdict)
