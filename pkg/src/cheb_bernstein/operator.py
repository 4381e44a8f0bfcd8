"""Generalized Bernstein operators fixing a Haar pair.

``B_n f = sum_k f(t_k) alpha_k p_{n,k}``. Given the coordinates ``beta`` of
``f0`` and ``gamma`` of ``f1`` in the Bernstein basis, the operator is forced:
``t_k`` solves ``f1/f0 (t_k) = gamma_k / beta_k`` and ``alpha_k = beta_k / f0(t_k)``.
It exists exactly when every ``beta_k > 0`` and every ratio lies in the image
of ``f1/f0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from .basis import (BernsteinBasis, ElevationPair, build_bernstein_basis, check_nested,
                    elevation_pairs)
from .errors import (DomainError, FixingResidual, InterlacingViolation, Nonexistence,
                     NotInSpan, NotNested, RatioOutOfRange)
from .linalg import solve_lower_triangular
from .spaces import ChebyshevSpace, FunctionDescriptor, HaarPair, span_residual

SPAN_RTOL = 1e-7
FIXING_RTOL = 1e-8
CHECK_GRID = 257
ORDER_RTOL = 1e-10
RANGE_RTOL = 1e-12
BISECT_RTOL = 1e-13

STRICT = "strictly-increasing"
NONDECREASING = "nondecreasing"
NONMONOTONE = "nonmonotone"


@dataclass(frozen=True)
class ExpansionCoeffs:
    beta: np.ndarray
    gamma: np.ndarray


def expand_in_basis(basis: BernsteinBasis, f: FunctionDescriptor, grid: int = CHECK_GRID) -> np.ndarray:
    """Coordinates of ``f`` in the Bernstein basis.

    Matches derivatives ``0..n`` at ``a``; the matrix ``p_{n,k}^{(i)}(a)`` is
    lower triangular because ``p_{n,k}`` vanishes to order ``k`` there.
    """
    n = basis.n
    a = basis.interval.a
    L = np.tril(basis.space.derivative_matrix(a) @ basis.coeffs.T)
    rhs = np.array([float(f(a, i)) for i in range(n + 1)])
    coeffs = solve_lower_triangular(L, rhs)

    x = basis.interval.grid(grid)
    fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    residual = np.abs(basis.values(x) @ coeffs - fx).max()
    scale = max(np.abs(fx).max(), np.finfo(float).tiny)
    if residual > SPAN_RTOL * scale:
        raise NotInSpan(residual / scale)
    return coeffs


def invert_ratio(pair: HaarPair, r: float) -> float:
    """Solve ``f1(t) / f0(t) = r`` for ``t`` in ``[a, b]`` by bisection.

    Targets within ``1e-12`` of the range span outside the image clamp to the
    nearest endpoint; anything further out raises :class:`RatioOutOfRange`.
    """
    lo, hi = pair.ratio_range
    a, b = pair.interval.a, pair.interval.b
    eps = RANGE_RTOL * (hi - lo)
    if not lo - eps <= r <= hi + eps:
        raise RatioOutOfRange(r, lo, hi)
    if r <= lo:
        return a
    if r >= hi:
        return b
    return float(bisect(lambda t: pair.ratio(t) - r, a, b,
                        xtol=BISECT_RTOL * (b - a), rtol=4 * np.finfo(float).eps, maxiter=200))


def classify_nodes(t: np.ndarray, length: float) -> str:
    gaps = np.diff(t)
    tol = ORDER_RTOL * length
    if np.all(gaps > tol):
        return STRICT
    if np.all(gaps >= -tol):
        return NONDECREASING
    return NONMONOTONE


@dataclass(frozen=True)
class BernsteinOperator:
    basis: BernsteinBasis
    nodes: np.ndarray
    weights: np.ndarray
    node_order: str
    pair: HaarPair = field(repr=False)
    expansion: ExpansionCoeffs = field(repr=False)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def interval(self):
        return self.basis.interval

    def __call__(self, f, x):
        return apply_operator(self, f, x)

    def products(self, x) -> np.ndarray:
        """``alpha_k p_{n,k}(x)``: invariant under rescaling the basis."""
        return self.basis.values(x) * self.weights

    def fixing_residuals(self, grid: int = CHECK_GRID) -> tuple:
        """Relative max grid deviations of ``B f0`` from ``f0`` and ``B f1`` from ``f1``."""
        x = self.interval.grid(grid)
        out = []
        for g in (self.pair.f0, self.pair.f1):
            gx = np.asarray(g(x), dtype=float)
            out.append(float(np.abs(apply_operator(self, g, x) - gx).max()
                             / max(np.abs(gx).max(), np.finfo(float).tiny)))
        return tuple(out)

    def check_fixing(self, grid: int = CHECK_GRID):
        for name, res in zip(("f0", "f1"), self.fixing_residuals(grid)):
            if res >= FIXING_RTOL:
                raise FixingResidual(name, res)


def _evaluate_at_nodes(f, nodes: np.ndarray) -> np.ndarray:
    try:
        v = np.asarray(f(nodes), dtype=float)
        if v.shape == nodes.shape:
            return v
    except (TypeError, ValueError):
        pass
    return np.array([float(f(t)) for t in nodes])


def apply_operator(op: BernsteinOperator, f: Callable, x):
    """``B_n f (x)`` for a descriptor or any callable ``f`` defined at the nodes."""
    x = np.asarray(x, dtype=float)
    if not op.interval.contains(x, slack=1e-12):
        raise DomainError(f"evaluation point outside [{op.interval.a}, {op.interval.b}]")
    xs = np.clip(np.atleast_1d(x), op.interval.a, op.interval.b)
    fk = _evaluate_at_nodes(f, op.nodes)
    out = op.products(xs) @ fk
    return out.reshape(x.shape)[()]


def _make_operator(basis, pair, nodes, weights, expansion, grid) -> BernsteinOperator:
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    op = BernsteinOperator(basis, nodes, weights, classify_nodes(nodes, basis.interval.length),
                           pair, expansion)
    op.check_fixing(grid)
    return op


def build_operator(basis: BernsteinBasis, pair: HaarPair, grid: int = CHECK_GRID) -> BernsteinOperator:
    """The unique Bernstein operator on ``basis`` fixing ``pair``.

    Raises
    ------
    Nonexistence
        Some ``beta_k <= 0`` or some ratio ``gamma_k / beta_k`` falls outside
        the image of ``f1 / f0``.
    FixingResidual
        The constructed operator fails to reproduce ``f0`` or ``f1``.
    """
    n = basis.n
    if n < 1:
        raise DomainError("Bernstein operators need n >= 1")
    beta = expand_in_basis(basis, pair.f0, grid)
    gamma = expand_in_basis(basis, pair.f1, grid)
    for k in range(n + 1):
        if not beta[k] > 0:
            raise Nonexistence(k, float(gamma[k] / beta[k]) if beta[k] else float("nan"),
                               f"beta_{k} = {beta[k]:.6g} is not positive")
    ratios = gamma / beta
    nodes = np.empty(n + 1)
    nodes[0], nodes[n] = basis.interval.a, basis.interval.b
    for k in range(1, n):
        try:
            nodes[k] = invert_ratio(pair, ratios[k])
        except RatioOutOfRange:
            raise Nonexistence(k, float(ratios[k]), "ratio outside the image of f1/f0") from None
    weights = beta / np.asarray(pair.f0(nodes), dtype=float)
    return _make_operator(basis, pair, nodes, weights, ExpansionCoeffs(beta, gamma), grid)


def elevate_expansion(lower_coeffs: Sequence[float], pairs: Sequence[ElevationPair]) -> np.ndarray:
    """Coordinates at level ``n + 1`` of a function given at level ``n``."""
    c = np.asarray(lower_coeffs, dtype=float)
    if len(c) != len(pairs) or len(c) == 0:
        raise ValueError(f"{len(c)} coefficients but {len(pairs)} elevation pairs")
    at_a = np.array([p.at_a for p in pairs])
    at_b = np.array([p.at_b for p in pairs])
    out = np.zeros(len(c) + 1)
    out[:-1] += c * at_a
    out[1:] += c * at_b
    return out


@dataclass(frozen=True)
class OperatorChain:
    operators: list
    pair: HaarPair
    elevations: list = field(default_factory=list, repr=False)

    def __getitem__(self, n: int) -> BernsteinOperator:
        """Operator at level ``n`` (levels start at 1)."""
        return self.operators[n - 1]

    @property
    def levels(self) -> range:
        return range(1, len(self.operators) + 1)


def check_interlacing(lower: np.ndarray, upper: np.ndarray, length: float, level: int):
    gap = ORDER_RTOL * length
    for k in range(1, len(lower)):
        if not (lower[k - 1] + gap < upper[k] < lower[k] - gap):
            raise InterlacingViolation(level, k)


def interlacing_matrix(chain: OperatorChain) -> np.ndarray:
    """``M[l, k - 1]``: level ``l + 2`` node ``k`` lies strictly inside the level ``l + 1`` gap.

    Entries with ``k`` beyond the level are ``False`` and meaningless.
    """
    N = len(chain.operators)
    M = np.zeros((max(N - 1, 0), max(N - 1, 0)), dtype=bool)
    gap = ORDER_RTOL * chain.pair.interval.length
    for level in range(2, N + 1):
        lower, upper = chain[level - 1].nodes, chain[level].nodes
        for k in range(1, level):
            M[level - 2, k - 1] = lower[k - 1] + gap < upper[k] < lower[k] - gap
    return M


def build_chain(spaces: Sequence[ChebyshevSpace], pair: HaarPair, grid: int = CHECK_GRID,
                strict: bool = True) -> OperatorChain:
    """Operators ``B_1, ..., B_N`` on nested spaces ``U_1 < ... < U_N``.

    ``B_1`` interpolates at the endpoints; every later level is built
    directly and checked for strict interlacing with its predecessor. With
    ``strict=False`` violations are left for :func:`interlacing_matrix` to
    report.
    """
    spaces = list(spaces)
    if not spaces:
        raise ValueError("empty chain")
    if spaces[0].dimension != 2:
        raise ValueError(f"first space of a chain must be 2-dimensional, got {spaces[0].dimension}")
    for lower, upper in zip(spaces, spaces[1:]):
        if upper.n != lower.n + 1:
            raise NotNested(float("inf"))
        check_nested(lower, upper)
    worst = max(span_residual(spaces[0], g, grid) for g in (pair.f0, pair.f1))
    if worst >= 1e-8:
        raise NotNested(worst)

    basis = build_bernstein_basis(spaces[0])
    iv = basis.interval
    beta = expand_in_basis(basis, pair.f0, grid)
    gamma = expand_in_basis(basis, pair.f1, grid)
    weights = [1.0 / basis.eval(0, iv.a), 1.0 / basis.eval(1, iv.b)]
    ops = [_make_operator(basis, pair, [iv.a, iv.b], weights, ExpansionCoeffs(beta, gamma), grid)]
    elevations = []
    for level, space in enumerate(spaces[1:], start=2):
        upper = build_bernstein_basis(space)
        elevations.append(elevation_pairs(ops[-1].basis, upper))
        op = build_operator(upper, pair, grid)
        if strict:
            check_interlacing(ops[-1].nodes, op.nodes, iv.length, level)
        ops.append(op)
    return OperatorChain(ops, pair, elevations)
