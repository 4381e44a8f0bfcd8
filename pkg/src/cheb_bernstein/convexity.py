"""Sampled shape checks: generalized convexity, g-monotonicity, total positivity.

Nothing here is symbolic. Every verdict comes from determinants over finite
point sets, judged against a tolerance relative to the size of the entries
involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .basis import elevation_pairs
from .errors import (HypothesisViolation, MismatchedLevels, NonPositiveG, SingularSystem)
from .operator import (NONMONOTONE, ORDER_RTOL, BernsteinOperator, apply_operator,
                       invert_ratio)
from .spaces import (FunctionDescriptor, HaarPair, Interval, constant, linear_combination,
                     make_haar_pair, monomial)

DET_RTOL = 1e-10
TRIPLE_CAP = 100_000
DEFAULT_GRID = 65


def _values(f, x: np.ndarray) -> np.ndarray:
    try:
        v = np.asarray(f(x), dtype=float)
        if v.shape == x.shape:
            return v
    except (TypeError, ValueError):
        pass
    return np.array([float(f(t)) for t in x])


def _det3_rows(F0, F1, F, i, j, k):
    """Determinants of ``[[F0], [F1], [F]]`` restricted to columns ``i, j, k``."""
    a0, a1, a2 = F0[i], F0[j], F0[k]
    b0, b1, b2 = F1[i], F1[j], F1[k]
    c0, c1, c2 = F[i], F[j], F[k]
    det = (a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0))
    scale = (np.maximum(np.maximum(np.abs(a0), np.abs(a1)), np.abs(a2))
             * np.maximum(np.maximum(np.abs(b0), np.abs(b1)), np.abs(b2))
             * np.maximum(np.maximum(np.abs(c0), np.abs(c1)), np.abs(c2)))
    return det, scale


def det3(pair: HaarPair, f: Callable, x0: float, x1: float, x2: float) -> float:
    """The 3x3 determinant of ``f0, f1, f`` at three increasing points."""
    if not x0 < x1 < x2:
        raise ValueError(f"points must be strictly increasing, got {x0}, {x1}, {x2}")
    x = np.array([x0, x1, x2], dtype=float)
    det, _ = _det3_rows(_values(pair.f0, x), _values(pair.f1, x), _values(f, x), 0, 1, 2)
    return float(det)


@dataclass
class ConvexityReport:
    verdict: str
    min_det: float
    max_det: float
    witness: Optional[tuple]
    triples_checked: int

    @property
    def convex(self) -> bool:
        return self.verdict in ("convex", "affine")

    @property
    def concave(self) -> bool:
        return self.verdict in ("concave", "affine")


def grid_triples(size: int, cap: int = TRIPLE_CAP, seed: int = 0):
    """Index arrays ``(i, j, k)``, ``i < j < k``, over ``range(size)``.

    All triples when there are at most ``cap`` of them, otherwise a seeded
    uniform subsample of ``cap`` triples.
    """
    total = size * (size - 1) * (size - 2) // 6
    if total <= cap:
        idx = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(size), 3)),
                          dtype=np.int64, count=3 * total).reshape(-1, 3)
    else:
        rng = np.random.default_rng(seed)
        chunks, have = [], 0
        while have < cap:
            draw = np.sort(rng.integers(0, size, (2 * cap, 3)), axis=1)
            draw = draw[(draw[:, 0] < draw[:, 1]) & (draw[:, 1] < draw[:, 2])]
            chunks.append(draw)
            have += len(draw)
        idx = np.concatenate(chunks)[:cap]
    return idx[:, 0], idx[:, 1], idx[:, 2]


def classify(rel: np.ndarray, tol: float = DET_RTOL) -> str:
    convex = rel.min() >= -tol
    concave = rel.max() <= tol
    if convex and concave:
        return "affine"
    if convex:
        return "convex"
    if concave:
        return "concave"
    return "neither"


def is_convex_sampled(pair: HaarPair, f: Callable, grid_size: int = DEFAULT_GRID,
                      cap: int = TRIPLE_CAP, seed: int = 0, tol: float = DET_RTOL) -> ConvexityReport:
    """Classify ``f`` as (f0, f1)-convex, concave, affine or neither on a uniform grid."""
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    x = pair.interval.grid(grid_size)
    F0, F1, F = _values(pair.f0, x), _values(pair.f1, x), _values(f, x)
    i, j, k = grid_triples(grid_size, cap, seed)
    det, scale = _det3_rows(F0, F1, F, i, j, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, det / np.where(scale > 0, scale, 1.0), 0.0)
    verdict = classify(rel, tol)
    worst = int(np.argmin(rel))
    witness = None
    if rel[worst] < -tol:
        witness = (float(x[i[worst]]), float(x[j[worst]]), float(x[k[worst]]))
    return ConvexityReport(verdict, float(det.min()), float(det.max()), witness, int(det.size))


def chord_interpolant(pair: HaarPair, f: Callable, x0: float, x2: float) -> FunctionDescriptor:
    """The member of ``<f0, f1>`` interpolating ``f`` at ``x0 < x2``."""
    if not x0 < x2:
        raise ValueError("need x0 < x2")
    A = np.array([[float(pair.f0(x0)), float(pair.f1(x0))],
                  [float(pair.f0(x2)), float(pair.f1(x2))]])
    d = np.linalg.det(A)
    if abs(d) <= 1e-14 * np.abs(A).max() ** 2:
        raise SingularSystem(f"chord system at ({x0}, {x2}) is singular")
    c = np.linalg.solve(A, [float(f(x0)), float(f(x2))])
    return linear_combination(c, (pair.f0, pair.f1), name="chord")


def bepa_transform(pair: HaarPair, f: Callable) -> Callable:
    """``u -> (f / f0)(t(u))`` where ``t`` inverts ``f1 / f0``.

    ``f`` is (f0, f1)-convex exactly when this is convex in the usual sense
    on ``ratio_range``.
    """

    def transformed(u):
        u = np.asarray(u, dtype=float)
        t = np.array([invert_ratio(pair, v) for v in np.atleast_1d(u)])
        out = _values(f, t) / _values(pair.f0, t)
        return out.reshape(u.shape)[()]

    return transformed


def standard_pair(lo: float, hi: float) -> HaarPair:
    """The pair ``(1, u)`` on ``[lo, hi]``: ordinary convexity."""
    return make_haar_pair(constant(1.0), monomial(1), Interval(lo, hi))


def bepa_verdict(pair: HaarPair, f: Callable, grid_size: int = DEFAULT_GRID, **kw) -> ConvexityReport:
    """Ordinary-convexity verdict of :func:`bepa_transform` on a uniform grid in ``u``."""
    lo, hi = pair.ratio_range
    return is_convex_sampled(standard_pair(lo, hi), bepa_transform(pair, f), grid_size, **kw)


@dataclass
class GridComparison:
    """``B f`` against ``f`` on a grid."""

    x: np.ndarray
    f: np.ndarray
    Bf: np.ndarray

    @property
    def diff(self) -> np.ndarray:
        return self.Bf - self.f

    @property
    def min_diff(self) -> float:
        return float(self.diff.min())

    @property
    def max_diff(self) -> float:
        return float(self.diff.max())

    @property
    def argmin(self) -> float:
        return float(self.x[np.argmin(self.diff)])


def verify_majorization(op: BernsteinOperator, f: Callable, grid: int = 257) -> GridComparison:
    """Sample ``B_n f - f``; non-negative for (f0, f1)-convex ``f``."""
    x = op.interval.grid(grid)
    return GridComparison(x, _values(f, x), apply_operator(op, f, x))


@dataclass
class AramaDecomposition:
    g_values: np.ndarray
    residual: float
    scale: float

    @property
    def relative_residual(self) -> float:
        return self.residual / self.scale


def _strictly_interlaced(lower, upper, length) -> bool:
    gap = ORDER_RTOL * length
    return all(lower[k - 1] + gap < upper[k] < lower[k] - gap for k in range(1, len(lower)))


def arama_decomposition(op_n: BernsteinOperator, op_n1: BernsteinOperator, f: Callable,
                        grid: int = 257) -> AramaDecomposition:
    """Write ``B_n f - B_{n+1} f`` as ``sum_{k=1}^n G_k(f) p_{n+1,k}``.

    ``G_k`` is the three-point functional on ``t_{n,k-1} < t_{n+1,k} < t_{n,k}``
    with elevation-pair coefficients; it vanishes on ``<f0, f1>`` and is
    non-negative on (f0, f1)-convex functions.
    """
    n = op_n.n
    if op_n1.n != n + 1 or op_n.interval != op_n1.interval:
        raise MismatchedLevels(f"levels {n} and {op_n1.n} are not consecutive on one interval")
    if not _strictly_interlaced(op_n.nodes, op_n1.nodes, op_n.interval.length):
        raise MismatchedLevels("nodes of consecutive levels do not strictly interlace")
    pairs = elevation_pairs(op_n.basis, op_n1.basis)
    fn = _values(f, np.asarray(op_n.nodes))
    fn1 = _values(f, np.asarray(op_n1.nodes))
    an, an1 = op_n.weights, op_n1.weights
    g = np.array([fn[k] * an[k] * pairs[k].at_a
                  - fn1[k] * an1[k]
                  + fn[k - 1] * an[k - 1] * pairs[k - 1].at_b
                  for k in range(1, n + 1)])
    x = op_n.interval.grid(grid)
    lhs = apply_operator(op_n, f, x) - apply_operator(op_n1, f, x)
    rhs = op_n1.basis.values(x)[:, 1:n + 1] @ g
    scale = max(np.abs(_values(f, x)).max(), np.finfo(float).tiny)
    return AramaDecomposition(g, float(np.abs(lhs - rhs).max()), float(scale))


def verify_convexity_preservation(op: BernsteinOperator, pair: HaarPair, f: Callable,
                                  grid: int = DEFAULT_GRID, force: bool = False,
                                  **kw) -> ConvexityReport:
    """Convexity verdict for ``B_n f``.

    Convexity is only guaranteed for non-decreasing nodes; with ``force`` the
    check runs anyway, which is how counterexamples are exhibited.
    """
    if op.node_order == NONMONOTONE and not force:
        raise HypothesisViolation("nodes are not non-decreasing; pass force=True to run anyway")
    return is_convex_sampled(pair, lambda x: apply_operator(op, f, x), grid, **kw)


def is_g_monotone_sampled(g: Callable, f: Callable, interval: Interval, grid: int = 257,
                          tol: float = DET_RTOL) -> str:
    """``'g-increasing'``, ``'g-decreasing'``, ``'g-constant'`` or ``'neither'``."""
    x = interval.grid(grid)
    G = _values(g, x)
    bad = np.flatnonzero(~(G > 0))
    if bad.size:
        raise NonPositiveG(float(x[bad[0]]))
    F = _values(f, x)
    i, j = np.triu_indices(grid, 1)
    det = G[i] * F[j] - G[j] * F[i]
    scale = np.abs(G[i] * F[j]) + np.abs(G[j] * F[i])
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, det / np.where(scale > 0, scale, 1.0), 0.0)
    up = rel.min() >= -tol
    down = rel.max() <= tol
    if up and down:
        return "g-constant"
    if up:
        return "g-increasing"
    if down:
        return "g-decreasing"
    return "neither"


@dataclass
class SignConsistencyReport:
    order: int
    trials: int
    min_det: float
    min_relative: float
    witness: Optional[tuple]
    samples: list = field(default_factory=list, repr=False)


def sign_consistency_sampled(basis, order: int, trials: int = 1000, seed: int = 0,
                             record: bool = False) -> SignConsistencyReport:
    """Random ``order x order`` minors of the kernel ``K(x, k) = p_{n,k}(x)``.

    Points are drawn uniformly from the open interval and sorted; indices are
    sorted distinct draws from ``0..n``. ``min_relative`` divides each minor
    by the product of its rows' max-norms. With ``record`` every trial is
    kept as ``(points, indices, det, relative)``.
    """
    if not 1 <= order <= basis.n + 1:
        raise ValueError(f"order must be in 1..{basis.n + 1}")
    rng = np.random.default_rng(seed)
    a, b = basis.interval.a, basis.interval.b
    min_det = np.inf
    min_rel = np.inf
    witness = None
    samples = []
    for _ in range(trials):
        xs = np.sort(rng.uniform(a, b, order))
        if np.any(np.diff(xs) <= 0) or xs[0] <= a:
            continue
        ks = np.sort(rng.choice(basis.n + 1, order, replace=False))
        K = basis.values(xs)[:, ks]
        det = np.linalg.det(K)
        scale = np.prod(np.abs(K).max(axis=1))
        rel = det / scale if scale > 0 else 0.0
        min_det = min(min_det, det)
        point = (tuple(xs.tolist()), tuple(int(k) for k in ks))
        if record:
            samples.append((*point, float(det), float(rel)))
        if rel < min_rel:
            min_rel = rel
            witness = point
    return SignConsistencyReport(order, trials, float(min_det), float(min_rel), witness, samples)
