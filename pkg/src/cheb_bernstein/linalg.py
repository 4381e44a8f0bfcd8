"""Small dense solves: null space by full-pivot elimination, triangular solves.

The endpoint systems built from raw bases such as monomials are badly
conditioned (Pascal-like derivative rows), while their float entries are
often exact. Elimination therefore runs in rational arithmetic on the float
inputs: the result is the exact kernel of the matrix actually supplied,
rounded once at the end. Sizes are capped at 13 x 13, so the cost is
negligible.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

PIVOT_RTOL = 1e-10


def _to_fractions(A):
    return [[Fraction(float(v)) for v in row] for row in np.atleast_2d(A)]


def row_echelon_full_pivot(A, rtol: float = PIVOT_RTOL):
    """Reduce ``A`` with complete pivoting, exactly.

    Returns ``(R, cols, rank)``: ``R`` is the reduced matrix (list of rows of
    :class:`~fractions.Fraction`) with columns permuted by ``cols``, so
    ``R[:][j]`` belongs to ``A[:, cols[j]]``. Elimination stops once the best
    remaining pivot is at most ``rtol`` times the first one.
    """
    R = _to_fractions(A)
    m = len(R)
    n = len(R[0]) if m else 0
    cols = list(range(n))
    rank = 0
    first = None
    for i in range(min(m, n)):
        p, q, best = i, i, Fraction(0)
        for r in range(i, m):
            for c in range(i, n):
                if abs(R[r][c]) > best:
                    p, q, best = r, c, abs(R[r][c])
        if first is None:
            first = best
        if best == 0 or best <= rtol * first:
            break
        R[i], R[p] = R[p], R[i]
        for row in R:
            row[i], row[q] = row[q], row[i]
        cols[i], cols[q] = cols[q], cols[i]
        piv = R[i][i]
        for r in range(i + 1, m):
            f = R[r][i] / piv
            if f:
                R[r] = [R[r][c] - f * R[i][c] if c >= i else R[r][c] for c in range(n)]
            R[r][i] = Fraction(0)
        rank += 1
    return R, cols, rank


def null_space(A, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Kernel basis of ``A`` (columns), each scaled to unit max-norm.

    Every free column left after elimination gives one kernel vector by
    back substitution through the triangular pivot block.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if m == 0:
        return np.eye(n)
    R, cols, rank = row_echelon_full_pivot(A, rtol)
    kernel = np.zeros((n, n - rank))
    for j in range(n - rank):
        v = [Fraction(0)] * n
        v[rank + j] = Fraction(1)
        for i in range(rank - 1, -1, -1):
            s = -R[i][rank + j] - sum((R[i][c] * v[c] for c in range(i + 1, rank)), Fraction(0))
            v[i] = s / R[i][i]
        out = np.empty(n)
        out[cols] = [float(x) for x in v]
        kernel[:, j] = out / np.abs(out).max()
    return kernel


def solve_lower_triangular(L, rhs) -> np.ndarray:
    """Forward substitution for lower-triangular ``L`` (exact on float inputs)."""
    Lf = _to_fractions(L)
    b = [Fraction(float(v)) for v in np.asarray(rhs, dtype=float).ravel()]
    n = len(b)
    x = [Fraction(0)] * n
    for i in range(n):
        if Lf[i][i] == 0:
            raise ZeroDivisionError(f"zero diagonal entry at row {i}")
        s = b[i] - sum((Lf[i][j] * x[j] for j in range(i)), Fraction(0))
        x[i] = s / Lf[i][i]
    return np.array([float(v) for v in x])
