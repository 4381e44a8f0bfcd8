"""Non-negative Bernstein bases of extended Chebyshev spaces and degree elevation.

``p_{n,k}`` is the member of the space with a zero of exact order ``k`` at
``a`` and exact order ``n - k`` at ``b``. It is found as the one-dimensional
kernel of the endpoint derivative conditions, then normalized so that
``p_{n,k}((a + b) / 2) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpace, NonPositiveElevation, NotECT, NotNested
from .linalg import null_space
from .spaces import ChebyshevSpace, FunctionDescriptor, span_residual

ZERO_RTOL = 1e-9
NONZERO_ULPS = 1e3
POSITIVITY_RTOL = 1e-12
VALIDATION_GRID = 513
NESTING_RTOL = 1e-8
POW2_CLAMP = 256


@dataclass(frozen=True)
class BernsteinBasis:
    """Row ``k`` of ``coeffs`` holds the raw-basis coordinates of ``p_{n,k}``."""

    space: ChebyshevSpace
    coeffs: np.ndarray
    normalization: str = "midpoint-one"

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def interval(self):
        return self.space.interval

    def values(self, x, order: int = 0) -> np.ndarray:
        """``P[i, k] = p_{n,k}^{(order)}(x_i)``."""
        return self.space.values(x, order) @ self.coeffs.T

    def eval(self, k: int, x, order: int = 0):
        return eval_basis(self, k, x, order)

    def function(self, k: int) -> FunctionDescriptor:
        return self.space.member(self.coeffs[k], name=f"p_{self.n},{k}")

    def endpoint_derivatives(self, k: int, at: str) -> np.ndarray:
        """Derivatives of orders ``0..n`` of ``p_{n,k}`` at ``a`` or ``b``."""
        x = self.interval.a if at == "a" else self.interval.b
        return self.space.derivative_matrix(x) @ self.coeffs[k]


def eval_basis(basis: BernsteinBasis, k: int, x, order: int = 0):
    n = basis.n
    if not 0 <= k <= n:
        raise IndexError(f"basis index {k} outside 0..{n}")
    if not 0 <= order <= n:
        raise IndexError(f"derivative order {order} outside 0..{n}")
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c, h in zip(basis.coeffs[k], basis.space.basis):
        out = out + c * h(x, order)
    return out[()]


def _pow2_scale(M: np.ndarray, axis: int) -> np.ndarray:
    """Binary exponents of the max-norms along ``axis``; scaling by them is exact."""
    if M.size == 0:
        return np.zeros(M.shape[1 - axis], dtype=int)
    _, exp = np.frexp(np.abs(M).max(axis=axis))
    # clamp so that columns of (near-)underflowed entries cannot overflow the rescaled kernel
    return np.clip(exp, -POW2_CLAMP, POW2_CLAMP)


def _constraint_matrix(space: ChebyshevSpace, k: int) -> np.ndarray:
    n = space.n
    iv = space.interval
    rows = []
    if k:
        rows.append(space.derivative_matrix(iv.a, range(k)))
    if n - k:
        rows.append(space.derivative_matrix(iv.b, range(n - k)))
    if not rows:
        return np.zeros((0, n + 1))
    M = np.vstack(rows)
    return np.ldexp(M, -_pow2_scale(M, axis=1)[:, None])


def check_exact_orders(space: ChebyshevSpace, c: np.ndarray, k: int):
    """Raise :class:`NotECT` unless ``u = sum c_j h_j`` has exact orders ``k`` at a and ``n-k`` at b.

    Each derivative is judged against its own row scale ``sum_j |c_j h_j^{(i)}|``,
    the magnitude that rounding in the sum is proportional to. Vanishing means
    below ``ZERO_RTOL`` of that scale; the leading derivative must clear the
    rounding level by ``NONZERO_ULPS`` ulps. A fixed relative threshold fails
    here: monomials on a short interval far from the origin cancel by many
    orders of magnitude while the derivative is still far from noise.
    """
    n = space.n
    iv = space.interval
    for x, order in ((iv.a, k), (iv.b, n - k)):
        W = space.derivative_matrix(x, range(order + 1))
        d = W @ c
        row_scale = np.abs(W) @ np.abs(c)
        if order and np.any(np.abs(d[:order]) >= ZERO_RTOL * np.maximum(row_scale[:order], row_scale.max())):
            raise NotECT(k, x, "lower-order derivative does not vanish")
        if not abs(d[order]) > NONZERO_ULPS * np.finfo(float).eps * row_scale[order]:
            raise NotECT(k, x, f"zero of order higher than {order}")


def positivity_slack(H: np.ndarray, c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """How negative ``v = H @ c`` may be before it counts as a sign change.

    The larger of ``1e-12 * max|v|`` and a rounding bound for the raw-basis
    sum; near a high-order endpoint zero the true values sit far below the
    rounding noise of the expansion.
    """
    rounding = 32 * np.finfo(float).eps * (np.abs(H) @ np.abs(c))
    return np.maximum(POSITIVITY_RTOL * np.abs(v).max(), rounding)


def build_bernstein_basis(space: ChebyshevSpace, grid: int = VALIDATION_GRID) -> BernsteinBasis:
    """Construct the midpoint-normalized non-negative Bernstein basis.

    Raises
    ------
    DegenerateSpace
        The endpoint conditions for some ``k`` do not determine a unique
        function up to scale.
    NotECT
        A candidate changes sign inside the interval or has a zero of the
        wrong order at an endpoint.
    """
    n = space.n
    iv = space.interval
    x = iv.grid(grid, interior=True)
    H = space.values(x)
    hmid = space.derivative_matrix(iv.midpoint, [0])[0]
    coeffs = np.empty((n + 1, n + 1))
    for k in range(n + 1):
        M = _constraint_matrix(space, k)
        col = _pow2_scale(M, axis=0)
        K = null_space(np.ldexp(M, -col))
        if K.shape[1] != 1:
            raise DegenerateSpace(k, n + 1 - K.shape[1])
        c = np.ldexp(K[:, 0], -col)
        mid = hmid @ c
        if mid == 0.0:
            raise NotECT(k, iv.midpoint, "vanishes at the midpoint")
        c = c / mid
        v = H @ c
        bad = np.flatnonzero(v < -positivity_slack(H, c, v))
        if bad.size:
            raise NotECT(k, float(x[bad[0]]), "changes sign in the interior")
        check_exact_orders(space, c, k)
        coeffs[k] = c
    coeffs.setflags(write=False)
    return BernsteinBasis(space, coeffs)


@dataclass(frozen=True)
class ElevationPair:
    """``p_{n,k} = at_a * p_{n+1,k} + at_b * p_{n+1,k+1}``."""

    at_a: float
    at_b: float


def check_nested(lower: ChebyshevSpace, upper: ChebyshevSpace, rtol: float = NESTING_RTOL):
    if lower.interval != upper.interval:
        raise NotNested(float("inf"))
    worst = max(span_residual(upper, h) for h in lower.basis)
    if worst >= rtol:
        raise NotNested(worst)


def elevation_pairs(lower: BernsteinBasis, upper: BernsteinBasis) -> list:
    """Degree-elevation coefficients of each ``p_{n,k}`` in the ``n + 1`` basis.

    Ratios of the leading endpoint derivatives; all strictly positive for
    non-negative bases.
    """
    n = lower.n
    if upper.n != n + 1:
        raise NotNested(float("inf"))
    check_nested(lower.space, upper.space)
    pairs = []
    for k in range(n + 1):
        at_a = lower.endpoint_derivatives(k, "a")[k] / upper.endpoint_derivatives(k, "a")[k]
        at_b = (lower.endpoint_derivatives(k, "b")[n - k]
                / upper.endpoint_derivatives(k + 1, "b")[n - k])
        pair = ElevationPair(float(at_a), float(at_b))
        if not (pair.at_a > 0 and pair.at_b > 0):
            raise NonPositiveElevation(k, pair)
        pairs.append(pair)
    return pairs
