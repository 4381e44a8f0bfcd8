"""Candidate extended Chebyshev spaces and their members.

Every function carries exact derivatives: a :class:`FunctionDescriptor`
wraps a callable ``eval(x, order)`` that must return the ``order``-th
derivative at ``x`` (scalars or numpy arrays). Built-in constructors supply
closed-form derivatives; nothing here differentiates numerically.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, HaarViolation

#: Built-in descriptors are analytic, so their order is effectively unbounded.
ANALYTIC_ORDER = 64
DEFAULT_MAX_N = 12
HAAR_SAMPLES = 257


def max_degree() -> int:
    """Dimension cap ``n`` (space dimension ``n + 1``); env-overridable."""
    raw = os.environ.get("CHEB_BERNSTEIN_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"CHEB_BERNSTEIN_MAX_N must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise DomainError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def grid(self, size: int, interior: bool = False) -> np.ndarray:
        """Uniform grid; with ``interior`` the endpoints are dropped."""
        if interior:
            return np.linspace(self.a, self.b, size + 2)[1:-1]
        return np.linspace(self.a, self.b, size)

    def contains(self, x, slack: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        tol = slack * self.length
        return bool(np.all((x >= self.a - tol) & (x <= self.b + tol)))


@dataclass(frozen=True)
class FunctionDescriptor:
    """A scalar function with access to its derivatives up to ``max_order``."""

    eval: Callable
    max_order: int = ANALYTIC_ORDER
    name: str = "f"

    def __call__(self, x, order: int = 0):
        if order < 0 or order > self.max_order:
            raise IndexError(f"derivative order {order} outside 0..{self.max_order} for {self.name}")
        return self.eval(x, order)

    def __repr__(self):
        return f"FunctionDescriptor({self.name})"


def as_descriptor(f, name: str = "f") -> FunctionDescriptor:
    """Wrap a plain callable ``f(x)`` as a descriptor with order 0 only."""
    if isinstance(f, FunctionDescriptor):
        return f

    def _eval(x, order):
        return f(x)

    return FunctionDescriptor(_eval, 0, name)


def constant(c: float = 1.0) -> FunctionDescriptor:
    def _eval(x, order):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, c if order == 0 else 0.0)[()]

    return FunctionDescriptor(_eval, ANALYTIC_ORDER, f"{c:g}")


def _falling(m: int, k: int) -> int:
    """m (m-1) ... (m-k+1); zero when k > m."""
    return math.perm(m, k) if k <= m else 0


def exp_monomial(m: int, lam: float) -> FunctionDescriptor:
    """``x**m * exp(lam * x)`` with Leibniz-rule derivatives.

    For ``lam == 0`` only the ``i == k`` term survives, so the values coincide
    bit-for-bit with :func:`monomial`.
    """

    def _eval(x, order):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for i in range(min(order, m) + 1):
            lam_pow = lam ** (order - i)
            if lam_pow == 0.0:
                continue
            out = out + math.comb(order, i) * _falling(m, i) * lam_pow * x ** (m - i)
        if lam != 0.0:
            out = out * np.exp(lam * x)
        return out[()]

    if lam == 0.0:
        name = f"x^{m}"
    else:
        name = f"x^{m}*exp({lam:g}x)" if m else f"exp({lam:g}x)"
    return FunctionDescriptor(_eval, ANALYTIC_ORDER, name)


def monomial(m: int) -> FunctionDescriptor:
    return exp_monomial(m, 0.0)


def scaled_monomial(m: int, center: float, half: float) -> FunctionDescriptor:
    """``((x - center) / half) ** m``."""

    def _eval(x, order):
        u = (np.asarray(x, dtype=float) - center) / half
        if order > m:
            return np.zeros_like(u)[()]
        return (_falling(m, order) / half ** order * u ** (m - order))[()]

    return FunctionDescriptor(_eval, ANALYTIC_ORDER, f"((x-{center:g})/{half:g})^{m}")


def power(s: float) -> FunctionDescriptor:
    """``x**s`` for real ``s``; derivatives assume ``x > 0`` unless ``s`` is an integer."""
    if float(s).is_integer() and s >= 0:
        return monomial(int(s))

    def _eval(x, order):
        x = np.asarray(x, dtype=float)
        coeff = 1.0
        for i in range(order):
            coeff *= s - i
        with np.errstate(divide="ignore", invalid="ignore"):
            out = coeff * np.where(x > 0, x ** (s - order), 0.0 if s - order > 0 else np.inf)
        return out[()]

    return FunctionDescriptor(_eval, ANALYTIC_ORDER, f"x^{s:g}")


def _trig_derivative(x, order: int, omega: float, shift: int):
    # d^k/dx^k sin = sin, cos, -sin, -cos for k = 0, 1, 2, 3 (mod 4); cos is sin shifted by 1
    phase = (order + shift) % 4
    wx = omega * np.asarray(x, dtype=float)
    val = np.sin(wx) if phase % 2 == 0 else np.cos(wx)
    sign = -1.0 if phase >= 2 else 1.0
    return (sign * omega ** order * val)[()]


def cosine(omega: float = 1.0) -> FunctionDescriptor:
    return FunctionDescriptor(lambda x, order: _trig_derivative(x, order, omega, 1),
                              ANALYTIC_ORDER, "cos" if omega == 1.0 else f"cos({omega:g}x)")


def sine(omega: float = 1.0) -> FunctionDescriptor:
    return FunctionDescriptor(lambda x, order: _trig_derivative(x, order, omega, 0),
                              ANALYTIC_ORDER, "sin" if omega == 1.0 else f"sin({omega:g}x)")


def linear_combination(coeffs: Sequence[float], funcs: Sequence[FunctionDescriptor],
                       name: str = "combo") -> FunctionDescriptor:
    coeffs = [float(c) for c in coeffs]
    funcs = tuple(funcs)
    if len(coeffs) != len(funcs):
        raise ValueError("coefficient and function counts differ")
    max_order = min((f.max_order for f in funcs), default=ANALYTIC_ORDER)

    def _eval(x, order):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, f in zip(coeffs, funcs):
            if c != 0.0:
                out = out + c * f(x, order)
        return out[()]

    return FunctionDescriptor(_eval, max_order, name)


@dataclass(frozen=True)
class ChebyshevSpace:
    """An ordered basis of ``n + 1`` functions on an interval.

    Linear independence is checked on construction through the Wronskian
    matrix at the midpoint. The ECT property itself is assumed, not proven;
    see :func:`verify_ect_sampled` for a heuristic screen.
    """

    interval: Interval
    basis: tuple
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        n = len(self.basis) - 1
        if n < 0:
            raise DomainError("a space needs at least one basis function")
        if n > max_degree():
            raise DomainError(f"dimension n={n} exceeds the cap {max_degree()} "
                              "(set CHEB_BERNSTEIN_MAX_N to raise it)")
        for h in self.basis:
            if h.max_order < n:
                raise DomainError(f"{h.name} provides derivatives only to order {h.max_order} < n={n}")
        w = self.derivative_matrix(self.interval.midpoint)
        w = w / np.maximum(np.abs(w).max(axis=1, keepdims=True), np.finfo(float).tiny)
        s = np.linalg.svd(w, compute_uv=False)
        if s[-1] <= 1e-12 * s[0]:
            raise DomainError("basis functions are linearly dependent (singular Wronskian at midpoint)")

    @property
    def n(self) -> int:
        return len(self.basis) - 1

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def derivative_matrix(self, x: float, orders=None) -> np.ndarray:
        """Matrix ``W[i, j] = h_j^{(orders[i])}(x)`` (default orders ``0..n``)."""
        if orders is None:
            orders = range(self.n + 1)
        return np.array([[float(h(x, i)) for h in self.basis] for i in orders])

    def values(self, x, order: int = 0) -> np.ndarray:
        """Raw basis sampled at points ``x``: shape ``(len(x), n + 1)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.column_stack([np.broadcast_to(h(x, order), x.shape) for h in self.basis])

    def member(self, coeffs, name: str = "u") -> FunctionDescriptor:
        return linear_combination(coeffs, self.basis, name)


def make_polynomial_space(n: int, interval: Interval, centered: bool = True) -> ChebyshevSpace:
    """Polynomials of degree at most ``n``.

    Spanned by powers of ``(x - midpoint) / half-length`` by default. Raw
    powers of ``x`` on an interval away from the origin give basis
    coordinates that cancel catastrophically (about ``1e6`` for degree 7 on
    ``[2, 2.75]``); the centered powers keep them within ``2**n``.
    """
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    if centered:
        gens = tuple(scaled_monomial(m, interval.midpoint, interval.length / 2) for m in range(n + 1))
    else:
        gens = tuple(monomial(m) for m in range(n + 1))
    return ChebyshevSpace(interval, gens, "polynomial", {"degree": n})


def exponential_basis(lambdas: Sequence[float]) -> tuple:
    """Canonical basis of the exponential polynomials with the given exponents.

    Ordered by sorted distinct exponent, then by ascending power of ``x``.
    """
    lambdas = [float(lam) for lam in lambdas]
    if not lambdas:
        raise DomainError("need at least one exponent")
    out = []
    for lam in sorted(set(lambdas)):
        out.extend(exp_monomial(m, lam) for m in range(lambdas.count(lam)))
    return tuple(out)


def make_exponential_space(lambdas: Sequence[float], interval: Interval) -> ChebyshevSpace:
    lambdas = tuple(float(lam) for lam in lambdas)
    return ChebyshevSpace(interval, exponential_basis(lambdas), "exponential",
                          {"lambdas": lambdas})


def make_trig_space(b: float) -> ChebyshevSpace:
    """``<1, x, cos x, sin x>`` on ``[0, b]``; ECT only for ``0 < b < 2 pi``."""
    if not 0.0 < b < 2.0 * np.pi:
        raise DomainError(f"trigonometric space needs 0 < b < 2*pi, got b={b}")
    return ChebyshevSpace(Interval(0.0, float(b)), (monomial(0), monomial(1), cosine(), sine()),
                          "trig", {"b": float(b)})


@dataclass(frozen=True)
class HaarPair:
    f0: FunctionDescriptor
    f1: FunctionDescriptor
    interval: Interval
    ratio_range: tuple

    def ratio(self, x):
        return self.f1(x) / self.f0(x)


def make_haar_pair(f0: FunctionDescriptor, f1: FunctionDescriptor, interval: Interval,
                   samples: int = HAAR_SAMPLES) -> HaarPair:
    """Validate ``f0 > 0`` and ``f1 / f0`` strictly increasing on a uniform grid."""
    if samples < 2:
        raise ValueError("need at least two validation samples")
    x = interval.grid(samples)
    v0 = np.asarray(f0(x), dtype=float)
    bad = np.flatnonzero(~(v0 > 0))
    if bad.size:
        raise HaarViolation(float(x[bad[0]]), "f0 is not positive")
    r = np.asarray(f1(x), dtype=float) / v0
    bad = np.flatnonzero(~(np.diff(r) > 0))
    if bad.size:
        raise HaarViolation(float(x[bad[0] + 1]), "f1/f0 is not strictly increasing")
    return HaarPair(f0, f1, interval, (float(r[0]), float(r[-1])))


def span_residual(space: ChebyshevSpace, f: FunctionDescriptor, grid: int = 257) -> float:
    """Relative max-norm residual of the least-squares fit of ``f`` by the space."""
    x = space.interval.grid(grid)
    A = space.values(x)
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    col = np.abs(A).max(axis=0)
    col[col == 0] = 1.0
    c, *_ = np.linalg.lstsq(A / col, y, rcond=None)
    scale = max(np.abs(y).max(), np.finfo(float).tiny)
    return float(np.abs(A / col @ c - y).max() / scale)


@dataclass
class EctReport:
    trials: int
    max_sign_changes: int
    witnesses: list

    @property
    def ok(self) -> bool:
        return not self.witnesses


def _sign_changes(values: np.ndarray, rel_tol: float = 1e-12) -> int:
    scale = np.abs(values).max()
    if scale == 0:
        return 0
    s = np.sign(values[np.abs(values) > rel_tol * scale])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def verify_ect_sampled(space: ChebyshevSpace, trials: int = 200, seed: int = 0,
                       grid: int = 2001) -> EctReport:
    """Screen for ECT violations with random members of the space.

    A member with more than ``n`` sign changes on the grid is a witness that
    the space is not Chebyshev. Finding none proves nothing.
    """
    rng = np.random.default_rng(seed)
    A = space.values(space.interval.grid(grid))
    col = np.maximum(np.abs(A).max(axis=0), np.finfo(float).tiny)
    A = A / col
    worst = 0
    witnesses = []
    for _ in range(trials):
        c = rng.standard_normal(space.dimension)
        changes = _sign_changes(A @ c)
        worst = max(worst, changes)
        if changes > space.n:
            witnesses.append(c / col)
    return EctReport(trials, worst, witnesses)
