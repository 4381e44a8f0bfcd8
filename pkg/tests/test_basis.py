import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from cheb_bernstein import (ChebyshevSpace, DegenerateSpace, Interval, NotECT, NotNested,
                            build_bernstein_basis, elevation_pairs, eval_basis,
                            make_exponential_space, make_polynomial_space, make_trig_space)
from cheb_bernstein.basis import _constraint_matrix, positivity_slack
from cheb_bernstein.spaces import cosine, linear_combination, monomial, sine
from conftest import rounding_bound

# strategies for built-in spaces with n <= 8


@st.composite
def polynomial_spaces(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    a = draw(st.floats(-2, 2))
    w = draw(st.floats(0.25, 4))
    return make_polynomial_space(n, Interval(a, a + w))


@st.composite
def exponential_spaces(draw, max_n=6):
    lams = draw(st.lists(st.integers(-3, 3), min_size=1, max_size=max_n + 1))
    w = draw(st.floats(0.5, 2))
    return make_exponential_space(lams, Interval(0.0, w))


trig_spaces = st.floats(0.2, 6.2).map(make_trig_space)
builtin_spaces = st.one_of(polynomial_spaces(), exponential_spaces(), trig_spaces)


def classical(n, k, x, a=0.0, b=1.0):
    u = (np.asarray(x) - a) / (b - a)
    return (2 * u) ** k * (2 * (1 - u)) ** (n - k)


def test_linear_basis():
    B = build_bernstein_basis(make_polynomial_space(1, Interval(0, 1)))
    x = np.linspace(0, 1, 9)
    np.testing.assert_allclose(B.values(x), np.column_stack([2 * (1 - x), 2 * x]), atol=1e-15)


def test_quadratic_middle():
    B = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    x = np.linspace(0, 1, 9)
    np.testing.assert_allclose(B.eval(1, x), 4 * x * (1 - x), atol=1e-15)


@pytest.mark.parametrize("k, x, expected", [(1, 0.5, 1.0), (0, 1.0, 0.0), (2, 1.0, 4.0)])
def test_eval_basis_examples(k, x, expected):
    B = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    assert eval_basis(B, k, x) == pytest.approx(expected, abs=1e-14)


def test_eval_basis_bounds():
    B = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    with pytest.raises(IndexError):
        eval_basis(B, 3, 0.5)
    with pytest.raises(IndexError):
        eval_basis(B, 0, 0.5, order=3)


@pytest.mark.parametrize("n", range(0, 13))
@pytest.mark.parametrize("interval", [(0.0, 1.0), (-1.0, 3.0)])
def test_classical_closed_form(n, interval):
    a, b = interval
    B = build_bernstein_basis(make_polynomial_space(n, Interval(a, b)))
    x = np.linspace(a, b, 101)
    ref = np.column_stack([classical(n, k, x, a, b) for k in range(n + 1)])
    tol = 1e-11 if n <= 8 else 1e-7
    np.testing.assert_allclose(B.values(x), ref, atol=tol * np.abs(ref).max())


@pytest.mark.parametrize("space", [make_polynomial_space(3, Interval(0, 1)),
                                   make_exponential_space([0, 1, 2], Interval(0, 1)),
                                   make_trig_space(2.0)], ids=["poly", "exp", "trig"])
def test_kernel_matches_scipy(space):
    B = build_bernstein_basis(space)
    for k in range(space.n + 1):
        ref = scipy.linalg.null_space(_constraint_matrix(space, k))
        assert ref.shape[1] == 1
        c = B.coeffs[k] / np.linalg.norm(B.coeffs[k])
        r = ref[:, 0] / np.linalg.norm(ref[:, 0])
        assert abs(abs(c @ r) - 1) < 1e-12


def test_trig_last_is_x_minus_sin():
    b = 2.0
    B = build_bernstein_basis(make_trig_space(b))
    x = np.linspace(0, b, 50)
    ref = (x - np.sin(x)) / (b / 2 - np.sin(b / 2))
    np.testing.assert_allclose(B.eval(3, x), ref, atol=1e-12)


@pytest.mark.parametrize("n", [5, 8])
def test_narrow_interval_far_from_origin(n):
    a, b = 2.0, 2.25
    B = build_bernstein_basis(make_polynomial_space(n, Interval(a, b)))
    x = np.linspace(a, b, 33)
    ref = np.column_stack([classical(n, k, x, a, b) for k in range(n + 1)])
    assert np.all(np.abs(B.values(x) - ref) <= 1e-12 * np.abs(ref).max() + rounding_bound(B, x))


def test_degenerate_space():
    # x^2 and x^3 at n = 2 on [0, 1]: the space <1, x^2, x^3> is not ECT at 0
    sp = ChebyshevSpace(Interval(0, 1), (monomial(0), monomial(2), monomial(3)), "custom")
    with pytest.raises((DegenerateSpace, NotECT)):
        build_bernstein_basis(sp)


def test_sign_change_rejected():
    # <1, cos, sin> on an interval longer than a period: the middle member changes sign
    sp = ChebyshevSpace(Interval(0, 7.0), (monomial(0), cosine(), sine()), "custom")
    with pytest.raises((NotECT, DegenerateSpace)):
        build_bernstein_basis(sp)


def test_large_exponential_degenerates():
    sp = make_exponential_space(list(range(13)), Interval(0, 1))
    with pytest.raises((DegenerateSpace, NotECT)):
        build_bernstein_basis(sp)


def test_coefficients_read_only():
    B = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    with pytest.raises(ValueError):
        B.coeffs[0, 0] = 1.0


# elevation


def test_elevation_classical_linear_to_quadratic():
    lo = build_bernstein_basis(make_polynomial_space(1, Interval(0, 1)))
    hi = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    pairs = elevation_pairs(lo, hi)
    assert pairs[0].at_a == pytest.approx(0.5, abs=1e-14)
    assert pairs[0].at_b == pytest.approx(0.5, abs=1e-14)
    # in the unnormalized (1-x)^2, x(1-x) basis the same identity has coefficients 2 and 2
    assert 4 * pairs[0].at_a == pytest.approx(2.0)


@pytest.mark.parametrize("n", range(1, 8))
def test_elevation_classical_all_half(n):
    lo = build_bernstein_basis(make_polynomial_space(n, Interval(0, 1)))
    hi = build_bernstein_basis(make_polynomial_space(n + 1, Interval(0, 1)))
    for p in elevation_pairs(lo, hi):
        assert p.at_a == pytest.approx(0.5, abs=1e-10)
        assert p.at_b == pytest.approx(0.5, abs=1e-10)


def _lstsq_pairs(lo, hi, grid=257):
    x = lo.interval.grid(grid)
    P, Q = lo.values(x), hi.values(x)
    return [np.linalg.lstsq(Q[:, [k, k + 1]], P[:, k], rcond=None)[0] for k in range(lo.n + 1)]


@pytest.mark.parametrize("lower, upper", [
    (make_exponential_space([0, 1], Interval(0, 1)), make_exponential_space([0, 1, 2], Interval(0, 1))),
    (make_exponential_space([0, 1, 2], Interval(0, 1)), make_exponential_space([0, 1, 2, 2], Interval(0, 1))),
    (make_polynomial_space(3, Interval(-1, 2)), make_polynomial_space(4, Interval(-1, 2))),
])
def test_elevation_matches_least_squares(lower, upper):
    lo, hi = build_bernstein_basis(lower), build_bernstein_basis(upper)
    pairs = elevation_pairs(lo, hi)
    for p, ref in zip(pairs, _lstsq_pairs(lo, hi)):
        assert p.at_a > 0 and p.at_b > 0
        np.testing.assert_allclose([p.at_a, p.at_b], ref, rtol=1e-9)
    x = lo.interval.grid(257)
    P, Q = lo.values(x), hi.values(x)
    for k, p in enumerate(pairs):
        assert np.abs(P[:, k] - p.at_a * Q[:, k] - p.at_b * Q[:, k + 1]).max() < 1e-9


def test_elevation_requires_nesting():
    lo = build_bernstein_basis(make_exponential_space([0, 1], Interval(0, 1)))
    hi = build_bernstein_basis(make_polynomial_space(2, Interval(0, 1)))
    with pytest.raises(NotNested):
        elevation_pairs(lo, hi)


# properties over built-in spaces


@given(builtin_spaces)
def test_exact_zero_orders(space):
    B = build_bernstein_basis(space)
    n = space.n
    for k in range(n + 1):
        for x, order in ((space.interval.a, k), (space.interval.b, n - k)):
            W = space.derivative_matrix(x)
            d = W @ B.coeffs[k]
            scale = np.abs(W) @ np.abs(B.coeffs[k])
            top = scale[:order + 1].max()
            assert np.all(np.abs(d[:order]) < 1e-9 * top)
            assert abs(d[order]) > 1e3 * np.finfo(float).eps * scale[order]


@given(builtin_spaces)
def test_positive_and_normalized(space):
    B = build_bernstein_basis(space)
    iv = space.interval
    # rounding in the raw-basis sum bounds how close to 1 the midpoint value can be
    h = space.values(iv.midpoint)[0]
    for c in B.coeffs:
        assert abs(h @ c - 1.0) <= max(1e-12, 64 * np.finfo(float).eps * (np.abs(h) @ np.abs(c)))
    x = iv.grid(513, interior=True)
    H = space.values(x)
    for k in range(space.n + 1):
        v = H @ B.coeffs[k]
        assert np.all(v >= -positivity_slack(H, B.coeffs[k], v))


@given(builtin_spaces, st.data())
def test_unique_under_raw_rescale(space, data):
    scales = data.draw(st.lists(st.floats(0.1, 10) | st.floats(-10, -0.1),
                                min_size=space.dimension, max_size=space.dimension))
    raw = tuple(linear_combination([s], [h], h.name) for s, h in zip(scales, space.basis))
    scaled = ChebyshevSpace(space.interval, raw, space.kind, space.params)
    x = space.interval.grid(65)
    ref = build_bernstein_basis(space).values(x)
    np.testing.assert_allclose(build_bernstein_basis(scaled).values(x), ref,
                               atol=1e-10 * max(1.0, np.abs(ref).max()))


@given(st.floats(0.2, 6.2))
def test_trig_reflection_symmetry(b):
    B = build_bernstein_basis(make_trig_space(b))
    x = np.linspace(0, b, 65)
    np.testing.assert_allclose(B.values(b - x), B.values(x)[:, ::-1], atol=1e-10)


@given(st.integers(1, 7), st.floats(-2, 2), st.floats(0.25, 4))
def test_polynomial_reflection_symmetry(n, a, w):
    B = build_bernstein_basis(make_polynomial_space(n, Interval(a, a + w)))
    x = np.linspace(a, a + w, 33)
    xr = 2 * a + w - x
    err = np.abs(B.values(xr) - B.values(x)[:, ::-1])
    assert np.all(err <= 1e-10 * np.abs(B.values(x)).max() + rounding_bound(B, x) + rounding_bound(B, xr)[:, ::-1])
