import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_sf.errors import DomainError, InsufficientDataError
from bergman_sf.interaction import SpaceParams, cached_series
from bergman_sf.sequences import (
    RealSequencePrefix,
    bari_positivity_check,
    convexify,
    fejer_identity_check,
    fejer_kernel,
    phi_star_decomposition,
    thm14_coefficients,
    thm14_exact,
    thm14_partial_fractions,
    threshold_check,
    threshold_quantity,
)

LN2 = math.log(2.0)


def geometric(r, M):
    return RealSequencePrefix(r ** np.arange(M + 1))


def random_convex(rng, M=4000):
    """Positive, decreasing, convex null sequence from nonnegative second differences."""
    kind = rng.integers(3)
    m = np.arange(M + 1, dtype=float)
    if kind == 0:
        return RealSequencePrefix(rng.uniform(0.2, 0.95) ** m)
    if kind == 1:
        return RealSequencePrefix((m + 1.0) ** -rng.uniform(0.5, 3.0))
    # mixture of a convex power and a line that hits zero at M (still convex)
    a = rng.uniform(0.5, 2.0) * (m + 1.0) ** -2 + rng.uniform(0, 1) * (1 - m / M) + 1e-300
    return RealSequencePrefix(a)


# --- coefficient sequence ----------------------------------------------------

@pytest.mark.parametrize("m, want", [(0, 1.0), (1, 1.0), (2, 5 / 6), (3, 0.7)])
def test_thm14_examples(m, want):
    assert thm14_coefficients(2, 10).values[m] == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_thm14_matches_exact_rationals(N):
    seq = thm14_coefficients(N, 300)
    exact = np.array([float(thm14_exact(N, m)) for m in range(301)])
    assert np.allclose(seq.values, exact, rtol=1e-13, atol=0)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_thm14_partial_fractions_exact(N):
    pf = thm14_partial_fractions(N)
    for m in range(N, 40):
        assert sum(A / (m + j) for j, A in pf) == thm14_exact(N, m)


def test_thm14_range_and_limit():
    a = thm14_coefficients(3, 100_000).values
    assert np.all(a > 0) and np.all(a <= 1)
    assert a[-1] < 1e-3


def test_thm14_domain():
    with pytest.raises(DomainError):
        thm14_coefficients(2, 1)


def test_thm14_generator_extends():
    s = thm14_coefficients(2, 10).extend(50)
    assert s.M == 50
    assert s.values[50] == pytest.approx(float(thm14_exact(2, 50)), rel=1e-14)


# --- threshold ---------------------------------------------------------------

@pytest.mark.parametrize("N", range(2, 7))
def test_threshold(N):
    assert threshold_check(N) == N * N - 1
    h = threshold_quantity(N, N * N)
    assert abs(h[N * N - 1] - 1.0) <= 1e-12


def test_threshold_n2_closed_form():
    h = threshold_quantity(2, 100)
    for m in range(2, 101):
        assert h[m] == pytest.approx((8 * m + 6) / ((m + 2) * (m + 3)), abs=1e-12)


def test_threshold_domain():
    with pytest.raises(DomainError):
        threshold_check(1)


# --- differences ---------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=40), st.data())
def test_delta2_linear(a, data):
    b = data.draw(st.lists(st.integers(-1000, 1000), min_size=len(a), max_size=len(a)))
    sa, sb = RealSequencePrefix(a), RealSequencePrefix(b)
    sab = RealSequencePrefix(np.add(a, b))
    assert np.array_equal(sab.delta2(), sa.delta2() + sb.delta2())
    assert np.array_equal(sab.delta(), sa.delta() + sb.delta())


def test_prefix_validation():
    with pytest.raises(DomainError):
        RealSequencePrefix([])
    with pytest.raises(DomainError):
        RealSequencePrefix([1.0, math.nan])
    with pytest.raises(InsufficientDataError):
        RealSequencePrefix([1.0, 0.5]).extend(5)


# --- convexification -----------------------------------------------------------

def test_convexify_n2():
    seq = thm14_coefficients(2, 2000)
    r = convexify(seq)
    assert r.N0 == 3
    assert r.original_tail_start == 3
    assert r.modified == pytest.approx((1.0, 0.9, 0.8), abs=1e-15)
    full = r.full(seq)
    assert full[:5] == pytest.approx([1.0, 0.9, 0.8, 0.7, 0.6], abs=1e-15)
    d2 = RealSequencePrefix(full).delta2()
    assert np.all(np.abs(d2[0:3]) <= 1e-15)
    assert d2[3] == pytest.approx(0.7 - 1.2 + 22 / 42, abs=1e-15)


@pytest.mark.parametrize("N", [2, 3, 4, 5, 8])
def test_convexify_five_clauses(N):
    seq = thm14_coefficients(N, 20 * N * N)
    r = convexify(seq)
    full = r.full(seq)
    a = seq.values
    assert np.all(full > 0)
    assert np.all(np.diff(full) < 0)
    assert np.all(RealSequencePrefix(full).delta2() >= -1e-15)
    assert full[0] == a[0]
    assert np.array_equal(full[r.N0:], a[r.N0:])
    assert r.N0 == N * N - 1


@pytest.mark.parametrize("values", [
    1.0 / (np.arange(200) + 1.0),
    0.5 ** np.arange(200),
])
def test_convexify_already_convex(values):
    seq = RealSequencePrefix(values)
    r = convexify(seq)
    assert r.N0 == 1
    assert np.array_equal(r.full(seq), seq.values)


def test_convexify_errors():
    with pytest.raises(InsufficientDataError):
        convexify(RealSequencePrefix([1.0, 0.5, 0.2]))
    with pytest.raises(DomainError):
        convexify(RealSequencePrefix([1.0, 0.5, 0.6, 0.1, 0.05]))
    with pytest.raises(DomainError):
        convexify(RealSequencePrefix([1.0, 0.5, 0.0, -0.1, -0.2]))


# --- Fejer identity and Bari positivity ------------------------------------------

def test_fejer_kernel_matches_cesaro_mean():
    t = np.linspace(0.1, 6.0, 17)
    for n in (1, 2, 7):
        direct = 1 + 2 * sum((1 - k / n) * np.cos(k * t) for k in range(1, n))
        assert np.allclose(fejer_kernel(n, t), direct, atol=1e-13)


@pytest.mark.parametrize("theta, want", [(math.pi, 1 / 6), (math.pi / 2, 0.3)])
def test_fejer_geometric_closed_form(theta, want):
    r = fejer_identity_check(geometric(0.5, 80), theta, 80)
    assert r.lhs == pytest.approx(want, abs=1e-8)
    assert r.rhs == pytest.approx(want, abs=1e-8)


def test_fejer_identity_random():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        seq = random_convex(rng)
        for theta in rng.uniform(0.05, 2 * math.pi - 0.05, 20):
            r = fejer_identity_check(seq, theta, seq.M)
            assert abs(r.lhs - r.rhs) <= r.bound
            assert r.rhs >= 0.0


def test_fejer_domain():
    with pytest.raises(DomainError):
        fejer_identity_check(geometric(0.5, 10), 0.0, 10)
    with pytest.raises(DomainError):
        fejer_identity_check(geometric(0.5, 10), 1.0, 11)


def test_bari_convexified_n2():
    seq = thm14_coefficients(2, 20000)
    full = RealSequencePrefix(convexify(seq).full(seq))
    assert bari_positivity_check(full, 10_000) >= -1e-8


def test_bari_geometric():
    assert bari_positivity_check(geometric(0.5, 100), 1000) >= 1 / 6 - 1e-12


def test_bari_non_convex_is_diagnostic():
    v = bari_positivity_check(RealSequencePrefix([1.0, 0.9, 0.9, 0.0, 0.0]), 1000)
    assert v < 0


# --- decomposition at the critical exponent ------------------------------------------

def test_decomposition_n2_corrections():
    d = phi_star_decomposition(2)
    assert d.correction_coeffs.size == 2
    assert d.correction_coeffs == pytest.approx([0.1, 1 / 120], abs=1e-15)


@pytest.mark.parametrize("N", [2, 3])
def test_decomposition_correction_count(N):
    assert phi_star_decomposition(N).correction_coeffs.size == N * N - 2


@pytest.mark.parametrize("theta, want", [
    (math.pi, 96 * LN2 - 66),
    (math.pi / 2, -30 + 12 * math.pi - 12 * LN2),
])
def test_decomposition_closed_values(theta, want):
    v, e = phi_star_decomposition(2).reconstruct(theta)
    assert abs(v[0] - want) <= max(e[0], 1e-8)


@pytest.mark.parametrize("N", [2, 3])
def test_decomposition_matches_series(N):
    p = SpaceParams(N, 2 * N - 1.0)
    t = np.random.default_rng(N).uniform(0.01, 2 * math.pi - 0.01, 100)
    v, e = phi_star_decomposition(N).reconstruct(t)
    s, se = cached_series(p).evaluate(t)
    assert np.all(np.abs(v - s) <= 1e-6)


def test_decomposition_domain():
    with pytest.raises(DomainError):
        phi_star_decomposition(1)


def test_exact_rational_type():
    assert thm14_exact(2, 2) == Fraction(5, 6)
