import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman_sf.errors import DomainError
from bergman_sf.interaction import SpaceParams
from bergman_sf.moments import (
    in_Wn,
    pair_cosine_sum,
    power_sums,
    powersum_lower_bound_check,
    sample_Wn_structured,
    thm14_verify,
)
from bergman_sf.norms import CircleConfig

angle_lists = st.lists(st.floats(0, 2 * math.pi, exclude_max=True), min_size=1, max_size=20)


def direct_power_sums(x, M):
    s = np.arange(1, M + 1)
    return np.exp(1j * np.outer(s, x)).sum(axis=1)


# --- power sums ---------------------------------------------------------------

def test_power_sums_triangle():
    p = power_sums(CircleConfig.equidistributed(3), 6)
    assert abs(p[1]) < 1e-15 and abs(p[2]) < 1e-15
    assert p[3] == pytest.approx(3.0, abs=1e-14)
    assert p.M == 6 and p.n == 3


def test_power_sums_single_point():
    p = power_sums(CircleConfig.from_angles([0.0]), 20)
    assert np.allclose(p.values, 1.0, atol=0)


@pytest.mark.parametrize("n", [2, 5, 7, 12])
def test_power_sums_regular_polygon(n):
    p = power_sums(CircleConfig.equidistributed(n), 4 * n)
    for s in range(1, 4 * n + 1):
        want = n if s % n == 0 else 0.0
        assert abs(p[s] - want) <= 1e-12 * n


def test_power_sums_index_range():
    p = power_sums(CircleConfig.equidistributed(3), 4)
    with pytest.raises(IndexError):
        p[0]
    with pytest.raises(IndexError):
        p[5]
    with pytest.raises(DomainError):
        power_sums(CircleConfig.equidistributed(3), 0)


@settings(max_examples=100, deadline=None)
@given(angle_lists)
def test_power_sums_match_direct(angles):
    c = CircleConfig.from_angles(angles)
    got = power_sums(c, 50).values
    assert np.allclose(got, direct_power_sums(c.as_array(), 50), atol=1e-11)
    assert np.all(np.abs(got) <= c.n + 1e-12)


@settings(max_examples=100, deadline=None)
@given(angle_lists)
def test_power_sums_conjugate_under_reflection(angles):
    c = CircleConfig.from_angles(angles)
    r = CircleConfig.from_angles(-np.array(angles))
    assert np.allclose(power_sums(r, 40).values, np.conj(power_sums(c, 40).values), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(angle_lists, st.integers(1, 30))
def test_pair_cosine_identity(angles, m):
    c = CircleConfig.from_angles(angles)
    pm = power_sums(c, m)[m]
    assert pair_cosine_sum(c, m) == pytest.approx(abs(pm) ** 2 - c.n, abs=1e-9)


# --- W_n membership and sampling -------------------------------------------------

def test_in_wn_examples():
    assert in_Wn(CircleConfig.equidistributed(6), 2)
    assert not in_Wn(CircleConfig.from_angles([0.3, 0.3 + math.pi]), 2)
    two_triangles = CircleConfig.from_angles(np.concatenate([
        2 * math.pi * np.arange(3) / 3, 0.4 + 2 * math.pi * np.arange(3) / 3]))
    assert in_Wn(two_triangles, 2)


def test_in_wn_rejects_repeated_points():
    c = CircleConfig.from_angles([0.0, 0.0, 2 * math.pi / 3, 4 * math.pi / 3])
    assert not in_Wn(c, 2)


def test_in_wn_domain():
    with pytest.raises(DomainError):
        in_Wn(CircleConfig.equidistributed(3), 1)


@pytest.mark.parametrize("n, N, q", [(6, 2, 3), (3, 2, 3), (9, 2, 3), (12, 2, 3), (8, 3, 8), (16, 3, 8)])
def test_sampler_structure(n, N, q):
    c = sample_Wn_structured(n, N, seed=1)
    assert c.n == n
    assert in_Wn(c, N)
    # q-fold symmetry: rotating by 2 pi / q maps the set onto itself
    rot = CircleConfig.from_angles(c.as_array() + 2 * math.pi / q)
    assert np.allclose(np.sort(np.exp(1j * rot.as_array()).round(12)),
                       np.sort(np.exp(1j * c.as_array()).round(12)))


@pytest.mark.parametrize("n, N", [(5, 3), (7, 3), (2, 2), (1, 2)])
def test_sampler_no_divisor(n, N):
    with pytest.raises(DomainError):
        sample_Wn_structured(n, N, seed=0)


def test_sampler_deterministic():
    assert sample_Wn_structured(9, 2, 5) == sample_Wn_structured(9, 2, 5)
    assert sample_Wn_structured(9, 2, 5) != sample_Wn_structured(9, 2, 6)


def test_seven_gon_misses_a_constrained_moment():
    # q = 7 < N^2 - 1 for N = 3: the seventh power sum is 7, not 0
    c = CircleConfig.equidistributed(7)
    assert abs(power_sums(c, 7)[7]) == pytest.approx(7.0)
    assert not in_Wn(c, 3)


# --- the moment-constrained comparison ----------------------------------------------

def test_thm14_equidistributed_is_tight():
    p = SpaceParams(2, 3.0)
    for n in (3, 4, 6):
        r = thm14_verify(p, CircleConfig.equidistributed(n))
        assert r.energy == pytest.approx(r.equi_energy, abs=1e-12)
        assert r.holds
        energy, equi, holds = r
        assert holds is True


@pytest.mark.parametrize("N, n", [(2, 6), (2, 9), (2, 12), (3, 8), (3, 16)])
def test_thm14_structured_samples(N, n):
    p = SpaceParams(N, 2 * N - 1.0)
    for seed in range(1000):
        c = sample_Wn_structured(n, N, seed)
        assert np.all(np.abs(power_sums(c, N * N - 2).values) <= 1e-9)
        r = thm14_verify(p, c)
        assert r.holds, (seed, r)
        assert r.moment_residual <= 1e-9


def test_thm14_domain():
    with pytest.raises(DomainError):
        thm14_verify(SpaceParams(2, 3.5), CircleConfig.equidistributed(3))
    with pytest.raises(DomainError):
        thm14_verify(SpaceParams(2, 3.0), CircleConfig.from_angles([0.0, 1.0]))


# --- power-sum lower bound -------------------------------------------------------------

def test_powersum_bound_examples():
    assert powersum_lower_bound_check(CircleConfig.from_angles([1.234]), 2) == (
        pytest.approx(4.0), 2.0, True)
    lhs, rhs, holds = powersum_lower_bound_check(CircleConfig.equidistributed(3), 2)
    assert lhs == pytest.approx(36.0, abs=1e-9) and rhs == 15.0 and holds


def test_powersum_bound_random():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        N = int(rng.integers(1, 4))
        c = CircleConfig.from_angles(rng.uniform(0, 2 * math.pi, n))
        lhs, rhs, holds = powersum_lower_bound_check(c, N)
        assert holds, (n, N, lhs, rhs)


def test_powersum_bound_domain():
    with pytest.raises(DomainError):
        powersum_lower_bound_check(CircleConfig.equidistributed(3), 0)


@pytest.mark.parametrize("N, n", [(2, 6), (2, 9), (3, 16)])
def test_correction_energy_constant_on_wn(N, n):
    from bergman_sf.norms import pair_gaps
    from bergman_sf.sequences import phi_star_decomposition

    corr = phi_star_decomposition(N).correction_coeffs
    m = np.arange(1, corr.size + 1)

    def correction_energy(c):
        g = pair_gaps(c)
        return 2.0 * float(np.sum(np.cos(np.outer(g, m)) @ corr))

    equi = correction_energy(CircleConfig.equidistributed(n))
    assert equi == pytest.approx(-n * corr.sum(), abs=1e-12)
    for seed in range(20):
        got = correction_energy(sample_Wn_structured(n, N, seed))
        assert got == pytest.approx(equi, abs=1e-9)
