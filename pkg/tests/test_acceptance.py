"""The twelve acceptance criteria, one test each.

The conftest prints a PASS/FAIL line per criterion at the end of the run.
Runtime limits are measured after a one-off warm-up of the compiled kernels.
"""
import math
import time

import numpy as np
import pytest

from bergman_sf import _kernels
from bergman_sf.interaction import (
    SpaceParams,
    cached_series,
    phi_quadrature,
    phi_series,
    stationarity_n2a3,
)
from bergman_sf.moments import powersum_lower_bound_check, sample_Wn_structured, thm14_verify
from bergman_sf.norms import (
    CircleConfig,
    asymptotic_limit_constant,
    config_energy_interaction,
    config_norm_sq_powersum,
    psi_norm_sq,
)
from bergman_sf.optimize import brent_root, energy_gradient, npoint_minimize, two_point_minimize
from bergman_sf.sequences import (
    RealSequencePrefix,
    convexify,
    fejer_identity_check,
    phi_star_decomposition,
    thm14_coefficients,
    threshold_check,
    threshold_quantity,
)

SQ3 = math.sqrt(3.0)
LN2 = math.log(2.0)
LN3 = math.log(3.0)
P23 = SpaceParams(2, 3.0)

EXACT = {
    0.0: 6.0,
    math.pi: 96 * LN2 - 66,
    math.pi / 2: -30 + 12 * math.pi - 12 * LN2,
    math.pi / 3: -12 + 2 * math.pi * SQ3,
    2 * math.pi / 3: -48 + 7 * math.pi * SQ3 + 9 * LN3,
    math.pi / 6: (-48 + 18 * (1 + SQ3) + (15 - 12 * SQ3) * math.log(2 - SQ3)
                  - 2.5 * math.pi * (3 * SQ3 - 4)),
}


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    # compile the numba kernels once so runtime limits measure the numerics
    _kernels.trig_sum(np.ones(4), 0, np.array([0.5]), np.array([4], dtype=np.int64))
    _kernels.power_sums(np.array([0.0, 1.0]), 4)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def phi(t):
    return phi_series(cached_series(P23), t).value


def big_phi(t):
    return 2.0 * (2.0 * phi(t) + phi(2.0 * t))


def random_config(rng, n):
    while True:
        x = rng.uniform(0.0, 2 * math.pi, n)
        c = CircleConfig.from_angles(x)
        if n == 1 or np.diff(np.append(c.as_array(), c.angles[0] + 2 * math.pi)).min() > 1e-6:
            return c


def test_criterion_01_closed_form_values():
    for t, exact in EXACT.items():
        with Timer() as ts:
            s = phi(t)
        with Timer() as tq:
            q = phi_quadrature(P23, t).value
        assert abs(s - exact) <= 1e-8, (t, s, exact)
        assert abs(q - exact) <= 1e-6, (t, q, exact)
        assert ts.elapsed <= 1.0 and tq.elapsed <= 1.0


def test_criterion_02_counterexample_minimizer():
    with Timer() as tm:
        root = brent_root(stationarity_n2a3, 0.5, 1.5)
        value = phi(root)
    assert abs(root - 0.9198) <= 2e-3
    assert abs(value - (-1.14963)) <= 5e-4
    assert tm.elapsed <= 5.0


def test_criterion_03_counterexample_orderings():
    e = EXACT
    assert phi(math.pi / 2) < phi(math.pi)
    a, b, c = big_phi(math.pi / 6), big_phi(math.pi / 3), big_phi(2 * math.pi / 3)
    assert a < b < c
    exact_big = {
        "pi/6": 2 * (2 * e[math.pi / 6] + e[math.pi / 3]),
        "pi/3": 2 * (2 * e[math.pi / 3] + e[2 * math.pi / 3]),
        "2pi/3": 6 * e[2 * math.pi / 3],
    }
    assert abs((phi(math.pi) - phi(math.pi / 2)) - (e[math.pi] - e[math.pi / 2])) <= 1e-6
    assert abs((b - a) - (exact_big["pi/3"] - exact_big["pi/6"])) <= 1e-6
    assert abs((c - b) - (exact_big["2pi/3"] - exact_big["pi/3"])) <= 1e-6
    gap = phi(2 * math.pi / 3) - phi(math.pi / 3)
    assert abs(gap - (-36 + 5 * math.pi * SQ3 + 9 * LN3)) <= 1e-6
    assert gap == pytest.approx(1.094, abs=1e-3)


def test_criterion_04_oracle_equivalence():
    # (N=3, alpha=3) lies outside the space (alpha must exceed 2(N-1)), so it is skipped
    combos = [(N, a) for N in (2, 3) for a in (3.0, 4.5, 5.0) if a > 2 * (N - 1)]
    rng = np.random.default_rng(20240)
    worst = 0.0
    with Timer() as tm:
        for i in range(100):
            p = SpaceParams(*combos[i % len(combos)])
            c = random_config(rng, int(rng.integers(1, 9)))
            a = config_norm_sq_powersum(p, c).value
            phi0 = float(cached_series(p).evaluate([0.0])[0][0])
            b = c.n * phi0 + config_energy_interaction(p, c).value
            worst = max(worst, abs(a - b) / a)
    assert worst <= 1e-8, worst
    assert tm.elapsed <= 60.0


def test_criterion_05_asymptotics():
    lim = asymptotic_limit_constant(P23)
    assert lim == pytest.approx(4 * math.pi ** 2, rel=1e-14)
    v = {n: psi_norm_sq(P23, n).value for n in (200, 1000, 2000)}
    assert abs(v[1000] - lim) / lim <= 0.05
    assert abs(v[2000] - lim) < abs(v[200] - lim)
    # frozen from an independent 30-digit mpmath summation
    assert v[200] == pytest.approx(38.907856487939937, rel=1e-12)
    assert v[1000] == pytest.approx(39.363279352853226, rel=1e-12)
    assert v[2000] == pytest.approx(39.420783744032690, rel=1e-12)
    assert abs(psi_norm_sq(P23, 1).value - 6.0) <= 1e-9


def test_criterion_06_threshold():
    for N in range(2, 7):
        assert threshold_check(N) == N * N - 1
        assert abs(threshold_quantity(N, N * N)[N * N - 1] - 1.0) <= 1e-12
    h = threshold_quantity(2, 100)
    for m in range(101):
        assert abs(h[m] - (8 * m + 6) / ((m + 2) * (m + 3))) <= 1e-12


def test_criterion_07_convexification():
    seq = thm14_coefficients(2, 5000)
    r = convexify(seq)
    assert r.N0 == 3
    assert np.allclose(r.modified, (1.0, 0.9, 0.8), atol=1e-15, rtol=0)
    full = r.full(seq)
    a = seq.values
    assert np.all(RealSequencePrefix(full).delta2() >= -1e-15)
    assert np.all(np.diff(full) < 0)
    assert np.all(full > 0)
    assert full[0] == a[0]
    assert np.array_equal(full[r.N0:], a[r.N0:])


def test_criterion_08_moment_constrained_sampling():
    p = P23
    with Timer() as tm:
        for n in (6, 9):
            for seed in range(1000):
                energy, equi, holds = thm14_verify(p, sample_Wn_structured(n, 2, seed))
                assert energy >= equi - 1e-9, (n, seed, energy, equi)
                assert holds
    assert tm.elapsed <= 180.0


def test_criterion_09_powersum_inequality():
    rng = np.random.default_rng(909)
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        N = int(rng.integers(1, 4))
        c = CircleConfig.from_angles(rng.uniform(0.0, 2 * math.pi, n))
        violations += not powersum_lower_bound_check(c, N)[2]
    assert violations == 0
    lhs, rhs, holds = powersum_lower_bound_check(CircleConfig.equidistributed(3), 2)
    assert (round(lhs, 9), rhs, holds) == (36.0, 15.0, True)


def test_criterion_10_optimizer_quality():
    multi = npoint_minimize(P23, 2)
    brent = two_point_minimize(P23)
    assert abs(multi.energy - brent.energy) <= 1e-6
    rng = np.random.default_rng(1010)
    h = 1e-5
    for _ in range(50):
        n = int(rng.integers(2, 7))
        while True:
            c = random_config(rng, n)
            if np.diff(np.append(c.as_array(), c.angles[0] + 2 * math.pi)).min() > 1e-2:
                break
        g = np.array(energy_gradient(P23, c))
        x = c.as_array()
        fd = np.empty(n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            hi = config_energy_interaction(P23, CircleConfig.from_angles(x + e)).value
            lo = config_energy_interaction(P23, CircleConfig.from_angles(x - e)).value
            fd[j] = (hi - lo) / (2 * h)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(fd)


def _random_convex(rng, M=4000):
    m = np.arange(M + 1, dtype=float)
    kind = rng.integers(3)
    if kind == 0:
        return RealSequencePrefix(rng.uniform(0.2, 0.95) ** m)
    if kind == 1:
        return RealSequencePrefix((m + 1.0) ** -rng.uniform(0.5, 3.0))
    return RealSequencePrefix(rng.uniform(0.5, 2.0) * (m + 1.0) ** -2
                              + rng.uniform(0.0, 1.0) * (1.0 - m / M) + 1e-300)


def test_criterion_11_bari_fejer():
    rng = np.random.default_rng(1111)
    for _ in range(20):
        seq = _random_convex(rng)
        for t in rng.uniform(0.05, 2 * math.pi - 0.05, 20):
            r = fejer_identity_check(seq, t, seq.M)
            assert abs(r.lhs - r.rhs) <= r.bound
    geo = RealSequencePrefix(0.5 ** np.arange(81))
    for t, want in ((math.pi, 1 / 6), (math.pi / 2, 0.3)):
        r = fejer_identity_check(geo, t, 80)
        assert abs(r.lhs - want) <= 1e-8 and abs(r.rhs - want) <= 1e-8


def test_criterion_12_decomposition():
    d = phi_star_decomposition(2)
    t = np.random.default_rng(1212).uniform(0.0, 2 * math.pi, 100)
    v, _ = d.reconstruct(t)
    s, _ = cached_series(P23).evaluate(t)
    assert np.max(np.abs(v - s)) <= 1e-6
