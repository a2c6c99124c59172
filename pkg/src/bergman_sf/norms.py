"""Squared norms in A^2_alpha of sums of degree-N single-pole fractions.

Two independent formulas for a pole configuration on the circle:

* pair energies:  ||f||^2 = n phi(0) + sum_{j != k} phi(t_j - t_k);
* power sums:     ||f||^2 = sum_{m >= N} b_m |p_m|^2, p_m = sum_k e^{i m t_k},
  with b_m assembled from monomial norms ||z^s||^2 and falling factorials.

For the equidistributed configuration only every n-th power sum survives,
and the remaining one-dimensional sum is closed with Euler-Maclaurin.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import digamma, polygamma

from . import _kernels
from .errors import DomainError, NonConvergenceError
from .interaction import (
    COEFF_CAP,
    SpaceParams,
    ValueWithError,
    cached_series,
    coefficients,
)
from .special import bernoulli_even, log_gamma_ratio, log_gamma_ratio_scaled, zeta_real
from .tails import tail_sum

__all__ = [
    "CircleConfig",
    "monomial_norm_sq",
    "psi_norm_sq",
    "config_norm_sq_powersum",
    "config_energy_interaction",
    "pair_gaps",
    "asymptotic_limit_constant",
    "scaled_norm_sequence",
]

TWO_PI = 2.0 * math.pi
_EPS = np.finfo(float).eps
_OSC_REACH = 64.0


@dataclass(frozen=True)
class CircleConfig:
    """Sorted pole angles in [0, 2pi)."""

    angles: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.angles)
        if not a:
            raise DomainError("a configuration needs at least one pole")
        if not all(math.isfinite(x) and 0.0 <= x < TWO_PI for x in a):
            raise DomainError("angles must be finite and lie in [0, 2pi)")
        if any(a[i] > a[i + 1] for i in range(len(a) - 1)):
            raise DomainError("angles must be sorted")
        object.__setattr__(self, "angles", a)

    @property
    def n(self) -> int:
        return len(self.angles)

    def as_array(self) -> np.ndarray:
        return np.array(self.angles)

    @classmethod
    def from_angles(cls, angles) -> "CircleConfig":
        """Reduce mod 2pi and sort."""
        a = np.mod(np.asarray(angles, dtype=float).ravel(), TWO_PI)
        a = np.where(a >= TWO_PI, 0.0, a)
        return cls(tuple(np.sort(a)))

    @classmethod
    def equidistributed(cls, n: int, offset: float = 0.0) -> "CircleConfig":
        if n < 1:
            raise DomainError("n must be positive")
        return cls.from_angles(offset + TWO_PI * np.arange(n) / n)


def pair_gaps(c: CircleConfig) -> np.ndarray:
    """t_k - t_j mod 2pi for all j < k."""
    x = c.as_array()
    j, k = np.triu_indices(c.n, 1)
    return np.mod(x[k] - x[j], TWO_PI)


def monomial_norm_sq(p: SpaceParams, s):
    """||z^s||^2 = Gamma(alpha+2) Gamma(s+1) / Gamma(s+alpha+2) (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("monomial degree must be nonnegative")
    out = np.exp(math.lgamma(p.alpha + 2.0) + log_gamma_ratio(s_arr, 1.0, p.alpha + 2.0))
    return out if np.ndim(out) else float(out)


def _powersum_weights(p: SpaceParams, m: np.ndarray) -> np.ndarray:
    # ((m-1)_{N-1})^2 / ((N-1)!)^2 * ||z^{m-N}||^2, zero for m < N
    m = np.asarray(m, dtype=float)
    out = np.zeros_like(m)
    live = m >= p.N
    ml = m[live]
    ff = np.ones_like(ml)
    for j in range(1, p.N):
        ff *= (ml - j) / j
    out[live] = ff * ff * monomial_norm_sq(p, ml - p.N)
    return out


# ---------------------------------------------------------------------------
# equidistributed configuration
# ---------------------------------------------------------------------------

def _log_b_taylor(p: SpaceParams, y: float, order: int) -> np.ndarray:
    # lambda_i with log b(y + h) = log b(y) + sum_{i>=1} lambda_i h^i
    lam = np.zeros(order + 1)
    x1 = y - p.N + 1.0
    x2 = y - p.N + p.alpha + 2.0
    for i in range(1, order + 1):
        acc = 0.0
        for j in range(1, p.N):
            acc += 2.0 * (-1.0) ** (i + 1) / (i * (y - j) ** i)
        if i == 1:
            acc += digamma(x1) - digamma(x2)
        else:
            acc += (polygamma(i - 1, x1) - polygamma(i - 1, x2)) / math.factorial(i)
        lam[i] = acc
    return lam


def _b_scaled(p: SpaceParams, log_y: float) -> float:
    # b(y) y^p, which tends to Gamma(alpha+2)/((N-1)!)^2 as y grows
    if log_y > 600.0:
        return p.leading_constant
    y = math.exp(log_y)
    s = 0.0
    for j in range(1, p.N):
        s += 2.0 * math.log1p(-j / y)
    s += log_gamma_ratio_scaled(y, 1.0 - p.N, p.alpha + 2.0 - p.N)
    return p.leading_constant * math.exp(s)


def _tail_integral(p: SpaceParams, Y: float):
    # int_Y^inf b(y) dy = Y^{1-p}/(p-1) int_0^1 [b y^p](Y v^{-1/(p-1)}) dv
    q = p.decay - 1.0
    logY = math.log(Y)

    def f(v):
        if v <= 0.0:
            return p.leading_constant
        return _b_scaled(p, logY - math.log(v) / q)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, 1.0, limit=400, epsabs=1e-15, epsrel=1e-14)
    factor = math.exp((1.0 - p.decay) * logY) / q
    return factor * val, factor * (err + 4 * _EPS * abs(val))


def _em_tail(p: SpaceParams, n: int, K: int, orders: int = 3):
    """sum_{k >= K} n^2 b(n(k+1)) by Euler-Maclaurin at k = K."""
    Y = float(n * (K + 1))
    bY = float(coefficients(p, np.array([Y]))[0])
    top = 2 * orders + 1
    lam = _log_b_taylor(p, Y, top)
    tau = np.zeros(top + 1)
    tau[0] = 1.0
    for k in range(1, top + 1):
        tau[k] = sum(i * lam[i] * tau[k - i] for i in range(1, k + 1)) / k
    # t^{(r)}(K) = n^2 * n^r * b^{(r)}(Y),  b^{(r)}(Y) = b(Y) r! tau_r
    def deriv(r):
        return n * n * n ** r * bY * math.factorial(r) * tau[r]

    integral, ierr = _tail_integral(p, Y)
    terms = [n * integral, 0.5 * n * n * bY]
    for j in range(1, orders + 1):
        b2j = float(bernoulli_even(j))
        terms.append(-b2j / math.factorial(2 * j) * deriv(2 * j - 1))
    b_next = float(bernoulli_even(orders + 1))
    next_term = abs(b_next / math.factorial(2 * orders + 2) * deriv(2 * orders + 1))
    return math.fsum(terms), 2.0 * next_term + n * ierr


def psi_norm_sq(p: SpaceParams, n: int, tol: float = 1e-12) -> ValueWithError:
    """||sum_{k<n} 1/(z - e^{2 pi i k/n})^N||^2.

    Only powers m = n(k+1) survive:  n^2 sum_{k>=0} b_{n(k+1)}, with b_m
    built from monomial norms.  The first K terms are summed directly, the
    rest by Euler-Maclaurin with an exact tail integral; K doubles until
    the estimated error is below tol * value.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    n = int(n)
    K = 128
    while True:
        y = n * np.arange(1, K + 1, dtype=float)
        head = n * n * _powersum_weights(p, y)
        tail, err = _em_tail(p, n, K)
        total = math.fsum(head) + tail
        err += 8 * _EPS * abs(total)
        if err <= tol * abs(total):
            return ValueWithError(total, err)
        if K >= 1_000_000:
            raise NonConvergenceError(
                f"Euler-Maclaurin error {err:.2e} above tolerance", achieved=err, best=total
            )
        K *= 2


# ---------------------------------------------------------------------------
# arbitrary configurations
# ---------------------------------------------------------------------------

def config_norm_sq_powersum(p: SpaceParams, c: CircleConfig, cap: int | None = None) -> ValueWithError:
    """sum_{s=N-1}^{cap} ((s)_{N-1})^2/((N-1)!)^2 |p_{s+1}|^2 ||z^{s-N+1}||^2 plus tail.

    The tail sum_{m > cap+1} b_m |p_m|^2 is expanded over pairs into
    n T(0) + 2 sum_{j<k} Re T(t_k - t_j), each T an asymptotic tail.  The
    cut-off is raised where needed so that every pair gap is resolved.
    """
    n = c.n
    if cap is None:
        cap = max(4 * n * p.N, 2000)
    if cap < p.N - 1:
        raise DomainError("cap must be at least N - 1")
    gaps = pair_gaps(c)
    M = cap + 1
    dist = 2.0 * np.abs(np.sin(0.5 * gaps))
    dist = dist[dist > 0]
    if dist.size:
        M = max(M, int(math.ceil(_OSC_REACH / dist.min())))
    M = min(max(M, 64 * p.N + int(p.alpha)), COEFF_CAP)
    ps = _kernels.power_sums(c.as_array(), M)
    m = np.arange(p.N, M + 1, dtype=float)
    w = _powersum_weights(p, m)
    sq = (ps.real ** 2 + ps.imag ** 2)[p.N - 1:]
    partial = math.fsum(w * sq)
    thetas = np.concatenate([[0.0], gaps])
    num, den = p.ratio_roots()
    anchor = float(coefficients(p, np.array([M + 1]))[0])
    t, terr = tail_sum(num, den, anchor, M + 1, thetas)
    tail = n * t[0].real + 2.0 * float(np.sum(t[1:].real))
    err = n * terr[0] + 2.0 * float(np.sum(terr[1:]))
    total = partial + tail
    err += 16 * _EPS * (partial + n * n)
    return ValueWithError(total, err)


def config_energy_interaction(p: SpaceParams, c: CircleConfig, tol: float = 1e-10) -> ValueWithError:
    """sum over ordered pairs j != k of phi(t_j - t_k)."""
    if c.n == 1:
        return ValueWithError(0.0, 0.0)
    gaps = pair_gaps(c)
    if np.any(np.minimum(gaps, TWO_PI - gaps) == 0.0):
        raise DomainError("coincident poles: the pair energy is undefined")
    vals, errs = cached_series(p, tol).evaluate(gaps)
    return ValueWithError(2.0 * math.fsum(vals), 2.0 * float(np.sum(errs)))


def asymptotic_limit_constant(p: SpaceParams) -> float:
    """Gamma(alpha+2) zeta(alpha+3-2N) / ((N-1)!)^2."""
    s = p.alpha + 3.0 - 2.0 * p.N
    if not s > 1.0:
        raise DomainError("zeta argument must exceed 1")
    return p.leading_constant * zeta_real(s)


def scaled_norm_sequence(p: SpaceParams, ns) -> list:
    """[(n, n^{alpha+1-2N} ||Psi_n||^2)] for each n."""
    out = []
    for n in ns:
        v = psi_norm_sq(p, n)
        out.append((int(n), float(n) ** (p.alpha + 1.0 - 2.0 * p.N) * v.value))
    return out
