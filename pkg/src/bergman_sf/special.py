"""Real special functions: log-gamma, gamma ratios, Beta, zeta, falling factorials.

Ratios of gamma functions are always formed in log space.  For large
arguments the difference lnG(y+a) - lnG(y+b) is taken from the Stirling
series written with ``log1p`` so that nothing of size ln(y) is cancelled.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "bernoulli_even",
    "log_gamma",
    "log_gamma_ratio",
    "log_gamma_ratio_scaled",
    "gamma_ratio",
    "beta",
    "zeta_real",
    "falling_factorial",
]

# Stirling switch-over point and number of correction terms.
_STIRLING_MIN = 12.0
_STIRLING_TERMS = 8


@lru_cache(maxsize=None)
def bernoulli_even(k: int) -> Fraction:
    """Exact Bernoulli number B_{2k} (Akiyama-Tanigawa)."""
    n = 2 * k
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


_STIRLING_C = tuple(
    float(bernoulli_even(k)) / (2 * k * (2 * k - 1)) for k in range(1, _STIRLING_TERMS + 1)
)


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    if np.ndim(x) == 0:
        xf = float(x)
        if not xf > 0.0:
            raise DomainError(f"log_gamma needs x > 0, got {x!r}")
        return math.lgamma(xf)
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0.0):
        raise DomainError("log_gamma needs x > 0")
    return gammaln(arr)


def _stirling_scaled(y, a, b):
    # lnG(y+a) - lnG(y+b) - (a-b) ln y, valid when y+a, y+b are large
    wa = y + a
    wb = y + b
    d = a - b
    out = (wb - 0.5) * np.log1p(d / wb) + d * np.log1p(a / y) - d
    pa = 1.0 / wa
    pb = 1.0 / wb
    ia2 = pa * pa
    ib2 = pb * pb
    for c in _STIRLING_C:
        out = out + c * (pa - pb)
        pa = pa * ia2
        pb = pb * ib2
    return out


def log_gamma_ratio_scaled(y, a: float, b: float):
    """lnG(y+a) - lnG(y+b) - (a-b) ln y, accurate for large y.

    The result tends to 0 as y grows, so its absolute accuracy is not
    limited by the size of ln y.  Requires y > 0, y+a > 0, y+b > 0.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0) or np.any(y_arr + a <= 0) or np.any(y_arr + b <= 0):
        raise DomainError("log_gamma_ratio_scaled: arguments must be positive")
    big = y_arr + min(a, b) >= _STIRLING_MIN
    out = np.empty_like(y_arr)
    if np.any(big):
        out[big] = _stirling_scaled(y_arr[big], a, b)
    small = ~big
    if np.any(small):
        ys = y_arr[small]
        out[small] = gammaln(ys + a) - gammaln(ys + b) - (a - b) * np.log(ys)
    return out if out.ndim else float(out)


def log_gamma_ratio(x, a: float, b: float):
    """lnG(x+a) - lnG(x+b) for x+a > 0, x+b > 0 (scalar or array)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr + a <= 0) or np.any(x_arr + b <= 0):
        raise DomainError("log_gamma_ratio: gamma arguments must be positive")
    big = (x_arr + min(a, b) >= _STIRLING_MIN) & (x_arr > 0)
    out = np.empty_like(x_arr)
    if np.any(big):
        xb = x_arr[big]
        out[big] = _stirling_scaled(xb, a, b) + (a - b) * np.log(xb)
    small = ~big
    if np.any(small):
        xs = x_arr[small]
        out[small] = gammaln(xs + a) - gammaln(xs + b)
    return out if out.ndim else float(out)


def gamma_ratio(s, alpha: float):
    """Gamma(s+1) / Gamma(s+alpha+2) for s >= 0.

    Stays finite and accurate for s up to 1e7 and beyond.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr + alpha + 2 <= 0):
        raise DomainError("gamma_ratio needs s >= 0 and s + alpha + 2 > 0")
    out = np.exp(log_gamma_ratio(s_arr, 1.0, alpha + 2.0))
    return out if np.ndim(out) else float(out)


def beta(x: float, y: float) -> float:
    """Euler Beta function B(x, y) = G(x)G(y)/G(x+y)."""
    if not (x > 0 and y > 0):
        raise DomainError(f"beta needs positive arguments, got ({x!r}, {y!r})")
    # put the larger argument in the ratio so Stirling applies when it can
    if x < y:
        x, y = y, x
    return math.exp(math.lgamma(y) + log_gamma_ratio(float(x), 0.0, float(y)))


_ZETA_CUT = 50
_ZETA_TERMS = 12


def zeta_real(s: float) -> float:
    """Riemann zeta at real s > 1 by Euler-Maclaurin summation."""
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"zeta_real needs s > 1, got {s!r}")
    n = _ZETA_CUT
    head = math.fsum(k ** -s for k in range(1, n))
    total = [head, n ** (1.0 - s) / (s - 1.0), 0.5 * n ** -s]
    # B_{2j}/(2j)! * s(s+1)...(s+2j-2) * n^(-s-2j+1)
    rising = s
    npow = n ** (-s - 1.0)
    fact = 2.0
    for j in range(1, _ZETA_TERMS + 1):
        total.append(float(bernoulli_even(j)) / fact * rising * npow)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        npow /= n * n
        fact *= (2 * j + 1) * (2 * j + 2)
    return math.fsum(total)


def falling_factorial(x, n: int):
    """(x)_n = x (x-1) ... (x-n+1); exact for integer x."""
    if n < 0:
        raise DomainError("falling_factorial needs n >= 0")
    if isinstance(x, (int, np.integer)):
        out = 1
        xi = int(x)
        for j in range(n):
            out *= xi - j
        return out
    out = 1.0
    for j in range(n):
        out *= x - j
    return out
