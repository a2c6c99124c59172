"""The interaction function phi_{alpha,N} and its derivatives.

phi(theta) = sum_{m >= N} b_m cos(m theta) is the real inner product of
two degree-N single-pole fractions whose poles sit at angular distance
theta.  Three independent evaluation routes are provided:

* cosine series: partial sum by a Reinsch-modified Clenshaw recurrence
  plus an asymptotic tail (see :mod:`bergman_sf.tails`);
* radial quadrature of the Poisson-type kernel;
* for N = 2, alpha = 3, the logarithmic form and a closed-form derivative.
"""
from __future__ import annotations

import math
import threading
import warnings
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import DomainError, NonConvergenceError
from .special import falling_factorial, log_gamma_ratio_scaled
from .tails import tail_sum

__all__ = [
    "SpaceParams",
    "ValueWithError",
    "TruncatedCosineSeries",
    "series_coefficient",
    "coefficients",
    "build_series",
    "cached_series",
    "phi_series",
    "phi_quadrature",
    "phi_closed_n2a3",
    "phi_prime",
    "phi_prime_n2a3",
    "stationarity_n2a3",
    "phi_second_derivative",
    "COEFF_CAP",
]

TWO_PI = 2.0 * math.pi
COEFF_CAP = 10_000_000
# per-angle cut-off: M |1 - e^{i theta}| >= _OSC_REACH
_OSC_REACH = 64.0
_TINY_ANGLE = 1e-100
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpaceParams:
    """Degree N and weight exponent alpha of the space A^2_alpha."""

    N: int
    alpha: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        a = float(self.alpha)
        if not math.isfinite(a):
            raise DomainError("alpha must be finite")
        if not a > 2 * (self.N - 1):
            raise DomainError(
                f"alpha must exceed 2(N-1) = {2 * (self.N - 1)} for the fractions to lie in the space"
            )
        object.__setattr__(self, "alpha", a)

    @property
    def k_alpha(self) -> float:
        return self.alpha + 1.0

    @property
    def decay(self) -> float:
        """Exponent p with b_m ~ C m^(-p)."""
        return self.alpha + 3.0 - 2.0 * self.N

    @property
    def is_critical(self) -> bool:
        return abs(self.alpha - (2 * self.N - 1)) <= 1e-12

    @property
    def leading_constant(self) -> float:
        """C = Gamma(alpha+2) / ((N-1)!)^2, so that b_m ~ C m^(-p)."""
        return math.exp(math.lgamma(self.alpha + 2.0) - 2.0 * math.lgamma(self.N))

    def ratio_roots(self, weight_power: int = 0):
        """Roots (num, den) of (m+1)^k b_{m+1} / (m^k b_m)."""
        num = [-1.0] * weight_power + [0.0] * (2 - weight_power)
        den = [float(self.N - 1), float(self.N) - self.alpha - 2.0]
        return num, den


@dataclass(frozen=True)
class ValueWithError:
    value: float
    err: float

    def __post_init__(self):
        if not (self.err >= 0.0):
            raise ValueError("error estimate must be a nonnegative number")

    def __iter__(self):
        yield self.value
        yield self.err


def series_coefficient(p: SpaceParams, m: int) -> float:
    """b_m = (alpha+1)/((N-1)!)^2 ((m-1)_{N-1})^2 B(m-N+1, alpha+1)."""
    if int(m) != m or m < p.N:
        raise DomainError(f"coefficient index must be an integer >= N = {p.N}")
    return float(coefficients(p, np.array([m]))[0])


def coefficients(p: SpaceParams, m) -> np.ndarray:
    """Vectorised b_m for integer m >= N."""
    m = np.asarray(m, dtype=float)
    if np.any(m < p.N):
        raise DomainError("coefficient index below N")
    # b_m = C * prod_j (1 - j/m)^2 * [Gamma(m-N+1)/Gamma(m-N+alpha+2)] m^{alpha+1} * m^{-p}
    logs = np.zeros_like(m)
    for j in range(1, p.N):
        logs += 2.0 * np.log1p(-j / m)
    logs += log_gamma_ratio_scaled(m, 1.0 - p.N, p.alpha + 2.0 - p.N)
    return p.leading_constant * np.exp(logs) * m ** (-p.decay)


class _CoefficientStore:
    """Per-(N, alpha) coefficient arrays that grow by doubling."""

    def __init__(self, slots=6):
        self._slots = slots
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    def get(self, p: SpaceParams, M: int) -> np.ndarray:
        key = (p.N, p.alpha)
        with self._lock:
            arr = self._data.get(key)
            if arr is None or p.N + arr.size - 1 < M:
                size = 1024
                while p.N + size - 1 < M:
                    size *= 2
                arr = coefficients(p, np.arange(p.N, p.N + size))
                arr.setflags(write=False)
                self._data[key] = arr
            self._data.move_to_end(key)
            while len(self._data) > self._slots:
                self._data.popitem(last=False)
            return arr[: M - p.N + 1]


_STORE = _CoefficientStore()


def _min_cutoff(p: SpaceParams) -> int:
    spread = max(p.N - 1.0, abs(p.N - p.alpha - 2.0), 1.0)
    return int(max(64, math.ceil(8.0 * spread)))


@dataclass(frozen=True, eq=False)
class TruncatedCosineSeries:
    """Coefficients b_N..b_M of phi plus the asymptotic tail at theta = 0.

    ``tail_sum`` estimates sum_{m>M} b_m and ``tail_bound`` bounds the
    error of that estimate.
    """

    params: SpaceParams
    start: int
    coeffs: np.ndarray
    tail_sum: float
    tail_bound: float

    @property
    def M(self) -> int:
        return self.start + self.coeffs.size - 1

    def evaluate(self, theta, derivative: int = 0):
        """Values and error estimates of phi, phi' or phi'' at theta (array)."""
        return _evaluate(self, theta, derivative)


def build_series(p: SpaceParams, tol: float = 1e-10) -> TruncatedCosineSeries:
    """Pick the cut-off M so that the tail estimate at theta = 0 is within tol."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    num, den = p.ratio_roots()
    M = _min_cutoff(p)
    while True:
        anchor = coefficients(p, np.array([M + 1]))
        val, err = tail_sum(num, den, anchor, M + 1, 0.0)
        if err[0] <= tol:
            break
        if 2 * M > COEFF_CAP:
            raise NonConvergenceError(
                f"tail error {err[0]:.3e} above tol {tol:.1e} at the coefficient cap",
                achieved=float(err[0]),
            )
        M *= 2
    coeffs = np.array(_STORE.get(p, M))
    coeffs.setflags(write=False)
    return TruncatedCosineSeries(p, p.N, coeffs, float(val[0].real), float(err[0]))


@lru_cache(maxsize=32)
def cached_series(p: SpaceParams, tol: float = 1e-10) -> TruncatedCosineSeries:
    return build_series(p, tol)


def _reduce(theta):
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(t >= TWO_PI, 0.0, t)


def _evaluate(s: TruncatedCosineSeries, theta, derivative):
    if derivative not in (0, 1, 2):
        raise DomainError("derivative order must be 0, 1 or 2")
    p = s.params
    th = np.atleast_1d(_reduce(theta))
    flat = th == 0.0
    dist = 2.0 * np.abs(np.sin(0.5 * th))
    with np.errstate(divide="ignore", over="ignore"):
        want = np.where(flat, s.M, np.ceil(_OSC_REACH / np.where(flat, 1.0, dist)))
    want = np.maximum(want, s.M)
    # round up to M * 2^k to keep the number of distinct lengths small
    k = np.ceil(np.log2(want / s.M))
    cut = np.minimum(s.M * 2.0 ** k, COEFF_CAP).astype(np.int64)
    top = int(cut.max()) + 1
    base = _STORE.get(p, top)
    m = np.arange(p.N, top + 1, dtype=float)
    c = base * m ** derivative if derivative else base

    if derivative == 2 and np.any(flat) and p.decay <= 3.0:
        raise DomainError("phi'' is unbounded at theta = 0 for this (N, alpha)")
    lengths = cut - p.N + 1
    partial = _kernels.trig_sum(c, p.N, th, lengths, sine=(derivative == 1))
    num, den = p.ratio_roots(derivative)
    anchors = c[lengths]
    # angles the capped cut-off cannot resolve go to the small-angle route
    small = ~flat & (cut * dist < _OSC_REACH)
    tail = np.zeros(th.size, dtype=complex)
    terr = np.zeros(th.size)
    big = ~small
    if np.any(big):
        tail[big], terr[big] = tail_sum(num, den, anchors[big], cut[big] + 1, th[big])
    for i in np.flatnonzero(small):
        near = float(min(th[i], TWO_PI - th[i]))
        if near < _TINY_ANGLE:
            if derivative:
                raise DomainError("derivatives are not resolved this close to theta = 0")
            # indistinguishable from 0 in the tail; charge the difference to the error
            r, e = tail_sum(num, den, anchors[i:i + 1], cut[i:i + 1] + 1, 0.0)
            tail[i], terr[i] = r[0], e[0]
            q = min(p.decay - 1.0, 2.0)
            terr[i] += 4.0 * p.leading_constant * near ** q * (1.0 / (p.decay - 1.0) + 1.0)
            continue
        tail[i], terr[i] = _small_angle_tail(p, derivative, float(cut[i] + 1), near)
        if th[i] > math.pi:  # the angle sits just below 2 pi
            tail[i] = tail[i].conjugate()
    tail = tail.imag if derivative == 1 else tail.real
    total = partial + tail
    absum = np.cumsum(np.abs(c))[lengths - 1]
    err = terr + 16.0 * _EPS * absum
    if derivative == 1:
        total = -total
        total[flat] = 0.0
        err[flat] = 0.0
    elif derivative == 2:
        total = -total
    return total, err


def _log_c_derivs(p: SpaceParams, k: int, x):
    """(l, l') with l = d/dx log(x^k b(x)), for large x.

    The digamma and trigamma differences use their large-argument series
    written as exact differences, which avoids cancellation at x ~ 1e7.
    """
    u, v = 1.0 - p.N, 2.0 + p.alpha - p.N
    xu, xv = x + u, x + v
    d1 = (v - u) / (xu * xv)  # 1/xu - 1/xv
    d2 = d1 * (1.0 / xu + 1.0 / xv)  # 1/xu^2 - 1/xv^2
    psi = (np.log1p((u - v) / xv) - 0.5 * d1 - d2 / 12.0
           + (xu ** -4 - xv ** -4) / 120.0 - (xu ** -6 - xv ** -6) / 252.0)
    tri = d1 + 0.5 * d2 + (xu ** -3 - xv ** -3) / 6.0 - (xu ** -5 - xv ** -5) / 30.0
    ell = k / x + psi
    dell = -k / (x * x) + tri
    for j in range(1, p.N):
        ell = ell + 2.0 / (x - j)
        dell = dell - 2.0 / (x - j) ** 2
    return ell, dell


_GL_HI = np.polynomial.legendre.leggauss(64)
_GL_LO = np.polynomial.legendre.leggauss(40)


def _small_angle_tail(p: SpaceParams, k: int, m0: float, t: float):
    """sum_{m >= m0} m^k b_m e^{imt} when m0 t is too small for the tail expansion.

    Euler-Maclaurin on f(x) = c(x) e^{ixt}, c the smooth continuation of
    m^k b_m (m0 is large here, so three correction terms suffice).  With
    y = t (x - m0) the integral is  e^{i m0 t} int_0^inf g(y) e^{iy} dy,
    g(y) = c(m0 + y/t)/t.  On [0, L] Gauss-Legendre panels refined
    geometrically towards y = 0 resolve the scale m0 t; beyond L two
    integrations by parts leave a y^(-q-2) integrand for QAWF.
    """
    def c(x):
        return x ** k * coefficients(p, x)

    a = m0 * t
    L = TWO_PI * max(1.0, math.ceil(a / TWO_PI))
    edges = {0.0, L}
    edges.update(a * 8.0 ** j for j in range(-4, 60) if a * 8.0 ** j < L)
    edges.update(math.pi * i for i in range(1, int(round(L / math.pi))))
    edges = np.array(sorted(edges))
    lo, hi = edges[:-1], edges[1:]

    def panel_sum(rule):
        xs, ws = rule
        y = 0.5 * (hi - lo)[:, None] * (xs[None, :] + 1.0) + lo[:, None]
        w = 0.5 * (hi - lo)[:, None] * ws[None, :]
        vals = c(m0 + y / t) / t * np.exp(1j * y)
        return complex(np.sum(w * vals))

    head = panel_sum(_GL_HI)
    head_err = abs(head - panel_sum(_GL_LO))

    xL = np.array([m0 + L / t])
    cL = float(c(xL)[0])
    lL, dlL = (float(v[0]) for v in _log_c_derivs(p, k, xL))
    gL, g1L = cL / t, cL * lL / t ** 2
    boundary = 1j * gL - g1L  # e^{iL} = 1

    def g2(y):
        x = np.array([m0 + y / t])
        ell, dell = _log_c_derivs(p, k, x)
        return float(c(x)[0] * (ell[0] ** 2 + dell[0])) / t ** 3

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        rc, ec = integrate.quad(g2, L, np.inf, weight="cos", wvar=1.0, epsabs=1e-15, limlst=200)
        rs, es = integrate.quad(g2, L, np.inf, weight="sin", wvar=1.0, epsabs=1e-15, limlst=200)
    J = head + boundary - complex(rc, rs)

    x0 = np.array([m0])
    c0 = float(c(x0)[0])
    l0 = float(_log_c_derivs(p, k, x0)[0][0])
    ang = math.fmod(m0 * t, TWO_PI)
    phase = complex(math.cos(ang), math.sin(ang))
    f0 = c0 * phase
    s1 = complex(l0, t)
    em = 0.5 * f0 - f0 * s1 / 12.0 + f0 * s1 ** 3 / 720.0
    em_err = 2.0 * abs(c0) * abs(s1) ** 5 / 30240.0
    total = phase * J + em
    scale = abs(head) + abs(boundary) + abs(complex(rc, rs))
    err = head_err + ec + es + em_err + 64 * _EPS * (abs(total) + scale)
    return total, err


def phi_series(s: TruncatedCosineSeries, theta: float) -> ValueWithError:
    """phi(theta) (reduced mod 2pi) from a truncated series with its tail."""
    v, e = s.evaluate(np.array([float(theta)]))
    return ValueWithError(float(v[0]), float(e[0]))


# ---------------------------------------------------------------------------
# quadrature routes
# ---------------------------------------------------------------------------

def _angle_in_open_circle(theta, margin):
    t = float(_reduce(theta))
    if min(t, TWO_PI - t) < margin:
        raise DomainError(
            "theta is too close to 0 mod 2pi for quadrature; use the series instead"
        )
    return t


def _quad(f, dist):
    # breakpoints where the kernel concentrates, at r = 1 - O(dist)
    pts = sorted({max(0.0, 1.0 - 8.0 * dist), max(0.0, 1.0 - dist)} - {0.0})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, 0.0, 1.0, points=pts or None, limit=2000,
                                  epsabs=1e-13, epsrel=1e-13)
    return val, err


def phi_quadrature(p: SpaceParams, theta: float) -> ValueWithError:
    """phi by radial quadrature of the degree-N Poisson-type kernel.

    The kernel sum_k C(N,k) (-1)^(N-k) r^(N-k) cos(k t) / |e^{it} - r|^(2N)
    equals Re (e^{it} - r)^N / |e^{it} - r|^(2N); the complex form avoids
    the cancellation of the binomial sum when r is near 1 and t is small.
    """
    N, a = p.N, p.alpha
    pref = p.k_alpha / math.factorial(N - 1) * falling_factorial(a, N - 1)
    if float(_reduce(theta)) == 0.0:
        # the kernel collapses to (1 - r)^(-N): an algebraic weight at r = 1
        val, err = integrate.quad(lambda r: pref * r ** (N - 1), 0.0, 1.0, weight="alg",
                                  wvar=(0.0, a - 2.0 * N + 1.0), epsabs=1e-13, epsrel=1e-13)
        return ValueWithError(val, err)
    t = _angle_in_open_circle(theta, 1e-3)
    hav = 2.0 * math.sin(0.5 * t) ** 2  # 1 - cos t
    st = math.sin(t)
    expo = a - N + 1

    def f(r):
        w = complex((1.0 - r) - hav, st)
        return pref * r ** (N - 1) * (1.0 - r) ** expo * (1.0 / w.conjugate() ** N).real

    val, err = _quad(f, min(t, TWO_PI - t))
    if not err <= 1e-9:
        raise NonConvergenceError(f"quadrature error estimate {err:.2e} above 1e-9",
                                  achieved=err, best=val)
    return ValueWithError(val, err)


def phi_closed_n2a3(theta: float) -> float:
    """phi for N=2, alpha=3 from 12 * int_0^1 log(1 + r^2 - 2r cos t) (2 - 3r) dr."""
    t = float(_reduce(theta))
    if t == 0.0:
        raise DomainError("the logarithmic form needs theta in (0, 2pi)")
    hav = 2.0 * math.sin(0.5 * t) ** 2

    def f(r):
        return math.log((1.0 - r) ** 2 + 2.0 * r * hav) * (2.0 - 3.0 * r)

    val, _ = _quad(f, min(t, TWO_PI - t))
    return 12.0 * val


def stationarity_n2a3(theta: float) -> float:
    """phi'(theta)/24 for N=2, alpha=3, written without division by sin."""
    s = math.sin(theta)
    c = math.cos(theta)
    # log(2 - 2 cos t) = 2 log(2 |sin(t/2)|), exact for small t
    return (-3.0 * s + s * (1.0 - 3.0 * c) * 2.0 * math.log(2.0 * abs(math.sin(0.5 * theta)))
            + (2.0 * c * (1.0 - 3.0 * c) + 3.0) * math.atan2(1.0 + c, s))


def phi_prime_n2a3(theta: float) -> float:
    """Closed-form phi' for N=2, alpha=3 on (0, 2pi)."""
    t = float(_reduce(theta))
    if t == 0.0:
        raise DomainError("phi' is discontinuous at theta = 0")
    if t > math.pi:
        return -phi_prime_n2a3(TWO_PI - t)
    return 24.0 * stationarity_n2a3(t)


def phi_prime(p: SpaceParams, theta: float, tol: float = 1e-10) -> ValueWithError:
    """phi'(theta) on (0, 2pi)."""
    t = float(_reduce(theta))
    if t == 0.0:
        raise DomainError("phi' is discontinuous at theta = 0")
    if p.N == 2 and p.alpha == 3.0:
        v = phi_prime_n2a3(t)
        return ValueWithError(v, 64 * _EPS * (abs(v) + 24.0))
    v, e = cached_series(p, tol).evaluate(np.array([t]), derivative=1)
    return ValueWithError(float(v[0]), float(e[0]))


def phi_second_derivative(p: SpaceParams, theta: float) -> ValueWithError:
    """phi'' at the critical exponent alpha = 2N - 1, in closed form.

    phi'' = (2N)!/((N-1)!)^2 [1/2 + sum_{m<N} cos(m t) + sum_{m>=N} a_m cos(m t)]
    where a_m is the rational sequence of :func:`sequences.thm14_coefficients`;
    its partial fractions turn the last sum into logarithms.
    """
    from .sequences import thm14_partial_fractions

    if not p.is_critical:
        raise DomainError("the closed form holds only at alpha = 2N - 1")
    t = float(_reduce(theta))
    if t == 0.0:
        raise DomainError("phi'' is unbounded at theta = 0")
    N = p.N
    z = complex(math.cos(t), math.sin(t))
    # log(1 - z) for z = e^{it}, t in (0, 2pi), without cancellation
    log1mz = complex(math.log(2.0 * math.sin(0.5 * t)), 0.5 * (t - math.pi))
    total = 0.5 + sum(math.cos(m * t) for m in range(1, N))
    acc = 0j
    for j, A in thm14_partial_fractions(N):
        head = sum(z ** k / k for k in range(1, N + j))
        acc += float(A) * z ** (-j) * (-log1mz - head)
    total += acc.real
    scale = math.factorial(2 * N) / math.factorial(N - 1) ** 2
    mag = sum(abs(float(A)) for _, A in thm14_partial_fractions(N))
    err = 64 * _EPS * scale * (abs(total) + mag * (abs(math.log(2 * math.sin(0.5 * t))) + N + 4))
    return ValueWithError(scale * total, err)
