"""Convex sequences, Fejer sums and the critical-exponent coefficient sequence.

Notation: Delta a_n = a_n - a_{n+1}, Delta^2 a_n = a_n - 2 a_{n+1} + a_{n+2}.
A positive, decreasing, convex null sequence gives a nonnegative cosine
series a_0/2 + sum a_n cos(n t), because that series equals
(1/2) sum_{n>=0} (n+1) Delta^2 a_n F_{n+1}(t) with Fejer kernels
F_n(t) = (1/n) (sin(n t/2) / sin(t/2))^2 >= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import DomainError, InsufficientDataError, InvariantFailure

__all__ = [
    "RealSequencePrefix",
    "ConvexifyResult",
    "FejerCheck",
    "Decomposition",
    "thm14_coefficients",
    "thm14_exact",
    "thm14_partial_fractions",
    "threshold_quantity",
    "threshold_check",
    "convexify",
    "fejer_kernel",
    "fejer_identity_check",
    "bari_positivity_check",
    "phi_star_decomposition",
]

TWO_PI = 2.0 * math.pi
_TIE = 1e-12
_EXACT_UPTO = 30


@dataclass(frozen=True, eq=False)
class RealSequencePrefix:
    """a_0..a_M, optionally with a rule producing longer prefixes."""

    values: np.ndarray
    generator: Optional[Callable[[int], np.ndarray]] = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("a sequence prefix needs at least one entry")
        if not np.all(np.isfinite(v)):
            raise DomainError("sequence entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def delta(self) -> np.ndarray:
        return self.values[:-1] - self.values[1:]

    def delta2(self) -> np.ndarray:
        v = self.values
        return v[:-2] - 2.0 * v[1:-1] + v[2:]

    def extend(self, M: int) -> "RealSequencePrefix":
        if M <= self.M:
            return RealSequencePrefix(self.values[: M + 1], self.generator)
        if self.generator is None:
            raise InsufficientDataError("prefix has no generator to extend it")
        return RealSequencePrefix(self.generator(M), self.generator)


@dataclass(frozen=True)
class ConvexifyResult:
    N0: int
    modified: tuple
    original_tail_start: int
    certified_through: int

    def full(self, seq: RealSequencePrefix) -> np.ndarray:
        """Modified prefix followed by the untouched entries of ``seq``."""
        return np.concatenate([np.array(self.modified), seq.values[self.N0:]])


# ---------------------------------------------------------------------------
# the critical-exponent sequence a_m = 1 - (m!)^2 / ((m-N)! (m+N)!)
# ---------------------------------------------------------------------------

def _thm14_values(N: int, M: int) -> np.ndarray:
    a = np.ones(M + 1)
    if M >= N:
        m = np.arange(N, M + 1, dtype=float)
        acc = np.zeros_like(m)
        # (m!)^2 / ((m-N)!(m+N)!) = prod_j (1 - (2j-1)/(m+j))
        for j in range(1, N + 1):
            acc += np.log1p(-(2 * j - 1) / (m + j))
        a[N:] = -np.expm1(acc)
        # small indices exactly, correctly rounded (the log form is for large m)
        for k in range(N, min(M, _EXACT_UPTO) + 1):
            a[k] = float(thm14_exact(N, k))
    return a


def thm14_coefficients(N: int, M: int) -> RealSequencePrefix:
    """a_0..a_M with a_m = 1 for m < N."""
    if N < 1 or M < N:
        raise DomainError("need N >= 1 and M >= N")
    return RealSequencePrefix(_thm14_values(N, M), lambda K: _thm14_values(N, K))


def thm14_exact(N: int, m: int) -> Fraction:
    """a_m as an exact rational."""
    if m < N:
        return Fraction(1)
    return 1 - Fraction(math.factorial(m) ** 2, math.factorial(m - N) * math.factorial(m + N))


@lru_cache(maxsize=None)
def thm14_partial_fractions(N: int):
    """Pairs (j, A_j) with a_m = sum_j A_j / (m + j) for m >= N (exact)."""
    out = []
    for j in range(1, N + 1):
        num = Fraction(1)
        for i in range(1, N + 1):
            num *= -j - i + 1
        den = Fraction(1)
        for i in range(1, N + 1):
            if i != j:
                den *= i - j
        out.append((j, -num / den))
    return tuple(out)


def threshold_quantity(N: int, M: int) -> np.ndarray:
    """(m+1) a_m - m a_{m+1} for m = 0..M."""
    a = _thm14_values(N, M + 1)
    m = np.arange(M + 1, dtype=float)
    return (m + 1.0) * a[:-1] - m * a[1:]


def threshold_check(N: int) -> int:
    """Smallest m >= N with (m+1) a_m - m a_{m+1} <= 1 = a_0.

    Checked over m <= 10 N^2; the first crossing must be N^2 - 1, where the
    quantity equals 1, and it must stay <= 1 from there on.
    """
    if N < 2:
        raise DomainError("threshold_check needs N >= 2")
    top = 10 * N * N
    h = threshold_quantity(N, top)
    slack = 1e-12
    idx = [m for m in range(N, top + 1) if h[m] <= 1.0 + slack]
    if not idx:
        raise InvariantFailure(f"no crossing found for N={N} up to m={top}")
    first = idx[0]
    expected = N * N - 1
    if first != expected:
        raise InvariantFailure(f"first crossing at m={first}, expected {expected}")
    resid = abs(h[expected] - 1.0)
    if resid > 1e-12:
        raise InvariantFailure(f"equality residual {resid:.2e} at m={expected}")
    if np.any(h[expected:] > 1.0 + slack):
        raise InvariantFailure("quantity exceeds 1 again after the threshold")
    return first


# ---------------------------------------------------------------------------
# convexification
# ---------------------------------------------------------------------------

def convexify(seq: RealSequencePrefix) -> ConvexifyResult:
    """Replace a finite head of the sequence so the whole becomes convex.

    N0 is the least K >= 1 with a_0 >= a_K + K Delta a_K and
    n -> a_n + n Delta a_n non-increasing for n >= K (checked on the
    prefix).  The head is the line through a_{N0} with slope Delta a_{N0},
    i.e. the zero-slack choice of the backward recursion; a_0 is kept.
    """
    a = seq.values
    if a.size < 4:
        raise InsufficientDataError("need at least four entries")
    if np.any(a <= 0):
        raise DomainError("sequence must be positive")
    if np.any(np.diff(a) > 0):
        raise DomainError("sequence must be non-increasing")
    n = np.arange(a.size - 1, dtype=float)
    h = (n + 1.0) * a[:-1] - n * a[1:]
    last = h.size - 1  # h is known for indices 0..last
    # rising[n] is True where h_{n+1} > h_n (convexity fails at n)
    rising = h[1:] > h[:-1] + 1e-15 * np.abs(h[:-1])
    bad_after = np.zeros(h.size, dtype=bool)  # any rise at index >= K
    acc = False
    for k in range(last - 1, -1, -1):
        acc = acc or bool(rising[k])
        bad_after[k] = acc
    N0 = None
    for K in range(1, last):
        # the defining inequality can hold with equality, so allow rounding
        if h[K] <= a[0] * (1 + _TIE) and not bad_after[K]:
            N0 = K
            break
    if N0 is None:
        raise InsufficientDataError("prefix too short to certify where convexity starts")
    slope = a[N0] - a[N0 + 1]
    if abs(h[N0] - a[0]) <= _TIE * a[0]:
        # a tie within rounding: in exact arithmetic the line through a_{N0}
        # with this slope meets a_0, so anchor it there to keep Delta^2 >= 0
        slope = (a[0] - a[N0]) / N0
    head = [float(a[0])] + [float(a[N0] + (N0 - k) * slope) for k in range(1, N0)]
    return ConvexifyResult(N0, tuple(head), N0, last)


# ---------------------------------------------------------------------------
# Fejer representation and positivity
# ---------------------------------------------------------------------------

class FejerCheck(NamedTuple):
    lhs: float
    rhs: float
    bound: float


def fejer_kernel(n, t):
    """F_n(t) = (1/n) (sin(n t/2)/sin(t/2))^2 (n or t may be arrays)."""
    n = np.asarray(n, dtype=float)
    t = np.asarray(t, dtype=float)
    return (np.sin(0.5 * n * t) / np.sin(0.5 * t)) ** 2 / n


def fejer_identity_check(seq: RealSequencePrefix, theta: float, terms: int) -> FejerCheck:
    """Both sides of the Fejer identity truncated at ``terms``.

    lhs = a_0/2 + sum_{n=1}^{T} a_n cos(n t),
    rhs = (1/2) sum_{n=0}^{T-2} (n+1) Delta^2 a_n F_{n+1}(t).
    Summation by parts gives lhs - rhs = (T/2) Delta a_{T-1} F_T + a_T D_T
    with D_T the Dirichlet sum; ``bound`` bounds this by
    Delta a_{T-1} / (2 sin^2(t/2)) + a_T / (2 |sin(t/2)|).
    """
    T = int(terms)
    if T < 2 or T > seq.M:
        raise DomainError(f"terms must lie in [2, {seq.M}]")
    t = float(np.mod(theta, TWO_PI))
    sh = math.sin(0.5 * t)
    if abs(sh) < 1e-12:
        raise DomainError("theta must differ from 0 mod 2pi")
    a = seq.values[: T + 1]
    n = np.arange(1, T + 1)
    lhs = 0.5 * a[0] + math.fsum(a[1:] * np.cos(n * t))
    d2 = a[:-2] - 2.0 * a[1:-1] + a[2:]
    k = np.arange(1, T)  # Fejer index n+1
    rhs = 0.5 * math.fsum(k * d2 * fejer_kernel(k, t))
    scale = float(np.sum(np.abs(a)))
    bound = (abs(a[T - 1] - a[T]) / (2.0 * sh * sh) + abs(a[T]) / (2.0 * abs(sh))
             + 64 * np.finfo(float).eps * scale / (sh * sh))
    return FejerCheck(float(lhs), float(rhs), float(bound))


def bari_positivity_check(seq: RealSequencePrefix, samples: int) -> float:
    """min over equispaced t of [a_0/2 + sum_{n<=M} a_n cos(n t)] - a_M/|sin(t/2)|.

    For a decreasing null sequence the subtracted term bounds the omitted
    tail, so a nonnegative result certifies positivity at the samples.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    a = np.array(seq.values, dtype=float)
    a[0] *= 0.5
    t = TWO_PI * np.arange(1, samples + 1) / (samples + 1)
    lengths = np.full(t.size, a.size, dtype=np.int64)
    vals = _kernels.trig_sum(a, 0, t, lengths)
    bound = abs(seq.values[-1]) / np.abs(np.sin(0.5 * t))
    return float(np.min(vals - bound))


# ---------------------------------------------------------------------------
# decomposition of phi at the critical exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Decomposition:
    """phi_{2N-1,N} = C [B(t) - sum_m psi_m cos(m t) - sum_m corr_m cos(m t)].

    B(t) = pi^2/6 - pi t/2 + t^2/4 on [0, 2pi] is sum cos(m t)/m^2,
    psi_m = atilde_m/m^2 (m = 1..T) with atilde the convexified sequence,
    corr_m = (a_m - atilde_m)/m^2 (m = 1..N^2-2), C = (2N)!/((N-1)!)^2.
    """

    N: int
    convexified: ConvexifyResult
    psi_coeffs: np.ndarray
    correction_coeffs: np.ndarray
    scale: float
    truncation: float

    def reconstruct(self, theta):
        """(values, error bounds) of the reassembled phi at theta."""
        t = np.atleast_1d(np.mod(np.asarray(theta, dtype=float), TWO_PI))
        base = math.pi ** 2 / 6.0 - 0.5 * math.pi * t + 0.25 * t * t
        lengths = np.full(t.size, self.psi_coeffs.size, dtype=np.int64)
        psi = _kernels.trig_sum(self.psi_coeffs, 1, t, lengths)
        k = np.arange(1, self.correction_coeffs.size + 1)
        corr = np.cos(np.outer(t, k)) @ self.correction_coeffs
        val = self.scale * (base - psi - corr)
        err = np.full(t.size, self.scale * self.truncation + 1e-13 * self.scale)
        return val, err


def phi_star_decomposition(N: int, tol: float = 1e-8) -> Decomposition:
    """Split phi at alpha = 2N-1 into a convex-coefficient part and a finite correction."""
    if N < 2:
        raise DomainError("need N >= 2")
    scale = math.factorial(2 * N) / math.factorial(N - 1) ** 2
    # tail of sum a_m cos(m t)/m^2 beyond T is at most N^2/(2 T^2)
    T = int(math.ceil(math.sqrt(scale * N * N / tol)))
    T = max(T, 10 * N * N)
    seq = thm14_coefficients(N, T + 1)
    conv = convexify(seq)
    full = conv.full(seq)
    m = np.arange(1, T + 1, dtype=float)
    psi = full[1 : T + 1] / (m * m)
    count = N * N - 2
    if conv.N0 != count + 1:
        raise InvariantFailure(f"convexification starts at {conv.N0}, expected {count + 1}")
    k = np.arange(1, count + 1, dtype=float)
    corr = (seq.values[1 : count + 1] - full[1 : count + 1]) / (k * k)
    return Decomposition(N, conv, psi, corr, scale, N * N / (2.0 * T * T))
