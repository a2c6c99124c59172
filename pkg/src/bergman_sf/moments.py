"""Power sums of points on the circle and the moment-constrained set W_n.

W_n (for degree N) consists of n distinct unimodular points whose power
sums p_m vanish for m = 1..N^2-2.  A regular q-gon has p_m = 0 exactly
when q does not divide m, so unions of rotated regular q-gons with
q >= N^2-1 lie in W_n; the sampler below draws from that family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DomainError
from .interaction import SpaceParams
from .norms import CircleConfig, config_energy_interaction, pair_gaps

__all__ = [
    "PowerSums",
    "Thm14Check",
    "power_sums",
    "in_Wn",
    "sample_Wn_structured",
    "thm14_verify",
    "pair_cosine_sum",
    "powersum_lower_bound_check",
]

TWO_PI = 2.0 * math.pi
_MIN_GAP = 1e-9


@dataclass(frozen=True, eq=False)
class PowerSums:
    values: np.ndarray  # p_1..p_M
    n: int

    @property
    def M(self) -> int:
        return self.values.size

    def __getitem__(self, s: int) -> complex:
        """p_s for 1 <= s <= M."""
        if not 1 <= s <= self.M:
            raise IndexError(s)
        return complex(self.values[s - 1])


class Thm14Check(tuple):
    """(energy, equi_energy, holds); the moment residual rides along as an attribute."""

    def __new__(cls, energy, equi_energy, holds, moment_residual):
        self = super().__new__(cls, (energy, equi_energy, holds))
        self.moment_residual = moment_residual
        return self

    energy = property(lambda self: self[0])
    equi_energy = property(lambda self: self[1])
    holds = property(lambda self: self[2])


def power_sums(c: CircleConfig, M: int) -> PowerSums:
    if M < 1:
        raise DomainError("M must be positive")
    vals = _kernels.power_sums(c.as_array(), M)
    vals.setflags(write=False)
    return PowerSums(vals, c.n)


def _min_circular_gap(c: CircleConfig) -> float:
    if c.n < 2:
        return math.inf
    x = c.as_array()
    gaps = np.diff(np.append(x, x[0] + TWO_PI))
    return float(gaps.min())


def in_Wn(c: CircleConfig, N: int, tol: float = 1e-9) -> bool:
    """Distinct points with |p_m| <= tol for m = 1..N^2-2."""
    if N < 2:
        raise DomainError("W_n is defined for N >= 2")
    if _min_circular_gap(c) <= 0.0:
        return False
    top = N * N - 2
    ps = power_sums(c, top).values
    return bool(np.all(np.abs(ps) <= tol))


def sample_Wn_structured(n: int, N: int, seed: int) -> CircleConfig:
    """Union of n/q independently rotated regular q-gons, q the least divisor >= N^2-1."""
    if N < 2 or n < 1:
        raise DomainError("need N >= 2 and n >= 1")
    need = N * N - 1
    qs = [q for q in range(need, n + 1) if n % q == 0]
    if not qs:
        raise DomainError(f"n = {n} has no divisor q >= N^2-1 = {need}")
    q = qs[0]
    rng = np.random.default_rng(seed)
    base = TWO_PI * np.arange(q) / q
    for _ in range(100):
        rot = rng.uniform(0.0, TWO_PI / q, size=n // q)
        c = CircleConfig.from_angles((rot[:, None] + base[None, :]).ravel())
        if _min_circular_gap(c) >= _MIN_GAP:
            return c
    raise DomainError("could not draw a configuration with distinct points")


def pair_cosine_sum(c: CircleConfig, m: int) -> float:
    """sum over ordered pairs j != k of cos(m (t_j - t_k))."""
    return 2.0 * math.fsum(np.cos(m * pair_gaps(c)))


@lru_cache(maxsize=64)
def _equi_energy(p: SpaceParams, n: int) -> float:
    return config_energy_interaction(p, CircleConfig.equidistributed(n)).value


def thm14_verify(p: SpaceParams, c: CircleConfig) -> Thm14Check:
    """Compare the pair energy of a W_n configuration with the equidistributed one.

    Also reports max_m |sum_{j!=k} cos(m(t_j - t_k)) + n| over the
    constrained m, which vanishes because the left side is |p_m|^2 - n.
    """
    if not p.is_critical:
        raise DomainError("the comparison is made at alpha = 2N - 1")
    if not in_Wn(c, p.N):
        raise DomainError("configuration is not in W_n")
    energy = config_energy_interaction(p, c).value
    equi = _equi_energy(p, c.n)
    resid = max(abs(pair_cosine_sum(c, m) + c.n) for m in range(1, p.N * p.N - 1))
    return Thm14Check(energy, equi, bool(energy >= equi - 1e-9), resid)


def powersum_lower_bound_check(c: CircleConfig, N: int):
    """(lhs, rhs, holds) for sum_{s=1}^{2nN} |p_s|^2 >= n (2nN - n + 1)/2."""
    if N < 1:
        raise DomainError("N must be positive")
    n = c.n
    M = 2 * n * N
    ps = power_sums(c, M).values
    lhs = math.fsum(ps.real ** 2 + ps.imag ** 2)
    rhs = n * (M - n + 1) / 2.0
    return lhs, rhs, bool(lhs >= rhs - 1e-9)
