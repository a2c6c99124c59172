"""Minimising the pair energy over pole configurations.

Two points: E(t) = 2 phi(t), scanned on a grid and refined with Brent.
n points: multistart Armijo gradient descent with the first angle pinned
at 0.  The descent runs on a quintic Hermite table of phi, phi', phi''
(node spacing pi/2048), which keeps each step cheap; the winning
configuration is then re-evaluated with the series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import optimize as sopt

from . import _kernels
from .errors import DomainError, NonConvergenceError
from .interaction import SpaceParams, cached_series, phi_prime_n2a3
from .norms import CircleConfig, config_energy_interaction, pair_gaps

__all__ = [
    "OptimizationResult",
    "LocalRun",
    "brent_min",
    "brent_root",
    "two_point_minimize",
    "npoint_minimize",
    "local_descent",
    "energy_gradient",
    "interaction_table",
]

TWO_PI = 2.0 * math.pi
TABLE_CELLS = 2048
_MIN_GAP = 1e-9


@dataclass(frozen=True)
class OptimizationResult:
    config: CircleConfig
    energy: float
    norm_sq: float
    n_starts: int
    converged: bool
    iterations: int
    equi_energy: float
    energy_err: float = 0.0

    @property
    def below_equidistribution(self) -> bool:
        return self.energy < self.equi_energy - max(1e-9, 2 * self.energy_err)


class LocalRun(NamedTuple):
    x: np.ndarray
    energy: float
    iterations: int
    converged: bool
    trace: np.ndarray


def brent_min(f, a: float, b: float, tol: float = 1e-10):
    """Local minimum of f on [a, b] by bounded Brent iteration -> (x, f(x))."""
    if not a < b:
        raise DomainError("need a < b")
    res = sopt.minimize_scalar(f, bounds=(a, b), method="bounded",
                               options={"xatol": tol, "maxiter": 200})
    if not res.success:
        raise NonConvergenceError("Brent minimisation hit the iteration cap",
                                  best=(float(res.x), float(res.fun)))
    return float(res.x), float(res.fun)


def brent_root(f, a: float, b: float, tol: float = 1e-14) -> float:
    """Root of f in [a, b] given a sign change."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return float(a)
    if fb == 0.0:
        return float(b)
    if fa * fb > 0:
        raise DomainError("f(a) and f(b) must have opposite signs")
    x, r = sopt.brentq(f, a, b, xtol=tol, maxiter=200, full_output=True, disp=False)
    if not r.converged:
        raise NonConvergenceError("root bracketing hit the iteration cap", best=float(x))
    return float(x)


def _phi_prime_values(p: SpaceParams, u: np.ndarray) -> np.ndarray:
    if p.N == 2 and p.alpha == 3.0:
        return np.array([phi_prime_n2a3(t) for t in u])
    v, _ = cached_series(p).evaluate(u, derivative=1)
    return v


def _phi_values(p: SpaceParams, u) -> np.ndarray:
    v, _ = cached_series(p).evaluate(u)
    return v


def two_point_minimize(p: SpaceParams) -> OptimizationResult:
    """argmin over t in (0, pi] of 2 phi(t): 256-point scan, Brent, then a root polish."""
    grid = math.pi * np.arange(1, 257) / 256
    vals = _phi_values(p, grid)
    cands = []
    for i in range(grid.size):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i + 1 < grid.size else vals[i - 1]  # mirror at pi
        if vals[i] <= left and vals[i] <= right:
            cands.append(i)
    evals = 0
    best = None
    for i in cands:
        lo = grid[i - 1] if i > 0 else 0.5 * grid[0]
        hi = grid[i + 1] if i + 1 < grid.size else TWO_PI - grid[i - 1]
        x, fx = brent_min(lambda t: float(_phi_values(p, [t])[0]), lo, hi)
        evals += 1
        x = _polish(p, x, lo, hi)
        if x > math.pi:
            x = TWO_PI - x
        fx = float(_phi_values(p, [x])[0])
        if best is None or fx < best[1]:
            best = (x, fx)
    if best is None:
        raise NonConvergenceError("no local minimum bracketed on the grid")
    x = best[0]
    cfg = CircleConfig.from_angles([0.0, x])
    e = config_energy_interaction(p, cfg)
    s = cached_series(p)
    phi0 = float(s.evaluate([0.0])[0][0])
    equi = config_energy_interaction(p, CircleConfig.equidistributed(2)).value
    return OptimizationResult(cfg, e.value, 2 * phi0 + e.value, len(cands), True, evals,
                              equi, e.err)


def _polish(p, x, lo, hi):
    # sharpen a Brent minimiser to a zero of phi' when one is bracketed nearby
    d = 1e-6
    a, b = max(lo, x - d), min(hi, x + d)
    if a <= 0.0 or b >= TWO_PI:
        return x
    fa, fb = _phi_prime_values(p, np.array([a, b]))
    if fa < 0 < fb:
        return brent_root(lambda t: float(_phi_prime_values(p, np.array([t]))[0]), a, b)
    return x


@lru_cache(maxsize=16)
def interaction_table(p: SpaceParams, cells: int = TABLE_CELLS):
    """(h, phi, phi', phi'') at t = i*pi/cells, i = 0..cells."""
    s = cached_series(p)
    t = math.pi * np.arange(cells + 1) / cells
    f, _ = s.evaluate(t)
    d1 = np.zeros_like(t)
    d2 = np.zeros_like(t)
    d1[1:], _ = s.evaluate(t[1:], derivative=1)
    d2[1:], _ = s.evaluate(t[1:], derivative=2)
    for arr in (f, d1, d2):
        arr.setflags(write=False)
    return math.pi / cells, f, d1, d2


def local_descent(p: SpaceParams, x0, max_iter: int = 5000, step_tol: float = 1e-10) -> LocalRun:
    """One Armijo descent from x0 (x0[0] is pinned)."""
    h, f, d1, d2 = interaction_table(p)
    x, e, it, conv, trace = _kernels.descent(np.asarray(x0, dtype=float), h, f, d1, d2,
                                             max_iter=max_iter, step_tol=step_tol,
                                             min_gap=_MIN_GAP)
    return LocalRun(x, float(e), int(it), conv, trace)


def _random_start(rng, n):
    while True:
        x = np.concatenate([[0.0], np.sort(rng.uniform(0.0, TWO_PI, n - 1))])
        gaps = np.diff(np.append(x, TWO_PI))
        if gaps.min() > _MIN_GAP:
            return x


def _canonical(x) -> CircleConfig:
    # the energy is invariant under t -> -t; report the lexicographically smaller mirror image
    a = CircleConfig.from_angles(x)
    b = CircleConfig.from_angles(-np.asarray(x))
    return min(a, b, key=lambda c: c.angles)


def npoint_minimize(p: SpaceParams, n: int, starts: int = 64, seed: int = 0,
                    max_iter: int = 5000) -> OptimizationResult:
    """Best of ``starts`` local descents from random configurations."""
    if n < 2:
        raise DomainError("need at least two points")
    if starts < 1:
        raise DomainError("need at least one start")
    children = np.random.SeedSequence(seed).spawn(starts)
    best = None
    best_any = None
    for idx, child in enumerate(children):
        rng = np.random.default_rng(child)
        run = local_descent(p, _random_start(rng, n), max_iter=max_iter)
        if best_any is None or run.energy < best_any.energy:
            best_any = run
        if run.converged and (best is None or run.energy < best.energy):
            best = run
    if best is None:
        raise NonConvergenceError("no start converged", best=best_any)
    cfg = _canonical(best.x)
    e = config_energy_interaction(p, cfg)
    phi0 = float(cached_series(p).evaluate([0.0])[0][0])
    equi = config_energy_interaction(p, CircleConfig.equidistributed(n)).value
    return OptimizationResult(cfg, e.value, n * phi0 + e.value, starts, True,
                              best.iterations, equi, e.err)


def energy_gradient(p: SpaceParams, c: CircleConfig) -> list:
    """dE/dt_j = 2 sum_{k != j} phi'(t_j - t_k)."""
    x = c.as_array()
    n = c.n
    if n == 1:
        return [0.0]
    gaps = pair_gaps(c)
    if np.any(np.minimum(gaps, TWO_PI - gaps) == 0.0):
        raise DomainError("coincident poles")
    j, k = np.triu_indices(n, 1)
    # gaps = t_k - t_j; phi'(t_j - t_k) = -phi'(gaps)
    d = _phi_prime_values(p, gaps)
    grad = np.zeros(n)
    np.add.at(grad, j, -2.0 * d)
    np.add.at(grad, k, 2.0 * d)
    del x
    return [float(g) for g in grad]
