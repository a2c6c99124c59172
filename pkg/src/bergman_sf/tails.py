"""Asymptotic tails of hypergeometric power series.

For a coefficient sequence with rational ratio

    c_{m+1} / c_m = prod_i (m - a_i) / prod_i (m - b_i)

the tail T(m0) = sum_{m >= m0} c_m z^m, |z| = 1, is written as
g(m0) c_{m0} z^{m0}, where g solves g(m) - z R(m) g(m+1) = 1.
g has an asymptotic expansion in u = 1/m: a plain power series when
z != 1, and m times one when z = 1 (which then needs algebraic decay
faster than 1/m).  The expansion coefficients are obtained by forward
substitution in a lower-triangular system whose matrix does not depend
on z, so one factorization serves a whole batch of angles.

The residual of the truncated expansion gives the error estimate.
Accuracy is excellent once m0 |1 - z| is a few dozen; callers choose
m0 accordingly.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = ["tail_sum", "decay_exponent", "DEFAULT_ORDER"]

DEFAULT_ORDER = 12
_EXTRA_ROWS = 3
_EPS = np.finfo(float).eps


def _gbinom(x: float, j: int) -> float:
    # generalized binomial coefficient, valid for any real x
    out = 1.0
    for i in range(j):
        out *= (x - i) / (i + 1)
    return out


def _ratio_series(num, den, length):
    # power series in u of prod(1 - a u) / prod(1 - b u)
    r = np.zeros(length + 1)
    r[0] = 1.0
    for a in num:
        r[1:] = r[1:] - a * r[:-1]
    for b in den:
        r = np.convolve(r, b ** np.arange(length + 1))[: length + 1]
    return r


def decay_exponent(num, den) -> float:
    """p such that c_m ~ const * m^(-p)."""
    return float(sum(num) - sum(den))


@lru_cache(maxsize=64)
def _operator(num: tuple, den: tuple, s: int, order: int):
    length = order + s + _EXTRA_ROWS
    r = _ratio_series(num, den, length)
    d = np.zeros((length + 1, order + 1))
    for n in range(length + 1):
        for k in range(min(n, order) + 1):
            d[n, k] = sum(r[i] * _gbinom(s - k, n - k - i) for i in range(n - k + 1))
    d.setflags(write=False)
    return d


def _solve_oscillating(d, z, one_minus_z, order):
    # rows n = 0..order: g_n (1 - z) = delta_{n0} + z * sum_{k<n} d[n,k] g_k
    g = np.zeros((order + 1, z.size), dtype=complex)
    inv = 1.0 / one_minus_z
    for n in range(order + 1):
        acc = z * (d[n, :n] @ g[:n]) if n else 0.0
        g[n] = ((1.0 if n == 0 else 0.0) + acc) * inv
    return g


def _solve_flat(d, order):
    # z = 1, g(m) = sum_k g_k u^(k-1); row n fixes g_{n-1}
    g = np.zeros(order + 1)
    for n in range(1, order + 2):
        rhs = (1.0 if n == 1 else 0.0) + d[n, : n - 1] @ g[: n - 1]
        g[n - 1] = -rhs / d[n, n - 1]
    return g


def tail_sum(num, den, anchor, m0, theta, order: int = DEFAULT_ORDER):
    """Estimate sum_{m >= m0} c_m exp(i m theta) and its error.

    Parameters
    ----------
    num, den : sequences of float
        Roots a_i and b_i of the coefficient ratio.
    anchor : array_like
        c_{m0}, broadcast against ``theta``.
    m0 : array_like of int
        First index of the tail, broadcast against ``theta``.
    theta : array_like
        Angles reduced to [0, 2pi).  theta == 0 selects the z = 1 branch.

    Returns
    -------
    values : complex ndarray
    errors : float ndarray
    """
    num = tuple(float(a) for a in num)
    den = tuple(float(b) for b in den)
    if len(num) != len(den):
        raise DomainError("ratio must have as many numerator as denominator roots")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m0 = np.broadcast_to(np.asarray(m0, dtype=float), theta.shape)
    anchor = np.broadcast_to(np.asarray(anchor, dtype=float), theta.shape)
    spread = max([abs(x) for x in num + den] + [1.0])
    if np.any(m0 < 4.0 * spread):
        raise DomainError("tail start too small for the asymptotic expansion")
    p = decay_exponent(num, den)
    u = 1.0 / m0
    out = np.zeros(theta.shape, dtype=complex)
    err = np.zeros(theta.shape)
    weight = 2.0 * m0 / max(order + p, 1.0)

    flat = theta == 0.0
    if np.any(flat):
        if p <= 1.0:
            raise DomainError("series does not converge at theta = 0")
        d = _operator(num, den, 1, order)
        g = _solve_flat(d, order)
        uf = u[flat]
        powers = uf[None, :] ** (np.arange(order + 1)[:, None] - 1.0)
        gv = g @ powers
        full = np.zeros(d.shape[0])
        full[: order + 1] = g
        resid = full - d @ g
        resid[1] -= 1.0
        rows = np.arange(order + 2, d.shape[0])
        r = np.abs(resid[rows]) @ (uf[None, :] ** (rows[:, None] - 1.0))
        val = gv * anchor[flat]
        out[flat] = val
        err[flat] = np.abs(anchor[flat]) * r * weight[flat] + 8 * _EPS * np.abs(val) * order

    osc = ~flat
    if np.any(osc):
        d = _operator(num, den, 0, order)
        th = theta[osc]
        z = np.exp(1j * th)
        # 1 - z without cancellation for small theta
        omz = 2.0 * np.sin(0.5 * th) ** 2 - 1j * np.sin(th)
        g = _solve_oscillating(d, z, omz, order)
        uo = u[osc]
        powers = uo[None, :] ** np.arange(order + 1)[:, None]
        gv = np.sum(g * powers, axis=0)
        rows = np.arange(order + 1, d.shape[0])
        resid = -z[None, :] * (d[rows] @ g)
        r = np.sum(np.abs(resid) * uo[None, :] ** rows[:, None], axis=0)
        phase = np.exp(1j * np.mod(m0[osc] * th, 2.0 * np.pi))
        val = gv * anchor[osc] * phase
        out[osc] = val
        # last term: rounding of the phase m0 * theta
        rounding = 4 * _EPS * np.abs(val) * (m0[osc] * th + 2 * order)
        err[osc] = np.abs(anchor[osc]) * r * weight[osc] + rounding
    return out, err
