"""Hot loops, compiled with numba when available.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  ``BERGMAN_SF_BACKEND=numpy`` in the
environment (or :func:`set_backend`) selects the fallback.  The choice
changes speed only; results agree to rounding.
"""
from __future__ import annotations

import contextlib
import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

BACKENDS = ("numba", "numpy")
_ENV_FLAG = "BERGMAN_SF_BACKEND"

_TWO_PI = 2.0 * math.pi


def _initial_backend():
    name = os.environ.get(_ENV_FLAG, "").strip().lower()
    if name == "numpy" or not HAS_NUMBA:
        return "numpy"
    return "numba"


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise ValueError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch backend (tests and benchmarks)."""
    old = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


# ---------------------------------------------------------------------------
# trigonometric sums  sum_{i < L_j} c[i] cos((start+i) theta_j)
# ---------------------------------------------------------------------------

def _trig_sum_py(coeffs, start, thetas, lengths, sine):
    # Reinsch-modified Clenshaw recurrence, one theta at a time.
    out = np.empty(thetas.shape[0])
    for j in range(thetas.shape[0]):
        th = thetas[j]
        c = math.cos(th)
        top = start + lengths[j] - 1
        y1 = 0.0  # y_{m+1}
        u = 0.0   # running difference (or sum) term
        if c >= 0.0:
            lam = -4.0 * math.sin(0.5 * th) ** 2
            for m in range(top, -1, -1):
                a = coeffs[m - start] if m >= start else 0.0
                u = a + lam * y1 + u
                y0 = u + y1
                if m == 0:
                    break
                y1 = y0
            if sine:
                out[j] = y1 * math.sin(th)
            else:
                out[j] = u - 0.5 * lam * y1
        else:
            mu = 4.0 * math.cos(0.5 * th) ** 2
            for m in range(top, -1, -1):
                a = coeffs[m - start] if m >= start else 0.0
                u = a + mu * y1 - u
                y0 = u - y1
                if m == 0:
                    break
                y1 = y0
            if sine:
                out[j] = y1 * math.sin(th)
            else:
                out[j] = u - 0.5 * mu * y1
    return out


def _trig_sum_np(coeffs, start, thetas, lengths, sine, chunk=2048):
    out = np.zeros(thetas.shape[0])
    fn = np.sin if sine else np.cos
    for length in np.unique(lengths):
        sel = np.nonzero(lengths == length)[0]
        th = thetas[sel]
        acc = np.zeros(sel.shape[0])
        for lo in range(0, int(length), chunk):
            hi = min(int(length), lo + chunk)
            m = np.arange(start + lo, start + hi, dtype=float)
            acc += fn(np.outer(th, m)) @ coeffs[lo:hi]
        out[sel] = acc
    return out


# ---------------------------------------------------------------------------
# power sums p_s = sum_k exp(i s theta_k), s = 1..M
# ---------------------------------------------------------------------------

def _power_sums_py(angles, M):
    re = np.zeros(M)
    im = np.zeros(M)
    for s in range(1, M + 1):
        a = 0.0
        b = 0.0
        for k in range(angles.shape[0]):
            t = s * angles[k]
            a += math.cos(t)
            b += math.sin(t)
        re[s - 1] = a
        im[s - 1] = b
    return re, im


def _power_sums_np(angles, M, chunk=4096):
    re = np.empty(M)
    im = np.empty(M)
    for lo in range(0, M, chunk):
        hi = min(M, lo + chunk)
        s = np.arange(lo + 1, hi + 1, dtype=float)
        ph = np.outer(s, angles)
        re[lo:hi] = np.cos(ph).sum(axis=1)
        im[lo:hi] = np.sin(ph).sum(axis=1)
    return re, im


# ---------------------------------------------------------------------------
# pair energy from a tabulated interaction function
# table: values, first and second derivatives at theta = i*h, i = 0..L, h = pi/L
# ---------------------------------------------------------------------------

def _table_eval_scalar(u, h, f, d1, d2):
    # value and derivative of the interpolant at u in [0, 2pi)
    sgn = 1.0
    if u > math.pi:
        u = _TWO_PI - u
        sgn = -1.0
    L = f.shape[0] - 1
    i = int(u / h)
    if i >= L:
        i = L - 1
    t = u / h - i
    if i == 0:
        # the function is not smooth at 0: quadratic through f0, f1, f1'
        f0 = f[0]
        f1 = f[1]
        b = h * d1[1] - (f1 - f0)
        a = (f1 - f0) - b
        val = f0 + t * (a + t * b)
        der = (a + 2.0 * b * t) / h
        return val, sgn * der
    f0 = f[i]
    f1 = f[i + 1]
    g0 = h * d1[i]
    g1 = h * d1[i + 1]
    k0 = h * h * d2[i]
    k1 = h * h * d2[i + 1]
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5
    h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5
    h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
    h3 = 0.5 * (t3 - 2.0 * t4 + t5)
    h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5
    h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5
    val = f0 * h0 + g0 * h1 + k0 * h2 + f1 * h5 + g1 * h4 + k1 * h3
    e0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4
    e1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4
    e2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4)
    e3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4)
    e4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4
    der = (f0 * e0 + g0 * e1 + k0 * e2 - f1 * e0 + g1 * e4 + k1 * e3) / h
    return val, sgn * der


def _table_energy_py(x, h, f, d1, d2):
    n = x.shape[0]
    grad = np.zeros(n)
    energy = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            u = (x[j] - x[k]) % _TWO_PI
            v, dv = _table_eval_scalar(u, h, f, d1, d2)
            energy += 2.0 * v
            grad[j] += 2.0 * dv
            grad[k] -= 2.0 * dv
    return energy, grad


def _table_energy_np(x, h, f, d1, d2):
    n = x.shape[0]
    jj, kk = np.triu_indices(n, 1)
    u = (x[jj] - x[kk]) % _TWO_PI
    sgn = np.where(u > math.pi, -1.0, 1.0)
    u = np.where(u > math.pi, _TWO_PI - u, u)
    L = f.shape[0] - 1
    i = np.minimum((u / h).astype(np.int64), L - 1)
    t = u / h - i
    i1 = i + 1
    f0, f1 = f[i], f[i1]
    g0, g1 = h * d1[i], h * d1[i1]
    k0, k1 = h * h * d2[i], h * h * d2[i1]
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    val = (f0 * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
           + g0 * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
           + k0 * 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5)
           + f1 * (10.0 * t3 - 15.0 * t4 + 6.0 * t5)
           + g1 * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
           + k1 * 0.5 * (t3 - 2.0 * t4 + t5))
    e0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4
    der = ((f0 - f1) * e0
           + g0 * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
           + k0 * 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4)
           + g1 * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
           + k1 * 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4)) / h
    first = i == 0
    if np.any(first):
        b = h * d1[1] - (f[1] - f[0])
        a = (f[1] - f[0]) - b
        tf = t[first]
        val[first] = f[0] + tf * (a + tf * b)
        der[first] = (a + 2.0 * b * tf) / h
    der = sgn * der
    grad = np.zeros(n)
    np.add.at(grad, jj, 2.0 * der)
    np.add.at(grad, kk, -2.0 * der)
    return 2.0 * val.sum(), grad


# ---------------------------------------------------------------------------
# gradient descent with Armijo backtracking on the tabulated energy
# ---------------------------------------------------------------------------

def _make_descent(energy):
    def descent(x0, h, f, d1, d2, max_iter, step_tol, min_gap, trace):
        # x0[0] is pinned; trace receives the accepted energies
        n = x0.shape[0]
        x = x0.copy()
        e, g = energy(x, h, f, d1, d2)
        trace[0] = e
        t = 0.05
        it = 0
        converged = False
        while it < max_iter:
            g[0] = 0.0
            gn2 = 0.0
            for j in range(n):
                gn2 += g[j] * g[j]
            gnorm = math.sqrt(gn2)
            if gnorm <= 1e-13:
                converged = True
                break
            t = min(2.0 * t, 1.0)
            accepted = False
            while t * gnorm > 0.1 * step_tol:
                xn = x - t * g
                for j in range(n):
                    xn[j] = xn[j] % _TWO_PI
                xn = np.sort(xn)
                ok = _TWO_PI - (xn[n - 1] - xn[0]) > min_gap
                for j in range(n - 1):
                    if xn[j + 1] - xn[j] <= min_gap:
                        ok = False
                if ok:
                    en, gnew = energy(xn, h, f, d1, d2)
                    if en <= e - 1e-4 * t * gn2:
                        accepted = True
                        break
                t *= 0.5
            if not accepted:
                # no descent possible above the step tolerance
                converged = True
                break
            it += 1
            x = xn
            e = en
            g = gnew
            trace[it] = e
            if t * gnorm <= step_tol:
                converged = True
                break
        return x, e, it, converged

    return descent


_descent_py = _make_descent(_table_energy_np)

if HAS_NUMBA:
    _trig_sum_nb = njit(cache=True)(_trig_sum_py)
    _power_sums_nb = njit(cache=True)(_power_sums_py)
    _table_eval_scalar_nb = njit(cache=True, inline="always")(_table_eval_scalar)

    @njit(cache=True)
    def _table_energy_nb(x, h, f, d1, d2):
        n = x.shape[0]
        grad = np.zeros(n)
        energy = 0.0
        for j in range(n):
            for k in range(j + 1, n):
                u = (x[j] - x[k]) % _TWO_PI
                v, dv = _table_eval_scalar_nb(u, h, f, d1, d2)
                energy += 2.0 * v
                grad[j] += 2.0 * dv
                grad[k] -= 2.0 * dv
        return energy, grad

    _descent_nb = njit(cache=True)(_make_descent(_table_energy_nb))


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------

def trig_sum(coeffs, start, thetas, lengths, sine=False):
    """sum_{i < lengths[j]} coeffs[i] * cos|sin((start + i) * thetas[j]).

    ``thetas`` must already be reduced to [0, 2pi).
    """
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    thetas = np.ascontiguousarray(thetas, dtype=float)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    if np.any(lengths > coeffs.shape[0]):
        raise ValueError("requested more terms than coefficients supplied")
    if _backend == "numba":
        return _trig_sum_nb(coeffs, int(start), thetas, lengths, bool(sine))
    return _trig_sum_np(coeffs, int(start), thetas, lengths, bool(sine))


def power_sums(angles, M):
    """Complex power sums p_1..p_M of the points exp(i angles)."""
    angles = np.ascontiguousarray(angles, dtype=float)
    if _backend == "numba":
        re, im = _power_sums_nb(angles, int(M))
    else:
        re, im = _power_sums_np(angles, int(M))
    return re + 1j * im


def table_energy(x, h, f, d1, d2):
    """Pair energy and gradient of the configuration x under the tabulated phi."""
    x = np.ascontiguousarray(x, dtype=float)
    if _backend == "numba":
        return _table_energy_nb(x, float(h), f, d1, d2)
    return _table_energy_np(x, float(h), f, d1, d2)


def descent(x0, h, f, d1, d2, max_iter=5000, step_tol=1e-10, min_gap=1e-9):
    """Armijo gradient descent on the tabulated energy, x0[0] pinned.

    Returns (x, energy, iterations, converged, trace) where ``trace`` holds
    the energy after each accepted step.
    """
    x0 = np.ascontiguousarray(x0, dtype=float)
    trace = np.empty(max_iter + 1)
    fn = _descent_nb if _backend == "numba" else _descent_py
    x, e, it, conv = fn(x0, float(h), f, d1, d2, int(max_iter), float(step_tol),
                        float(min_gap), trace)
    return x, e, it, bool(conv), trace[: it + 1].copy()
