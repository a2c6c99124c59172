"""Named numeric checks grouped into suites, used by ``bergman-sf verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .interaction import (
    SpaceParams,
    cached_series,
    phi_closed_n2a3,
    phi_quadrature,
    phi_series,
    stationarity_n2a3,
)
from .moments import power_sums, powersum_lower_bound_check, sample_Wn_structured, thm14_verify
from .norms import CircleConfig, asymptotic_limit_constant, psi_norm_sq
from .optimize import brent_root, npoint_minimize, two_point_minimize
from .sequences import (
    RealSequencePrefix,
    bari_positivity_check,
    convexify,
    thm14_coefficients,
    threshold_check,
)

__all__ = ["Check", "SUITES", "run_suite", "closed_values_n2a3"]

SQ3 = math.sqrt(3.0)
LN2 = math.log(2.0)
P23 = SpaceParams(2, 3.0)


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    got: float
    tol: float
    relation: str = "approx"  # approx: |got-expected| <= tol; lt: got < expected - tol; ...

    @property
    def passed(self) -> bool:
        g, e, t = self.got, self.expected, self.tol
        if not math.isfinite(g):
            return False
        if self.relation == "approx":
            return abs(g - e) <= t
        if self.relation == "lt":
            return g < e - t
        if self.relation == "ge":
            return g >= e - t
        raise ValueError(self.relation)


def closed_values_n2a3() -> dict:
    """Known exact values of phi for N=2, alpha=3."""
    return {
        0.0: 6.0,
        math.pi: 96 * LN2 - 66,
        math.pi / 2: -30 + 12 * math.pi - 12 * LN2,
        math.pi / 3: -12 + 2 * math.pi * SQ3,
        2 * math.pi / 3: -48 + 7 * math.pi * SQ3 + 9 * math.log(3.0),
        math.pi / 6: (-48 + 18 * (1 + SQ3) + (15 - 12 * SQ3) * math.log(2 - SQ3)
                      - 2.5 * math.pi * (3 * SQ3 - 4)),
    }


def _phi(t):
    return phi_series(cached_series(P23), t).value


def _big_phi(t):
    return 2.0 * (2.0 * _phi(t) + _phi(2 * t))


def _values():
    out = []
    labels = {0.0: "0", math.pi: "pi", math.pi / 2: "pi/2", math.pi / 3: "pi/3",
              2 * math.pi / 3: "2pi/3", math.pi / 6: "pi/6"}
    for t, exact in closed_values_n2a3().items():
        lab = labels[t]
        out.append(Check(f"phi_series(2,3,{lab})", exact, _phi(t), 1e-8))
        out.append(Check(f"phi_quadrature(2,3,{lab})", exact, phi_quadrature(P23, t).value, 1e-6))
        if t > 0:
            out.append(Check(f"phi_closed_log_form({lab})", exact, phi_closed_n2a3(t), 1e-6))
    return out


def _counterexample():
    root = brent_root(stationarity_n2a3, 0.5, 1.5)
    two = two_point_minimize(P23)
    tmin = two.config.angles[1]
    three = npoint_minimize(P23, 3)
    return [
        Check("phi(pi/2) < phi(pi)", _phi(math.pi), _phi(math.pi / 2), 0.0, "lt"),
        Check("Phi(pi/6) < Phi(pi/3)", _big_phi(math.pi / 3), _big_phi(math.pi / 6), 0.0, "lt"),
        Check("Phi(pi/3) < Phi(2pi/3)", _big_phi(2 * math.pi / 3), _big_phi(math.pi / 3), 0.0, "lt"),
        Check("phi(2pi/3) - phi(pi/3)", -36 + 5 * math.pi * SQ3 + 9 * math.log(3.0),
              _phi(2 * math.pi / 3) - _phi(math.pi / 3), 1e-6),
        Check("stationarity root on [0.5, 1.5]", 0.9198, root, 2e-3),
        Check("two-point argmin", 0.9198, tmin, 2e-3),
        Check("phi at two-point argmin", -1.14963, two.energy / 2, 5e-4),
        Check("two-point energy below 2 phi(pi)", two.equi_energy, two.energy, 1.0, "lt"),
        Check("three-point energy below Phi(2pi/3)", three.equi_energy, three.energy, 1.0, "lt"),
        Check("N=1 two-point argmin", math.pi, two_point_minimize(SpaceParams(1, 1.0)).config.angles[1], 1e-6),
    ]


def _convexity():
    out = [Check(f"threshold N={N}", N * N - 1, threshold_check(N), 0.0) for N in range(2, 7)]
    seq = thm14_coefficients(2, 20000)
    res = convexify(seq)
    out.append(Check("convexify N=2: N0", 3, res.N0, 0.0))
    for k, want in enumerate((1.0, 0.9, 0.8)):
        out.append(Check(f"convexify N=2: head[{k}]", want, res.modified[k], 1e-15))
    full = RealSequencePrefix(tuple(res.full(seq)))
    out.append(Check("convexified N=2: min second difference", 0.0, float(full.delta2().min()), 1e-15, "ge"))
    out.append(Check("Bari positivity, convexified N=2", 0.0, bari_positivity_check(full, 10_000), 1e-8, "ge"))
    return out


def _norms():
    psi1 = psi_norm_sq(P23, 1).value
    psi2 = psi_norm_sq(P23, 2).value
    lim = asymptotic_limit_constant(P23)
    scaled = psi_norm_sq(P23, 1000).value
    return [
        Check("||Psi_1||^2 (2,3)", 6.0, psi1, 1e-9),
        Check("||Psi_2||^2 (2,3)", 192 * LN2 - 120, psi2, 1e-9),
        Check("limit constant (2,3)", 4 * math.pi ** 2, lim, 1e-12),
        Check("limit constant (1,1)", math.pi ** 2 / 3, asymptotic_limit_constant(SpaceParams(1, 1.0)), 1e-12),
        Check("scaled norm n=1000 vs limit", 1.0, scaled / lim, 0.05),
    ]


def _moments():
    out = []
    tri = CircleConfig.equidistributed(3)
    lhs, rhs, _ = powersum_lower_bound_check(tri, 2)
    out.append(Check("power-sum bound, 3-gon lhs", 36.0, lhs, 1e-9))
    out.append(Check("power-sum bound, 3-gon rhs", 15.0, rhs, 0.0))
    out.append(Check("3-gon p_3", 3.0, power_sums(tri, 3)[3].real, 1e-12))
    for n in (6, 9):
        worst = math.inf
        for seed in range(25):
            e, equi, _ = thm14_verify(P23, sample_Wn_structured(n, 2, seed))
            worst = min(worst, e - equi)
        out.append(Check(f"W_n energy - equidistributed, n={n} (25 samples)", 0.0, worst, 1e-9, "ge"))
    return out


SUITES: dict[str, tuple[Callable[[], list], ...]] = {
    "values": (_values,),
    "counterexample": (_counterexample,),
    "convexity": (_convexity,),
    "norms": (_norms,),
    "moments": (_moments,),
}
SUITES["paper"] = tuple(f for k in ("values", "counterexample", "convexity", "norms", "moments")
                        for f in SUITES[k])


def run_suite(name: str) -> list:
    if name not in SUITES:
        raise KeyError(name)
    out = []
    for f in SUITES[name]:
        out.extend(f())
    return out

