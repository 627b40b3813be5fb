"""The Dini-type integral condition coupling a gauge to a growth pair.

For a growth pair (a, b) and a gauge eta, the condition asks for a constant
C with

    int_0^t a(s)/s * eta'(t/s) ds  <=  C b(C t)    for every t > 0.

The substitution u = t/s turns the left side into

    I(t) = int_1^inf a(t/u) eta'(u) / u du,

which regularizes the s -> 0 endpoint; the raw s-form has a singular-looking
endpoint and is never integrated directly.  For power growth a(s) = s^(p-1)
this reduces to I(t) = t^(p-1) * int_1^inf eta'(u) u^-p du, the classical
tail integral that separates bounded from unbounded maximal behavior.

Divergence is detected heuristically from the growth of partial integrals
across doublings of the truncation; the closed-form families calibrate the
heuristic and t = 0 is excluded from the grids (both sides vanish there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .young import GrowthFunction, GrowthPair, YoungFunction

__all__ = [
    "DiniReport",
    "dini_integral",
    "dini_condition_check",
    "power_tail_integral",
    "DIVERGES",
]

DIVERGES = "DIVERGES"

_REL_CONVERGED = 1e-9
_REL_DIVERGING = 1e-3
_U_SUSPECT = 1e8


def _tail_integral(g, u_start: float = 1.0) -> tuple:
    """Integrate g over [u_start, inf) by doubling segments.

    Returns (value, status) where status is "converged" or DIVERGES.  The
    integral is declared divergent when the relative increment stays above
    1e-3 across three consecutive doublings past u = 1e8.
    """
    total = 0.0
    u = u_start
    small_streak = 0
    big_streak = 0
    for _ in range(220):
        seg, _err = quad(g, u, 2.0 * u, limit=200)
        total += seg
        u *= 2.0
        rel = abs(seg) / max(abs(total), 1e-300)
        if rel <= _REL_CONVERGED:
            small_streak += 1
            if small_streak >= 2:
                return total, "converged"
        else:
            small_streak = 0
        if u > _U_SUSPECT:
            if rel > _REL_DIVERGING:
                big_streak += 1
                if big_streak >= 3:
                    return math.inf, DIVERGES
            else:
                big_streak = 0
    return math.inf, DIVERGES


def dini_integral(a: GrowthFunction, eta: YoungFunction, t: float):
    """I(t) in the substituted form; returns (value, status)."""
    if t <= 0:
        raise ValueError("t must be positive")
    if a.family == "zero":
        return 0.0, "converged"

    def integrand(u):
        return float(np.asarray(a(t / u))) * float(np.asarray(eta.derivative(u))) / u

    return _tail_integral(integrand)


def power_tail_integral(eta: YoungFunction, p: float):
    """int_1^inf eta'(u) u^-p du, the reduction of the integral condition
    under the power pair a = b = t^(p-1); returns (value, status)."""
    if p <= 1:
        raise ValueError("p must exceed 1")

    def integrand(u):
        return float(np.asarray(eta.derivative(u))) * u ** (-p)

    return _tail_integral(integrand)


@dataclass(frozen=True)
class DiniReport:
    t_grid: np.ndarray = field(repr=False)
    integrals: np.ndarray = field(repr=False)
    diverged: bool
    constant: float | None
    verdict: str                 # "OK" or "FAIL"
    bracket: tuple

    def to_dict(self) -> dict:
        return {
            "t_grid": [float(x) for x in self.t_grid],
            "integrals": [None if not math.isfinite(v) else float(v)
                          for v in self.integrals],
            "diverged": self.diverged,
            "constant": self.constant,
            "verdict": self.verdict,
            "bracket": list(self.bracket),
        }


def dini_condition_check(pair: GrowthPair, eta: YoungFunction,
                         t_grid=None, c_bracket=(2.0 ** -10, 2.0 ** 20),
                         rel_tol: float = 0.01) -> DiniReport:
    """Search the minimal admissible constant on a log t-grid.

    The predicate P(C) = [I(t) <= C b(C t) for all grid t] is monotone in C
    because b is nondecreasing, so bisection applies.  Any divergent I(t)
    fails the condition outright.
    """
    if t_grid is None:
        t_grid = np.geomspace(1e-4, 1e4, 64)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0):
        raise ValueError("the t-grid must be positive (t = 0 is vacuous)")
    vals = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        v, status = dini_integral(pair.a, eta, float(t))
        if status == DIVERGES:
            vals[i:] = math.inf
            return DiniReport(t_grid, vals, True, None, "FAIL", tuple(c_bracket))
        vals[i] = v

    def holds(c):
        rhs = c * np.asarray(pair.b(c * t_grid), dtype=float)
        return bool(np.all(vals <= rhs * (1.0 + 1e-12)))

    lo, hi = c_bracket
    if not holds(hi):
        return DiniReport(t_grid, vals, False, None, "FAIL", tuple(c_bracket))
    if holds(lo):
        return DiniReport(t_grid, vals, False, float(lo), "OK", tuple(c_bracket))
    while hi / lo > 1.0 + rel_tol:
        mid = math.sqrt(lo * hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return DiniReport(t_grid, vals, False, float(hi), "OK", tuple(c_bracket))
