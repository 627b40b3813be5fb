"""Young functions, their calculus, and growth pairs.

A Young function is an increasing convex function ``F`` on ``[0, inf)`` with
``F(0) = 0`` and ``F(t) -> inf``.  Three families are supported:

* ``power``:  ``F(t) = scale * t**p`` with ``p >= 1``,
* ``plog``:   ``F(t) = scale * t**p * (1 + log+ t)**q`` with ``p >= 1, q >= 0``
  (the L^p log L gauge; ``log+`` is the positive part of the logarithm),
* ``custom``: a monotone convex piecewise-linear interpolant on log-spaced
  knots, used both for user-supplied gauges and for numerically computed
  convex conjugates.

Everything here is pure and vectorized over numpy arrays; instances are
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "YoungFunction",
    "GrowthFunction",
    "GrowthPair",
    "DegenerateDualError",
    "young_from_dict",
    "growth_from_dict",
]


class DegenerateDualError(ValueError):
    """The convex conjugate is identically 0 / +inf (gauge grows sublinearly)."""


# ---------------------------------------------------------------------------
# Young functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class YoungFunction:
    """Evaluable convex gauge with derivative, inverse and conjugate.

    ``family`` is one of ``power``, ``plog``, ``custom``.  ``scale``
    multiplies the base shape; normalization divides by the value at 1 so the
    class (convexity, doubling behavior) is preserved.
    """

    family: str
    p: float = 1.0
    q: float = 0.0
    scale: float = 1.0
    knots: np.ndarray | None = field(default=None, repr=False)
    knot_values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in ("power", "plog", "custom"):
            raise ValueError(f"unknown Young family {self.family!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.family in ("power", "plog"):
            if self.p < 1:
                raise ValueError("power exponent p must be >= 1")
            if self.q < 0:
                raise ValueError("log exponent q must be >= 0")
        else:
            t = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.knot_values, dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise ValueError("custom family needs matching 1-d knot arrays")
            if np.any(t <= 0) or np.any(np.diff(t) <= 0):
                raise ValueError("knots must be positive and strictly increasing")
            if np.any(v < 0) or np.any(np.diff(v) < 0):
                raise ValueError("knot values must be nonnegative and nondecreasing")
            # slopes of the 0-anchored interpolant must be nondecreasing
            slopes = np.diff(np.concatenate(([0.0], v))) / np.diff(
                np.concatenate(([0.0], t))
            )
            if np.any(np.diff(slopes) < -1e-9 * np.maximum(slopes[1:], 1.0)):
                raise ValueError("knot values are not convex")
            object.__setattr__(self, "knots", t)
            object.__setattr__(self, "knot_values", v)

    # -- constructors --------------------------------------------------

    @staticmethod
    def power(p: float, scale: float = 1.0) -> "YoungFunction":
        return YoungFunction("power", p=float(p), scale=float(scale))

    @staticmethod
    def plog(p: float, q: float, scale: float = 1.0) -> "YoungFunction":
        """t^p (1 + log+ t)^q, the L^p log^q L gauge."""
        return YoungFunction("plog", p=float(p), q=float(q), scale=float(scale))

    @staticmethod
    def piecewise(knots, values) -> "YoungFunction":
        return YoungFunction("custom", knots=np.asarray(knots, float),
                             knot_values=np.asarray(values, float))

    @staticmethod
    def identity() -> "YoungFunction":
        return YoungFunction.power(1.0)

    # -- evaluation ----------------------------------------------------

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("Young functions are defined for t >= 0")
        if self.family == "power":
            out = self.scale * t ** self.p
        elif self.family == "plog":
            out = self.scale * t ** self.p * (1.0 + _logplus(t)) ** self.q
        else:
            out = self.scale * _interp_convex(t, self.knots, self.knot_values)
        return out if out.ndim else float(out)

    def derivative(self, t):
        """Right derivative; closed form for the parametric families."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("derivative defined for t >= 0")
        if self.family == "power":
            if self.p == 1.0:
                out = np.full_like(t, self.scale)
            else:
                out = self.scale * self.p * t ** (self.p - 1.0)
        elif self.family == "plog":
            lo = 1.0 + _logplus(t)
            base = np.where(t > 0, t, 1.0) ** (self.p - 1.0)
            if self.p == 1.0:
                base = np.ones_like(t)
            head = self.p * base * lo ** self.q
            tail = np.where(t >= 1.0, self.q * base * lo ** max(self.q - 1.0, 0.0)
                            if self.q > 0 else 0.0, 0.0)
            out = self.scale * (head + tail)
            if self.p > 1.0:
                out = np.where(t == 0.0, 0.0, out)
        else:
            t_ext = np.concatenate(([0.0], self.knots))
            v_ext = np.concatenate(([0.0], self.knot_values))
            slopes = np.diff(v_ext) / np.diff(t_ext)
            idx = np.searchsorted(self.knots, t, side="right")
            idx = np.minimum(idx, slopes.size - 1)
            out = self.scale * slopes[idx]
        return out if out.ndim else float(out)

    def inverse(self, y):
        """Solve eval(t) = y by closed form or bracketed bisection."""
        y = np.asarray(y, dtype=float)
        if np.any(y < 0):
            raise ValueError("inverse defined for y >= 0")
        if self.family == "power":
            out = (y / self.scale) ** (1.0 / self.p)
        else:
            out = _bisect_increasing(self.__call__, y)
        return out if out.ndim else float(out)

    # -- structure -----------------------------------------------------

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self(1.0) - 1.0) <= tol

    def normalize(self) -> "YoungFunction":
        """Divide values by eval(1); rejects gauges degenerate on [0, 1]."""
        f1 = self(1.0)
        if f1 <= 0:
            raise ValueError("cannot normalize: value at 1 is zero")
        if self.family == "custom":
            return YoungFunction.piecewise(self.knots, self.knot_values * (self.scale / f1))
        return replace(self, scale=self.scale / f1)

    def complementary(self, n_knots: int = 541) -> "YoungFunction":
        """Convex conjugate sup_s (s t - F(s)).

        Closed form for the power family; otherwise a numeric Legendre
        transform evaluated on log-spaced knots and returned as a custom
        piecewise gauge (chords of a convex function stay convex and never
        undershoot, so Young's inequality is preserved).
        """
        if self.family == "power":
            if self.p == 1.0:
                raise DegenerateDualError("conjugate of a linear gauge is degenerate")
            pp = self.p / (self.p - 1.0)
            dual_scale = (1.0 / pp) * (self.scale * self.p) ** (-1.0 / (self.p - 1.0))
            return YoungFunction.power(pp, scale=dual_scale)
        knots = np.geomspace(1e-9, 1e9, n_knots)
        vals = np.array([_legendre_point(self.__call__, t) for t in knots])
        return YoungFunction.piecewise(knots, vals)

    def doubling_constant(self, ladder: np.ndarray | None = None) -> float:
        """sup of eval(2t)/eval(t) over a log ladder in (0, 1e8]."""
        if ladder is None:
            ladder = np.geomspace(1e-8, 1e8, 257)
        num = self(2.0 * ladder)
        den = self(ladder)
        mask = den > 0
        if not np.any(mask):
            return math.inf
        return float(np.max(num[mask] / den[mask]))

    def derivative_ratio(self, t):
        """Diagnostic t F'(t) / F(t), the local power of the gauge.

        For t^p this is identically p.  Proof sketches that replace F'(z)
        by F(z)/z implicitly assume this ratio is bounded; it is exposed
        here rather than assumed.
        """
        t = np.asarray(t, dtype=float)
        val = np.asarray(self(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(val > 0, t * np.asarray(self.derivative(t)) / val, np.nan)
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        if self.family == "custom":
            return {"family": "custom",
                    "knots": [float(x) for x in self.knots],
                    "values": [float(self.scale * v) for v in self.knot_values]}
        return {"family": self.family, "p": self.p, "q": self.q, "scale": self.scale}


def young_from_dict(spec: dict) -> YoungFunction:
    fam = spec.get("family")
    if fam == "power":
        return YoungFunction.power(spec["p"], scale=spec.get("scale", 1.0))
    if fam == "plog":
        return YoungFunction.plog(spec["p"], spec.get("q", 0.0), scale=spec.get("scale", 1.0))
    if fam == "custom":
        return YoungFunction.piecewise(spec["knots"], spec["values"])
    raise ValueError(f"unknown Young family {fam!r}")


# ---------------------------------------------------------------------------
# Growth functions and pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthFunction:
    """Positive density on [0, inf) with g(0) = 0, used in pairs (a, b).

    Families: ``power`` (scale * t**exponent with exponent > 0), ``zero``
    (identically 0, a limiting diagnostic case), and ``custom`` (callable).
    """

    family: str
    exponent: float = 1.0
    scale: float = 1.0
    fn: object | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in ("power", "zero", "custom"):
            raise ValueError(f"unknown growth family {self.family!r}")
        if self.family == "power" and self.exponent <= 0:
            raise ValueError("power growth needs exponent > 0 so that g(0) = 0")
        if self.family == "custom" and not callable(self.fn):
            raise ValueError("custom growth needs a callable")

    @staticmethod
    def power(exponent: float, scale: float = 1.0) -> "GrowthFunction":
        return GrowthFunction("power", exponent=float(exponent), scale=float(scale))

    @staticmethod
    def zero() -> "GrowthFunction":
        return GrowthFunction("zero")

    @staticmethod
    def custom(fn) -> "GrowthFunction":
        return GrowthFunction("custom", fn=fn)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "power":
            out = self.scale * t ** self.exponent
        elif self.family == "zero":
            out = np.zeros_like(t)
        else:
            out = np.asarray(self.fn(t), dtype=float)
        return out if out.ndim else float(out)

    def antiderivative(self, t):
        """Integral from 0 to t; closed form for power, quadrature otherwise."""
        t = np.asarray(t, dtype=float)
        if self.family == "power":
            out = self.scale * t ** (self.exponent + 1.0) / (self.exponent + 1.0)
        elif self.family == "zero":
            out = np.zeros_like(t)
        else:
            from scipy.integrate import quad
            flat = np.atleast_1d(t).ravel()
            vals = np.array([quad(lambda s: float(self.fn(s)), 0.0, x,
                                  limit=200)[0] if x > 0 else 0.0 for x in flat])
            out = vals.reshape(np.shape(t))
        return out if out.ndim else float(out)

    def is_nondecreasing(self, ladder: np.ndarray | None = None, tol: float = 1e-12) -> bool:
        if ladder is None:
            ladder = np.geomspace(1e-8, 1e8, 257)
        v = np.asarray(self(ladder))
        return bool(np.all(np.diff(v) >= -tol * np.maximum(np.abs(v[:-1]), 1.0)))

    def to_dict(self) -> dict:
        if self.family == "custom":
            raise ValueError("custom growth functions are not serializable")
        return {"family": self.family, "exponent": self.exponent, "scale": self.scale}


def growth_from_dict(spec: dict) -> GrowthFunction:
    fam = spec.get("family")
    if fam == "power":
        return GrowthFunction.power(spec["exponent"], scale=spec.get("scale", 1.0))
    if fam == "zero":
        return GrowthFunction.zero()
    raise ValueError(f"unknown growth family {fam!r}")


@dataclass(frozen=True)
class GrowthPair:
    """Pair (a, b) with antiderivatives phi, psi.

    ``b`` must be nondecreasing with b(0) = 0 and b -> inf, which makes psi a
    Young function.  ``a`` only needs to vanish at 0, so phi is exposed as a
    plain callable; ``phi_young``/``psi_young`` wrap the antiderivatives as
    gauges when that makes sense.
    """

    a: GrowthFunction
    b: GrowthFunction

    def phi(self, t):
        return self.a.antiderivative(t)

    def psi(self, t):
        return self.b.antiderivative(t)

    def psi_young(self) -> YoungFunction:
        return _antiderivative_young(self.b)

    def phi_young(self) -> YoungFunction:
        if not self.a.is_nondecreasing():
            raise ValueError("phi is a Young function only for nondecreasing a")
        return _antiderivative_young(self.a)

    def validate(self, tol: float = 1e-9) -> dict:
        """Check g(0+) ~ 0 and monotonicity of b on sampled ladders."""
        a0 = float(np.asarray(self.a(1e-12)))
        b0 = float(np.asarray(self.b(1e-12)))
        ok_zero = abs(a0) <= tol and abs(b0) <= tol
        ok_mono = self.b.is_nondecreasing()
        b_big = float(np.asarray(self.b(1e8)))
        return {"ok": ok_zero and ok_mono and b_big > 1.0,
                "a_at_zero": a0, "b_at_zero": b0,
                "b_nondecreasing": ok_mono, "b_at_1e8": b_big}


def _antiderivative_young(g: GrowthFunction) -> YoungFunction:
    if g.family == "power":
        return YoungFunction.power(g.exponent + 1.0,
                                   scale=g.scale / (g.exponent + 1.0))
    if g.family == "zero":
        raise ValueError("antiderivative of the zero growth is not a Young function")
    knots = np.geomspace(1e-9, 1e9, 361)
    vals = np.asarray(g.antiderivative(knots))
    return YoungFunction.piecewise(knots, vals)


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------

def _logplus(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t > 1.0, np.log(np.maximum(t, 1.0)), 0.0)


def _interp_convex(t: np.ndarray, knots: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolant anchored at (0, 0), extended by the last
    slope above the final knot."""
    t_ext = np.concatenate(([0.0], knots))
    v_ext = np.concatenate(([0.0], values))
    out = np.interp(t, t_ext, v_ext)
    last_slope = (v_ext[-1] - v_ext[-2]) / (t_ext[-1] - t_ext[-2])
    high = t > t_ext[-1]
    if np.any(high):
        out = np.where(high, v_ext[-1] + last_slope * (t - t_ext[-1]), out)
    return out


def _bisect_increasing(fn, y, rtol: float = 1e-10, maxiter: int = 200):
    """Vectorized inverse of an increasing function with fn(0) = 0.

    Brackets by geometric growth, then bisects to |fn(t) - y| <= rtol-level
    accuracy in t.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    lo = np.zeros_like(y)
    hi = np.ones_like(y)
    for _ in range(400):
        need = np.asarray(fn(hi)) < y
        if not np.any(need):
            break
        lo = np.where(need, hi, lo)
        hi = np.where(need, hi * 2.0, hi)
    else:
        raise ArithmeticError("could not bracket inverse; function grows too slowly")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        below = np.asarray(fn(mid)) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= rtol * np.maximum(hi, 1e-300)):
            break
    out = 0.5 * (lo + hi)
    out = np.where(y == 0.0, 0.0, out)
    return out


def _legendre_point(fn, t: float, s0: float = 1e-8, rtol: float = 1e-10) -> float:
    """sup_s (s t - fn(s)) for convex fn via bracket growth + golden section.

    The objective is concave in s, so once the difference quotient of fn
    exceeds t the maximizer is bracketed and unimodal search is exact.
    """
    if t <= 0.0:
        return 0.0
    s_prev, s = 0.0, s0
    f_prev, f = 0.0, float(np.asarray(fn(s0)))
    for _ in range(2400):
        s_next = s * 2.0
        f_next = float(np.asarray(fn(s_next)))
        if (f_next - f) / (s_next - s) > t:
            break
        s_prev, f_prev, s, f = s, f, s_next, f_next
    else:
        raise DegenerateDualError("slope never exceeds t: conjugate is degenerate")
    a, b = s_prev, s * 2.0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc = c * t - float(np.asarray(fn(c)))
    gd = d * t - float(np.asarray(fn(d)))
    while (b - a) > rtol * max(b, 1e-300):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = c * t - float(np.asarray(fn(c)))
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = d * t - float(np.asarray(fn(d)))
    s_star = 0.5 * (a + b)
    return max(s_star * t - float(np.asarray(fn(s_star))), 0.0)
