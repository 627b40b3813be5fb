"""Critical radius functions and the critical-cube covering.

A critical radius function is a positive function rho whose relative
oscillation is polynomially controlled: there are constants C0, N0 >= 1 with

    C0^-1 rho(x) (1 + |x-y|/rho(x))^-N0
        <= rho(y) <= C0 rho(x) (1 + |x-y|/rho(x))^(N0/(N0+1))

for all x, y.  Two families are built in: constant rho, and the
inverse-power archetype rho(x) = c / (1 + |x|).  For the latter with c = 1
the sharp constant at N0 = 1 is C0 = 2/sqrt(3) ~ 1.1547 (attained by a unit
vector against the origin), so the family declares the safe pair
(C0, N0) = (1.2, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import Cube, Domain

__all__ = [
    "CriticalRadius",
    "CriticalCovering",
    "validate",
    "validate_pairs",
    "pair_slack",
    "search_constants",
    "critical_covering",
    "overlap_profile",
    "enlarged_critical_cube",
    "supercritical_shell_bounds_check",
    "rho_from_dict",
]


@dataclass(frozen=True)
class CriticalRadius:
    """Evaluable rho with its declared oscillation constants (C0, N0)."""

    family: str
    c: float = 1.0
    C0: float = 1.0
    N0: float = 1.0
    fn: object | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in ("constant", "inverse_power", "custom"):
            raise ValueError(f"unknown critical radius family {self.family!r}")
        if self.family != "custom" and self.c <= 0:
            raise ValueError("scale c must be positive")
        if self.C0 < 1 or self.N0 < 1:
            raise ValueError("constants C0, N0 must be >= 1")
        if self.family == "custom" and not callable(self.fn):
            raise ValueError("custom family needs a callable")

    @staticmethod
    def constant(c: float = 1.0) -> "CriticalRadius":
        return CriticalRadius("constant", c=float(c), C0=1.0, N0=1.0)

    @staticmethod
    def inverse_power(c: float = 1.0) -> "CriticalRadius":
        # declared constants: safe margin over the sharp C0 = 2/sqrt(3)
        return CriticalRadius("inverse_power", c=float(c), C0=1.2, N0=1.0)

    @staticmethod
    def custom(fn, C0: float, N0: float) -> "CriticalRadius":
        return CriticalRadius("custom", fn=fn, C0=float(C0), N0=float(N0))

    def __call__(self, points):
        """Evaluate at points of shape (..., d) (the last axis is space)."""
        x = np.asarray(points, dtype=float)
        if self.family == "constant":
            out = np.full(x.shape[:-1] if x.ndim > 1 else (), self.c)
            if x.ndim <= 1:
                return float(self.c)
            return out
        if self.family == "inverse_power":
            norm = np.sqrt(np.sum(np.atleast_2d(x) ** 2, axis=-1)) if x.ndim > 1 \
                else math.sqrt(float(np.sum(x ** 2)))
            out = self.c / (1.0 + norm)
            return out if np.ndim(out) else float(out)
        out = np.asarray(self.fn(x), dtype=float)
        return out if out.ndim else float(out)

    def on_grid(self, domain: Domain) -> np.ndarray:
        """rho at every grid point, shaped like the grid."""
        vals = np.asarray(self(domain.points), dtype=float)
        return vals.reshape(domain.shape)

    def to_dict(self) -> dict:
        if self.family == "custom":
            raise ValueError("custom critical radius functions are not serializable")
        return {"family": self.family, "c": self.c, "C0": self.C0, "N0": self.N0}


def rho_from_dict(spec: dict) -> CriticalRadius:
    fam = spec.get("family")
    if fam == "constant":
        rho = CriticalRadius.constant(spec.get("c", 1.0))
    elif fam == "inverse_power":
        rho = CriticalRadius.inverse_power(spec.get("c", 1.0))
    else:
        raise ValueError(f"unknown critical radius family {fam!r}")
    if "C0" in spec or "N0" in spec:
        rho = CriticalRadius(rho.family, c=rho.c,
                             C0=float(spec.get("C0", rho.C0)),
                             N0=float(spec.get("N0", rho.N0)))
    return rho


# ---------------------------------------------------------------------------
# Validation of the oscillation inequality
# ---------------------------------------------------------------------------

def pair_slack(rho: CriticalRadius, x, y, C0: float, N0: float) -> dict:
    """Multiplicative violation factors of both bounds for the ordered pair
    (x, y); a slack <= 1 means the bound holds."""
    x = np.atleast_1d(np.asarray(x, float))
    y = np.atleast_1d(np.asarray(y, float))
    rx, ry = float(rho(x)), float(rho(y))
    dist = float(np.linalg.norm(y - x))
    base = 1.0 + dist / rx
    lower = rx / (C0 * base ** N0)
    upper = C0 * rx * base ** (N0 / (N0 + 1.0))
    return {
        "lower_bound": lower,
        "upper_bound": upper,
        "rho_y": ry,
        "lower_slack": lower / ry,   # needs <= 1
        "upper_slack": ry / upper,   # needs <= 1
    }


def validate_pairs(rho: CriticalRadius, pairs: np.ndarray,
                   C0: float | None = None, N0: float | None = None) -> dict:
    """Check both oscillation bounds on explicit ordered pairs.

    ``pairs``: array of shape (m, 2, d).  Returns ok, the worst pair and the
    worst multiplicative slack (<= 1 means every bound held).  Failure is a
    report, never an exception.
    """
    C0 = rho.C0 if C0 is None else float(C0)
    N0 = rho.N0 if N0 is None else float(N0)
    pairs = np.asarray(pairs, dtype=float)
    xs, ys = pairs[:, 0, :], pairs[:, 1, :]
    rx = np.atleast_1d(np.asarray(rho(xs), dtype=float))
    ry = np.atleast_1d(np.asarray(rho(ys), dtype=float))
    dist = np.linalg.norm(ys - xs, axis=-1)
    base = 1.0 + dist / rx
    lower_slack = rx / (C0 * base ** N0) / ry
    upper_slack = ry / (C0 * rx * base ** (N0 / (N0 + 1.0)))
    slack = np.maximum(lower_slack, upper_slack)
    worst = int(np.argmax(slack))
    return {
        "ok": bool(slack[worst] <= 1.0 + 1e-12),
        "worst_slack": float(slack[worst]),
        "worst_pair": (tuple(xs[worst]), tuple(ys[worst])),
        "n_pairs": int(pairs.shape[0]),
        "C0": C0,
        "N0": N0,
    }


def validate(rho: CriticalRadius, points: np.ndarray,
             C0: float | None = None, N0: float | None = None) -> dict:
    """Check the oscillation inequality on all ordered pairs of a sample."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        raise ValueError("need at least two sample points")
    m = pts.shape[0]
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    mask = ii != jj
    pairs = np.stack([pts[ii[mask]], pts[jj[mask]]], axis=1)
    return validate_pairs(rho, pairs, C0=C0, N0=N0)


def search_constants(rho: CriticalRadius, points: np.ndarray,
                     C0_ladder=None, N0_ladder=None) -> dict:
    """Scan a small (C0, N0) lattice; return the feasible pair with the
    smallest C0 (ties broken by smaller N0)."""
    C0_ladder = np.asarray(C0_ladder if C0_ladder is not None
                           else [1.0, 1.1, 1.2, 1.5, 2.0, 3.0, 5.0])
    N0_ladder = np.asarray(N0_ladder if N0_ladder is not None
                           else [1.0, 2.0, 3.0])
    for c0 in C0_ladder:
        for n0 in N0_ladder:
            rep = validate(rho, points, C0=float(c0), N0=float(n0))
            if rep["ok"]:
                return {"found": True, "C0": float(c0), "N0": float(n0),
                        "report": rep}
    return {"found": False}


# ---------------------------------------------------------------------------
# Critical covering (greedy selection in scan order)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalCovering:
    """Deterministic greedy covering by critical cubes Q(x_j, rho(x_j)).

    Cube radii follow the half-diagonal convention, so a cube of radius
    rho(x_j) has half-side rho(x_j)/sqrt(d).
    """

    domain: Domain
    centers: np.ndarray          # (k, d) in selection (scan) order
    radii: np.ndarray            # rho at the centers

    @property
    def cubes(self) -> list:
        sq = math.sqrt(self.domain.d)
        return [Cube(tuple(c), float(r) / sq)
                for c, r in zip(self.centers, self.radii)]

    def covers_all_grid_points(self) -> bool:
        return bool(np.all(_coverage_counts(self, 1.0) >= 1))


def critical_covering(rho: CriticalRadius, domain: Domain) -> CriticalCovering:
    """Greedy lexicographic scan: select a grid point iff no previously
    selected critical cube already covers it.  Every grid point ends up
    covered (selected points cover themselves)."""
    covered = np.zeros(domain.shape, dtype=bool)
    axis = domain.axis
    sq = math.sqrt(domain.d)
    centers, radii = [], []
    h = domain.h
    for idx in np.ndindex(*domain.shape):
        if covered[idx]:
            continue
        center = np.array([axis[i] for i in idx])
        r = float(rho(center))
        centers.append(center)
        radii.append(r)
        s = r / sq
        sl = []
        for ax in range(domain.d):
            lo = int(np.searchsorted(axis, center[ax] - s, side="right"))
            hi = int(np.searchsorted(axis, center[ax] + s, side="left"))
            sl.append(slice(lo, max(hi, lo)))
        covered[tuple(sl)] = True
        covered[idx] = True   # single-point guard if s < h/2
    return CriticalCovering(domain, np.array(centers), np.array(radii))


def _coverage_counts(cov: CriticalCovering, sigma: float) -> np.ndarray:
    counts = np.zeros(cov.domain.shape, dtype=np.int64)
    axis = cov.domain.axis
    sq = math.sqrt(cov.domain.d)
    for c, r in zip(cov.centers, cov.radii):
        s = sigma * float(r) / sq
        sl = []
        empty = False
        for ax in range(cov.domain.d):
            lo = int(np.searchsorted(axis, c[ax] - s, side="right"))
            hi = int(np.searchsorted(axis, c[ax] + s, side="left"))
            if hi <= lo:
                empty = True
                break
            sl.append(slice(lo, hi))
        if not empty:
            counts[tuple(sl)] += 1
    return counts


def overlap_profile(cov: CriticalCovering, sigmas) -> dict:
    """Max overlap count of the dilated cubes per dilation, plus the
    log-log least-squares growth exponent."""
    sigmas = np.asarray(sigmas, dtype=float)
    if np.any(sigmas < 1.0):
        raise ValueError("dilations must be >= 1")
    counts = np.array([int(np.max(_coverage_counts(cov, s))) for s in sigmas])
    if sigmas.size >= 2 and np.ptp(np.log(sigmas)) > 0:
        A = np.vstack([np.log(sigmas), np.ones_like(sigmas)]).T
        sol, *_ = np.linalg.lstsq(A, np.log(np.maximum(counts, 1)), rcond=None)
        n1 = float(sol[0])
        c_fit = float(math.exp(sol[1]))
    else:
        n1, c_fit = 0.0, float(counts[0])
    return {"sigmas": sigmas, "max_counts": counts, "N1": n1, "C": c_fit}


# ---------------------------------------------------------------------------
# Enlarged cubes and supercritical shells
# ---------------------------------------------------------------------------

def enlarged_critical_cube(rho: CriticalRadius, x_j, d: int | None = None) -> Cube:
    """The dilation R_j = Q(x_j, C_rho rho(x_j)) with
    C_rho = sqrt(n) (2^(N0+2) C0^2 + 1): any cube of subcritical-or-critical
    radius meeting the critical cube at x_j is contained in R_j."""
    x_j = np.atleast_1d(np.asarray(x_j, float))
    n = d if d is not None else x_j.size
    c_rho = math.sqrt(n) * (2.0 ** (rho.N0 + 2.0) * rho.C0 ** 2 + 1.0)
    r = c_rho * float(rho(x_j))
    return Cube(tuple(x_j), r / math.sqrt(n))


def supercritical_shell_bounds_check(rho: CriticalRadius, x_j, cube: Cube,
                                     k: int) -> dict:
    """For a cube in the k-th supercritical shell around the critical cube at
    x_j (radius between b^(k-1) and b^k times rho at its own center, with
    b = 4^N0, and meeting that critical cube), check the two-sided radius
    comparability with C1 = 4^N0 C0 and the containment in C2 d^k Q_j with
    d = b^(N0+1), C2 = 4 sqrt(n) C1."""
    if k < 1:
        raise ValueError("shell index k must be >= 1")
    x_j = np.atleast_1d(np.asarray(x_j, float))
    n = x_j.size
    b = 4.0 ** rho.N0
    r_q = cube.radius
    rho_q = float(rho(np.asarray(cube.center)))
    rho_j = float(rho(x_j))
    if not (b ** (k - 1) * rho_q < r_q <= b ** k * rho_q):
        raise ValueError(f"cube is not in shell {k}: radius {r_q}, "
                         f"rho at center {rho_q}")
    q_j = Cube(tuple(x_j), rho_j / math.sqrt(n))
    if not cube.intersects(q_j):
        raise ValueError("cube does not meet the critical cube at x_j")
    c1 = b * rho.C0
    lower = rho_j / (c1 * b ** (rho.N0 * k))
    upper = c1 * b ** (rho.N0 * k) * rho_j
    dd = b ** (rho.N0 + 1.0)
    c2 = 4.0 * math.sqrt(n) * c1
    big = q_j.dilate(c2 * dd ** k)
    contained = big.contains_cube(cube, tol=1e-12 * big.half_side)
    ok = lower <= rho_q <= upper and contained
    return {"ok": bool(ok), "lower": lower, "upper": upper,
        "rho_center": rho_q, "contained": bool(contained),
        "C1": c1, "C2": c2, "b": b, "d": dd}
