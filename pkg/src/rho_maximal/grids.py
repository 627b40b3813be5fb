"""Grids, cubes, Riemann integration, shifted dyadic grids and stopping-time
selection: the geometric substrate every operator is built on.

Conventions that the whole package relies on:

* The domain is the hyperrectangle ``[-L, L]^d`` split into ``N`` cells per
  axis; grid points are the cell centers.  Sampled functions are extended by
  zero outside the domain.
* A cube is stored by center and half-side ``s``.  Its *radius* is the
  half-diagonal ``r = sqrt(d) * s`` (so the damping factors ``(1 + r/rho)``
  see the half-diagonal, not the half-side), and its measure is always the
  analytic ``(2 s)^d``.
* Point membership is strict (open cubes).  With cell-center grids this
  undercounts: the Riemann average over a cube is then a sub-probability
  average, which keeps Jensen-type per-cube inequalities valid on the grid.
* Cube integrals are differences of a single precomputed prefix-sum table,
  so a scalar query and the vectorized all-centers sweep produce bit-equal
  floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .young import YoungFunction

__all__ = [
    "Domain",
    "SampledFunction",
    "Cube",
    "CubeFamily",
    "ShiftedDyadicGrids",
    "integrate",
    "cube_average",
    "dyadic_children",
    "find_containing_dyadic",
    "cz_decomposition",
]


# ---------------------------------------------------------------------------
# Domain and sampled functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Uniform cell-center grid on [-L, L]^d, N (a power of two, >= 8) cells
    per axis."""

    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.L <= 0:
            raise ValueError("half-width L must be positive")
        if self.N < 8 or (self.N & (self.N - 1)) != 0:
            raise ValueError("N must be a power of two, at least 8")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @cached_property
    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def points(self) -> np.ndarray:
        """All grid points, shape (N^d, d), C order (last axis fastest)."""
        grids = np.meshgrid(*([self.axis] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    def refine(self) -> "Domain":
        return Domain(self.d, self.L, 2 * self.N)

    def point(self, idx) -> np.ndarray:
        return np.array([self.axis[i] for i in np.atleast_1d(np.asarray(idx))])

    def to_dict(self) -> dict:
        return {"d": self.d, "L": self.L, "N": self.N}

    @staticmethod
    def from_dict(spec: dict) -> "Domain":
        return Domain(int(spec["d"]), float(spec["L"]), int(spec["N"]))


@dataclass(frozen=True)
class Cube:
    """Axis-parallel cube: center, half-side s; radius is the half-diagonal."""

    center: tuple
    half_side: float

    def __post_init__(self):
        c = tuple(float(x) for x in np.atleast_1d(np.asarray(self.center, float)))
        object.__setattr__(self, "center", c)
        if self.half_side <= 0:
            raise ValueError("half-side must be positive")

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def side(self) -> float:
        return 2.0 * self.half_side

    @property
    def radius(self) -> float:
        """Half-diagonal sqrt(d) * s, the radius the damping factors see."""
        return math.sqrt(self.d) * self.half_side

    @property
    def measure(self) -> float:
        return (2.0 * self.half_side) ** self.d

    def contains_point(self, x, strict: bool = True) -> bool:
        x = np.atleast_1d(np.asarray(x, float))
        dist = np.abs(x - np.asarray(self.center))
        return bool(np.all(dist < self.half_side)) if strict else bool(
            np.all(dist <= self.half_side))

    def contains_cube(self, other: "Cube", tol: float = 0.0) -> bool:
        """Closed-hull containment other ⊆ self."""
        c0, c1 = np.asarray(self.center), np.asarray(other.center)
        return bool(np.all(np.abs(c1 - c0) + other.half_side
                           <= self.half_side + tol))

    def intersects(self, other: "Cube") -> bool:
        c0, c1 = np.asarray(self.center), np.asarray(other.center)
        return bool(np.all(np.abs(c1 - c0) < self.half_side + other.half_side))

    def dilate(self, factor: float) -> "Cube":
        return Cube(self.center, factor * self.half_side)

    def classify(self, rho) -> str:
        """subcritical / critical / supercritical against rho at the center."""
        rc = float(np.asarray(rho(np.asarray(self.center))))
        r = self.radius
        if abs(r - rc) <= 1e-12 * max(rc, 1.0):
            return "critical"
        return "subcritical" if r < rc else "supercritical"


@dataclass(frozen=True)
class SampledFunction:
    """Values on the grid of a Domain, zero outside.

    The prefix-sum table is built once on first use; all cube integrals are
    differences of its entries.
    """

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.domain.shape:
            raise ValueError(f"values shape {v.shape} != grid {self.domain.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", v)

    @cached_property
    def prefix(self) -> np.ndarray:
        """Padded cumulative-sum table, shape (N+1,)*d."""
        p = self.values
        for ax in range(self.domain.d):
            p = np.cumsum(p, axis=ax)
            pad = [(0, 0)] * self.domain.d
            pad[ax] = (1, 0)
            p = np.pad(p, pad)
        return p

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.min(self.values) >= 0.0)

    @property
    def is_compactly_supported_inside(self) -> bool:
        """Support stays at distance >= L/4 from the boundary."""
        support = np.abs(self.values) > 0
        if not np.any(support):
            return True
        idx = np.argwhere(support)
        coords = self.domain.axis[idx]
        return bool(np.max(np.abs(coords)) <= 0.75 * self.domain.L)

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.domain, np.abs(self.values))

    @staticmethod
    def from_callable(domain: Domain, fn) -> "SampledFunction":
        pts = domain.points
        vals = np.asarray(fn(pts), dtype=float).reshape(domain.shape)
        return SampledFunction(domain, vals)


# ---------------------------------------------------------------------------
# Cube integrals
# ---------------------------------------------------------------------------

def _index_range(domain: Domain, lo: float, hi: float) -> tuple:
    """Grid indices i with lo < axis[i] < hi (strict membership)."""
    a = int(np.searchsorted(domain.axis, lo, side="right"))
    b = int(np.searchsorted(domain.axis, hi, side="left"))
    return a, max(b, a)


def _box_sum(prefix: np.ndarray, lo_idx, hi_idx):
    """Inclusion-exclusion difference of the prefix table over [lo, hi).

    Works for scalar indices and for broadcastable index arrays; the
    expression (and hence the float rounding) is identical either way.
    """
    d = prefix.ndim
    if d == 1:
        return prefix[hi_idx] - prefix[lo_idx]
    if d == 2:
        l0, l1 = lo_idx
        h0, h1 = hi_idx
        return prefix[h0, h1] - prefix[l0, h1] - prefix[h0, l1] + prefix[l0, l1]
    l0, l1, l2 = lo_idx
    h0, h1, h2 = hi_idx
    return (prefix[h0, h1, h2] - prefix[l0, h1, h2]
            - prefix[h0, l1, h2] + prefix[l0, l1, h2]
            - prefix[h0, h1, l2] + prefix[l0, h1, l2]
            + prefix[h0, l1, l2] - prefix[l0, l1, l2])


def integrate(f: SampledFunction, cube: Cube) -> float:
    """Riemann sum h^d * sum of values at grid points strictly inside the
    cube; f is zero outside the domain.  The cube measure is not used here:
    callers divide by the analytic (2s)^d."""
    dom = f.domain
    if cube.d != dom.d:
        raise ValueError("cube dimension does not match domain")
    lo_idx, hi_idx = [], []
    for ax in range(dom.d):
        a, b = _index_range(dom, cube.center[ax] - cube.half_side,
                            cube.center[ax] + cube.half_side)
        lo_idx.append(a)
        hi_idx.append(b)
    if dom.d == 1:
        total = _box_sum(f.prefix, lo_idx[0], hi_idx[0])
    else:
        total = _box_sum(f.prefix, tuple(lo_idx), tuple(hi_idx))
    return float(total * dom.cell_volume)


def cube_average(f: SampledFunction, cube: Cube) -> float:
    """(1/|Q|) * integral over Q with the analytic measure."""
    return integrate(f, cube) / cube.measure


def cube_values(f: SampledFunction, cube: Cube) -> np.ndarray:
    """Flat array of grid values strictly inside the cube (possibly empty)."""
    dom = f.domain
    sl = []
    for ax in range(dom.d):
        a, b = _index_range(dom, cube.center[ax] - cube.half_side,
                            cube.center[ax] + cube.half_side)
        sl.append(slice(a, b))
    return f.values[tuple(sl)].ravel()


def grid_points_inside(domain: Domain, cube: Cube) -> int:
    counts = 1
    for ax in range(domain.d):
        a, b = _index_range(domain, cube.center[ax] - cube.half_side,
                            cube.center[ax] + cube.half_side)
        counts *= (b - a)
    return counts


# ---------------------------------------------------------------------------
# Cube family (the finite index set of every supremum)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CubeFamily:
    """All grid points as admissible centers x a dyadic half-side ladder.

    The ladder starts at h/2 (single-point cubes) and doubles until it covers
    the half-diagonal sqrt(d) * L of the domain.  ``boundary_policy`` is
    either ``zero_extend`` (cubes may stick out; f is zero there) or
    ``inside_only`` (only cubes fully inside the domain, used for weight
    constants where zero extension would be destructive).
    """

    domain: Domain
    boundary_policy: str = "zero_extend"

    def __post_init__(self):
        if self.boundary_policy not in ("zero_extend", "inside_only"):
            raise ValueError("unknown boundary policy")

    @cached_property
    def half_sides(self) -> np.ndarray:
        target = math.sqrt(self.domain.d) * self.domain.L
        s = self.domain.h / 2.0
        ladder = [s]
        while ladder[-1] < target:
            ladder.append(ladder[-1] * 2.0)
        return np.array(ladder)

    def window_halfwidth(self, k: int) -> int:
        """Number of index offsets j != 0 per side with |j| h < s_k."""
        ratio = self.half_sides[k] / self.domain.h   # = 2**(k-1), exact
        return int(math.ceil(ratio) - 1) if float(ratio).is_integer() else int(ratio)

    def center_slices(self, k: int) -> tuple:
        """Index range of admissible centers at ladder level k."""
        if self.boundary_policy == "zero_extend":
            return (0, self.domain.N)
        s = self.half_sides[k]
        lo = self.domain.L * -1.0 + s
        hi = self.domain.L - s
        a = int(np.searchsorted(self.domain.axis, lo, side="left"))
        b = int(np.searchsorted(self.domain.axis, hi, side="right"))
        return (a, max(b, a))

    def cubes_at_level(self, k: int):
        """Iterate (center_index_tuple, Cube) at ladder level k, C order."""
        s = float(self.half_sides[k])
        a, b = self.center_slices(k)
        axis = self.domain.axis
        for idx in np.ndindex(*([b - a] * self.domain.d)):
            full = tuple(i + a for i in idx)
            center = tuple(float(axis[i]) for i in full)
            yield full, Cube(center, s)

    def __iter__(self):
        for k in range(len(self.half_sides)):
            yield from self.cubes_at_level(k)


# ---------------------------------------------------------------------------
# Dyadic machinery
# ---------------------------------------------------------------------------

def dyadic_children(cube: Cube) -> list:
    """2^d congruent cubes tiling the cube exactly."""
    s = cube.half_side / 2.0
    out = []
    for signs in np.ndindex(*([2] * cube.d)):
        offset = np.array([(2 * b - 1) * s for b in signs])
        out.append(Cube(tuple(np.asarray(cube.center) + offset), s))
    return out


@dataclass(frozen=True)
class ShiftedDyadicGrids:
    """3^d dyadic grids whose per-level one-third shifts alternate in sign.

    Within one grid two cubes are nested or disjoint and each level tiles
    space; for every cube Q some grid contains a cube Q0 ⊇ Q with
    ℓ(Q0) <= 3 ℓ(Q).
    """

    d: int

    @property
    def n_grids(self) -> int:
        return 3 ** self.d

    def shift_vector(self, grid_index: int) -> tuple:
        digits = []
        g = grid_index
        for _ in range(self.d):
            digits.append(g % 3)
            g //= 3
        return tuple(digits)

    def cube_containing(self, grid_index: int, level: int, point) -> Cube:
        """The level-`level` cube (side 2**level) of the given grid that
        contains the point; half-open boxes [start, start + side)."""
        side = 2.0 ** level
        sign = -1.0 if (level % 2) else 1.0
        shifts = self.shift_vector(grid_index)
        x = np.atleast_1d(np.asarray(point, float))
        starts = []
        for ax in range(self.d):
            sh = sign * shifts[ax] * side / 3.0
            starts.append(sh + side * math.floor((x[ax] - sh) / side))
        center = tuple(st + side / 2.0 for st in starts)
        return Cube(center, side / 2.0)

    def level_cubes_intersecting(self, grid_index: int, level: int,
                                 window: Cube) -> list:
        """All level cubes of one grid meeting a window cube."""
        side = 2.0 ** level
        out = []
        base = self.cube_containing(grid_index, level,
                                    np.asarray(window.center) - window.half_side)
        steps = int(math.ceil(2.0 * window.half_side / side)) + 1
        origin = np.asarray(base.center) - side / 2.0
        for offs in np.ndindex(*([steps + 1] * self.d)):
            start = origin + side * np.asarray(offs)
            cand = Cube(tuple(start + side / 2.0), side / 2.0)
            if cand.intersects(window):
                out.append(cand)
        return out


def find_containing_dyadic(grids: ShiftedDyadicGrids, cube: Cube,
                           tol: float = 1e-9) -> tuple:
    """Locate (grid index, dyadic cube Q0) with Q ⊆ Q0 and ℓ(Q0) <= 3 ℓ(Q).

    Searches, per grid, the unique level with 2^k in (3ℓ/2, 3ℓ], testing the
    grid cube that contains Q's center; one of the grids must hit.
    """
    ell = cube.side
    k = math.ceil(math.log2(1.5 * ell))
    # guard float fuzz so that 2^k really lies in (3ℓ/2, 3ℓ]
    while 2.0 ** k > 3.0 * ell * (1.0 + 1e-12):
        k -= 1
    while 2.0 ** k <= 1.5 * ell * (1.0 - 1e-12):
        k += 1
    slack = tol * 2.0 ** k
    for gi in range(grids.n_grids):
        cand = grids.cube_containing(gi, k, cube.center)
        if cand.contains_cube(cube, tol=slack):
            return gi, cand
    raise RuntimeError("no shifted dyadic grid contains the cube: construction bug")


# ---------------------------------------------------------------------------
# Stopping-time (Calderon-Zygmund style) selection
# ---------------------------------------------------------------------------

def cz_decomposition(f: SampledFunction, root: Cube, lam: float,
                     eta: YoungFunction) -> list:
    """Maximal dyadic descendants Q of the root with ||f||_{eta,Q} > lam.

    Requires ||f||_{eta,root} <= lam (the top-level overshoot case is the
    caller's branch).  Recursion bisects down to single-grid-point cubes; the
    selected cubes are pairwise disjoint, and their union is exactly the
    superlevel set of the root-local dyadic maximal at height lam on the grid.
    """
    from .orlicz import luxemburg_average

    if lam <= 0:
        raise ValueError("lambda must be positive")
    if luxemburg_average(f, root, eta) > lam:
        raise ValueError("root cube already exceeds the threshold")
    selected = []
    stack = [root]
    while stack:
        cube = stack.pop()
        for child in dyadic_children(cube):
            if grid_points_inside(f.domain, child) == 0:
                continue
            if luxemburg_average(f, child, eta) > lam:
                selected.append(child)
            elif grid_points_inside(f.domain, child) > 1:
                stack.append(child)
    return selected


def dyadic_tree(domain: Domain, root: Cube) -> list:
    """All dyadic descendants of the root (including it) holding at least
    one grid point."""
    out = []
    stack = [root]
    while stack:
        cube = stack.pop()
        n = grid_points_inside(domain, cube)
        if n == 0:
            continue
        out.append(cube)
        if n > 1:
            stack.extend(dyadic_children(cube))
    return out
