"""Maximal operators over discrete cube and ball families.

All suprema run over a fixed finite family (grid-point centers x a dyadic
half-side ladder), which makes every computed operator a lower bound of its
continuum counterpart.  Cross-operator inequalities are therefore always
checked with both sides over the identical family, where the per-cube
derivations transfer exactly.  This is the central correctness convention of
the package.

Performance: plain averages go through prefix-sum tables (O(1) per cube) and
sliding-window maxima; Luxemburg averages need a per-cube bisection, which is
vectorized across all centers of one ladder level at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .grids import Cube, CubeFamily, Domain, SampledFunction, _box_sum, dyadic_tree
from .orlicz import luxemburg_average, luxemburg_values
from .radius import CriticalRadius
from .young import YoungFunction

__all__ = [
    "OperatorSpec",
    "hl_maximal",
    "orlicz_maximal",
    "local_global_split",
    "localized_maximal",
    "dyadic_localized_maximal",
    "centered_ball_maximal",
    "uncentered_ball_maximal",
    "pointwise_power_bound_check",
    "pointwise_product_bound_check",
    "shifted_dyadic_control_check",
    "indicator_ball_decay_check",
    "ball_indicator",
]

_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


@dataclass(frozen=True)
class OperatorSpec:
    """Declarative description of a maximal operator for configs."""

    kind: str                      # hl | orlicz | centered-ball | localized | ...
    sigma: float = 0.0
    eta: YoungFunction | None = None

    def __post_init__(self):
        kinds = ("hl", "orlicz", "centered-ball", "localized",
                 "dyadic-localized", "local-part", "global-part")
        if self.kind not in kinds:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be finite and >= 0")
        if self.kind != "hl" and self.eta is None and self.kind in (
                "orlicz", "centered-ball", "localized", "dyadic-localized"):
            raise ValueError(f"{self.kind} operator needs a gauge eta")


def _damping(rho_grid: np.ndarray, radius: float, sigma: float) -> np.ndarray:
    if sigma == 0.0:
        return np.ones_like(rho_grid)
    return (1.0 + radius / rho_grid) ** (-sigma)


def _window_max(arr: np.ndarray, w: int) -> np.ndarray:
    if w == 0:
        return arr
    return ndimage.maximum_filter(arr, size=2 * w + 1,
                                  mode="constant", cval=-np.inf)


def _level_box_averages(f: SampledFunction, w: int, measure: float) -> np.ndarray:
    """Cube averages of |f| for every center at one ladder level, computed
    from the same prefix table (and the same float expressions) as a scalar
    ``integrate`` call."""
    dom = f.domain
    n = dom.N
    idx = np.arange(n)
    lo = np.maximum(idx - w, 0)
    hi = np.minimum(idx + w + 1, n)
    prefix = f.prefix
    if dom.d == 1:
        sums = _box_sum(prefix, lo, hi)
    elif dom.d == 2:
        sums = _box_sum(prefix, (lo[:, None], lo[None, :]),
                        (hi[:, None], hi[None, :]))
    else:
        sums = _box_sum(prefix,
                        (lo[:, None, None], lo[None, :, None], lo[None, None, :]),
                        (hi[:, None, None], hi[None, :, None], hi[None, None, :]))
    integrals = sums * dom.cell_volume
    return integrals / measure


def hl_maximal(f: SampledFunction, sigma: float, rho: CriticalRadius,
               family: CubeFamily | None = None) -> SampledFunction:
    """Damped Hardy-Littlewood maximal function: at each grid point the max
    over family cubes containing it of (1 + r/rho(center))^-sigma times the
    cube average of |f|."""
    family = family or CubeFamily(f.domain)
    dom = f.domain
    absf = f.abs()
    rho_grid = rho.on_grid(dom)
    out = np.zeros(dom.shape)
    for k, s in enumerate(family.half_sides):
        w = family.window_halfwidth(k)
        measure = (2.0 * s) ** dom.d
        avg = _level_box_averages(absf, w, measure)
        radius = math.sqrt(dom.d) * s
        level = avg * _damping(rho_grid, radius, sigma)
        np.maximum(out, _window_max(level, w), out=out)
    return SampledFunction(dom, out)


def _level_luxemburg(f_abs: np.ndarray, dom: Domain, w: int, measure: float,
                     eta: YoungFunction, chunk_rows: int = 0) -> np.ndarray:
    """Luxemburg average over the level-cube at every center."""
    if w == 0:
        vals = f_abs.reshape(-1, 1)
        lux = luxemburg_values(vals, measure, dom.cell_volume, eta)
        return lux.reshape(dom.shape)
    padded = np.pad(f_abs, w)
    view = sliding_window_view(padded, (2 * w + 1,) * dom.d)
    n = dom.N
    wtot = (2 * w + 1) ** dom.d
    if chunk_rows <= 0:
        # cap the materialized window matrix around ~64 MB
        chunk_rows = max(1, int(8e6 / max(wtot * n ** (dom.d - 1), 1)))
    out = np.empty(dom.shape)
    for start in range(0, n, chunk_rows):
        stop = min(start + chunk_rows, n)
        block = np.ascontiguousarray(view[start:stop]).reshape(-1, wtot)
        lux = luxemburg_values(block, measure, dom.cell_volume, eta)
        out[start:stop] = lux.reshape((stop - start,) + dom.shape[1:])
    return out


def orlicz_maximal(f: SampledFunction, eta: YoungFunction, sigma: float,
                   rho: CriticalRadius,
                   family: CubeFamily | None = None) -> SampledFunction:
    """Damped maximal function built on Luxemburg averages instead of plain
    means; collapses to hl_maximal when eta is the identity."""
    family = family or CubeFamily(f.domain)
    dom = f.domain
    absf = np.abs(f.values)
    rho_grid = rho.on_grid(dom)
    out = np.zeros(dom.shape)
    for k, s in enumerate(family.half_sides):
        w = family.window_halfwidth(k)
        measure = (2.0 * s) ** dom.d
        lux = _level_luxemburg(absf, dom, w, measure, eta)
        radius = math.sqrt(dom.d) * s
        level = lux * _damping(rho_grid, radius, sigma)
        np.maximum(out, _window_max(level, w), out=out)
    return SampledFunction(dom, out)


def local_global_split(f: SampledFunction, eta: YoungFunction, sigma: float,
                       rho: CriticalRadius,
                       family: CubeFamily | None = None) -> tuple:
    """Split the damped maximal into its subcritical-or-critical part (no
    damping) and its supercritical part with factor (rho(center)/r)^sigma.

    Pointwise, orlicz_maximal(f, sigma) <= local + global over the same
    family, since (1 + r/rho)^-sigma <= 1 on small cubes and <= (rho/r)^sigma
    on large ones.
    """
    family = family or CubeFamily(f.domain)
    dom = f.domain
    absf = np.abs(f.values)
    rho_grid = rho.on_grid(dom)
    local = np.zeros(dom.shape)
    glob = np.zeros(dom.shape)
    for k, s in enumerate(family.half_sides):
        w = family.window_halfwidth(k)
        measure = (2.0 * s) ** dom.d
        lux = _level_luxemburg(absf, dom, w, measure, eta)
        radius = math.sqrt(dom.d) * s
        is_local = radius <= rho_grid * (1.0 + 1e-12)
        loc_level = np.where(is_local, lux, -np.inf)
        np.maximum(local, _window_max(loc_level, w), out=local)
        if sigma == 0.0:
            glob_factor = np.ones_like(rho_grid)
        else:
            glob_factor = (rho_grid / radius) ** sigma
        glob_level = np.where(is_local, -np.inf, lux * glob_factor)
        np.maximum(glob, _window_max(glob_level, w), out=glob)
    local = np.maximum(local, 0.0)
    glob = np.maximum(glob, 0.0)
    return SampledFunction(dom, local), SampledFunction(dom, glob)


# ---------------------------------------------------------------------------
# Localized operators
# ---------------------------------------------------------------------------

def _inside_mask(dom: Domain, root: Cube, half_side: float) -> np.ndarray:
    """Boolean mask of centers whose level cube fits inside the root cube."""
    mask = np.ones(dom.shape, dtype=bool)
    for ax in range(dom.d):
        margin = root.half_side - half_side
        ok = np.abs(dom.axis - root.center[ax]) <= margin + 1e-12 * root.half_side
        shape = [1] * dom.d
        shape[ax] = dom.N
        mask &= ok.reshape(shape)
    return mask


def _point_mask(dom: Domain, cube: Cube) -> np.ndarray:
    mask = np.ones(dom.shape, dtype=bool)
    for ax in range(dom.d):
        ok = np.abs(dom.axis - cube.center[ax]) < cube.half_side
        shape = [1] * dom.d
        shape[ax] = dom.N
        mask &= ok.reshape(shape)
    return mask


def localized_maximal(f: SampledFunction, eta: YoungFunction,
                      root: Cube, family: CubeFamily | None = None) -> SampledFunction:
    """Supremum over family cubes contained in the root cube; zero outside."""
    family = family or CubeFamily(f.domain)
    dom = f.domain
    absf = np.abs(f.values)
    out = np.zeros(dom.shape)
    for k, s in enumerate(family.half_sides):
        if s > root.half_side:
            break
        w = family.window_halfwidth(k)
        measure = (2.0 * s) ** dom.d
        lux = _level_luxemburg(absf, dom, w, measure, eta)
        level = np.where(_inside_mask(dom, root, float(s)), lux, -np.inf)
        np.maximum(out, _window_max(level, w), out=out)
    out = np.maximum(out, 0.0)
    out[~_point_mask(dom, root)] = 0.0
    return SampledFunction(dom, out)


def dyadic_localized_maximal(f: SampledFunction, eta: YoungFunction,
                             root: Cube) -> SampledFunction:
    """Supremum over the dyadic descendants of the root containing x."""
    dom = f.domain
    out = np.zeros(dom.shape)
    for cube in dyadic_tree(dom, root):
        val = luxemburg_average(f, cube, eta)
        if val <= 0:
            continue
        mask = _point_mask(dom, cube)
        np.maximum(out, np.where(mask, val, 0.0), out=out)
    return SampledFunction(dom, out)


def shifted_dyadic_control_check(f: SampledFunction, eta: YoungFunction,
                                 cube: Cube, window_factor: float | None = None) -> dict:
    """Control of the cube-localized maximal by shifted-grid dyadic maxima.

    For every x in the cube, the localized maximal of f is at most
    3^d * sum over the 3^d shifted grids of the dyadic maximal of f*chi_Q,
    each restricted to grid cubes inside the window (8 sqrt(d)) Q.
    """
    from .grids import ShiftedDyadicGrids
    dom = f.domain
    d = dom.d
    factor = window_factor if window_factor is not None else 8.0 * math.sqrt(d)
    window = cube.dilate(factor)
    lhs = localized_maximal(f, eta, cube)
    chi = np.where(_point_mask(dom, cube), f.values, 0.0)
    f_chi = SampledFunction(dom, chi)
    grids = ShiftedDyadicGrids(d)
    k_lo = math.floor(math.log2(dom.h))
    k_hi = math.ceil(math.log2(6.0 * cube.side))
    rhs = np.zeros(dom.shape)
    for gi in range(grids.n_grids):
        part = np.zeros(dom.shape)
        for k in range(k_lo, k_hi + 1):
            for cand in grids.level_cubes_intersecting(gi, k, window):
                if not window.contains_cube(cand, tol=1e-9 * window.half_side):
                    continue
                val = luxemburg_average(f_chi, cand, eta)
                if val <= 0:
                    continue
                mask = _point_mask(dom, cand)
                np.maximum(part, np.where(mask, val, 0.0), out=part)
        rhs += part
    rhs *= 3.0 ** d
    inside = _point_mask(dom, cube)
    viol = inside & (lhs.values > rhs * (1.0 + 1e-8) + 1e-14)
    return {"ok": not bool(np.any(viol)),
            "violations": int(np.count_nonzero(viol)),
            "lhs_max": float(np.max(lhs.values[inside], initial=0.0)),
            "window_half_side": window.half_side}


# ---------------------------------------------------------------------------
# Ball operators
# ---------------------------------------------------------------------------

def ball_indicator(dom: Domain, center, radius: float) -> SampledFunction:
    pts = dom.points
    c = np.atleast_1d(np.asarray(center, float))
    dist = np.linalg.norm(pts - c, axis=1)
    return SampledFunction(dom, (dist < radius).astype(float).reshape(dom.shape))


def _ball_offsets(dom: Domain, radius: float) -> np.ndarray:
    """Integer index offsets whose grid displacement lies strictly inside the
    ball; shape (m, d)."""
    w = int(math.ceil(radius / dom.h))
    rng = np.arange(-w, w + 1)
    grids = np.meshgrid(*([rng] * dom.d), indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=-1)
    norms = np.linalg.norm(offs * dom.h, axis=1)
    return offs[norms < radius]


def _ball_value_matrix(values: np.ndarray, dom: Domain, offsets: np.ndarray) -> np.ndarray:
    """Matrix (N^d, m) of |f| at each center shifted by each offset, zero
    outside the domain."""
    w = int(np.max(np.abs(offsets))) if offsets.size else 0
    padded = np.pad(values, w)
    n = dom.N
    cols = []
    base = tuple(slice(w, w + n) for _ in range(dom.d))
    for off in offsets:
        sl = tuple(slice(w + o, w + o + n) for o in off)
        cols.append(padded[sl].ravel())
    return np.stack(cols, axis=-1) if cols else np.zeros((n ** dom.d, 0))


def centered_ball_maximal(f: SampledFunction, eta: YoungFunction, sigma: float,
                          rho: CriticalRadius, radii) -> SampledFunction:
    """sup over the radii ladder of (1 + r/rho(x))^-sigma ||f||_{eta, B(x,r)},
    balls carried by their grid points with the analytic ball volume."""
    dom = f.domain
    absf = np.abs(f.values)
    rho_flat = rho.on_grid(dom).ravel()
    out = np.zeros(dom.N ** dom.d)
    for r in np.asarray(radii, float):
        offs = _ball_offsets(dom, r)
        if offs.size == 0:
            continue
        mat = _ball_value_matrix(absf, dom, offs)
        measure = _BALL_VOLUME[dom.d] * r ** dom.d
        lux = luxemburg_values(mat, measure, dom.cell_volume, eta)
        if sigma == 0.0:
            level = lux
        else:
            level = lux * (1.0 + r / rho_flat) ** (-sigma)
        np.maximum(out, level, out=out)
    return SampledFunction(dom, out.reshape(dom.shape))


def uncentered_ball_maximal(f: SampledFunction, eta: YoungFunction, sigma: float,
                            rho: CriticalRadius, radii) -> SampledFunction:
    """sup over balls (grid-point centers, ladder radii) containing x."""
    dom = f.domain
    absf = np.abs(f.values)
    rho_grid = rho.on_grid(dom)
    out = np.zeros(dom.shape)
    for r in np.asarray(radii, float):
        offs = _ball_offsets(dom, r)
        if offs.size == 0:
            continue
        mat = _ball_value_matrix(absf, dom, offs)
        measure = _BALL_VOLUME[dom.d] * r ** dom.d
        lux = luxemburg_values(mat, measure, dom.cell_volume, eta).reshape(dom.shape)
        if sigma != 0.0:
            lux = lux * (1.0 + r / rho_grid) ** (-sigma)
        w = int(math.ceil(r / dom.h))
        rng = np.arange(-w, w + 1)
        grids = np.meshgrid(*([rng] * dom.d), indexing="ij")
        foot = np.linalg.norm(np.stack(grids, -1) * dom.h, axis=-1) < r
        level = ndimage.maximum_filter(lux, footprint=foot,
                                       mode="constant", cval=-np.inf)
        np.maximum(out, level, out=out)
    return SampledFunction(dom, np.maximum(out, 0.0))


def centered_ball_value_at(f: SampledFunction, eta: YoungFunction, sigma: float,
                           rho: CriticalRadius, point, radii) -> float:
    """Centered ball maximal evaluated at a single (off-grid allowed) point."""
    dom = f.domain
    pts = dom.points
    x = np.atleast_1d(np.asarray(point, float))
    dist = np.linalg.norm(pts - x, axis=1)
    absf = np.abs(f.values).ravel()
    rho_x = float(rho(x))
    best = 0.0
    for r in np.asarray(radii, float):
        inside = dist < r
        if not np.any(inside):
            continue
        vals = absf[inside]
        measure = _BALL_VOLUME[dom.d] * r ** dom.d
        lux = float(luxemburg_values(vals[None, :], measure,
                                     dom.cell_volume, eta)[0])
        damp = 1.0 if sigma == 0.0 else (1.0 + r / rho_x) ** (-sigma)
        best = max(best, damp * lux)
    return best


# ---------------------------------------------------------------------------
# Pointwise inequality checks
# ---------------------------------------------------------------------------

def pointwise_power_bound_check(f: SampledFunction, p: float, q: float, a: float,
                                sigma: float, rho: CriticalRadius,
                                family: CubeFamily | None = None) -> dict:
    """Power-log gauge of the theta-damped maximal against the a-th power of
    the sigma-damped maximal of the inner-gauge composition, theta = sigma*a:

        Phi_{p,q}(M^{rho,theta} f) <= [ M^{rho,sigma}( Phi_{p/a,q/a}(|f|) ) ]^a

    at every grid point, both sides over the identical cube family (the
    per-cube convexity argument transfers exactly to restricted suprema).
    """
    if a <= 1:
        raise ValueError("exponent a must exceed 1")
    if p / a < 1:
        raise ValueError("inner exponent p/a must be >= 1")
    family = family or CubeFamily(f.domain)
    theta = sigma * a
    outer = YoungFunction.plog(p, q)
    inner = YoungFunction.plog(p / a, q / a)
    m_theta = hl_maximal(f, theta, rho, family)
    g = SampledFunction(f.domain, np.asarray(inner(np.abs(f.values))))
    m_sigma = hl_maximal(g, sigma, rho, family)
    lhs = np.asarray(outer(m_theta.values))
    rhs = m_sigma.values ** a
    viol = lhs > rhs * (1.0 + 1e-10) + 1e-14
    return {"ok": not bool(np.any(viol)),
            "violations": int(np.count_nonzero(viol)),
            "max_ratio": float(np.max(lhs / np.maximum(rhs, 1e-300))),
            "theta": theta}


def pointwise_product_bound_check(f: SampledFunction, u: SampledFunction,
                                  eta: YoungFunction, sigma: float, gamma: float,
                                  rho: CriticalRadius,
                                  family: CubeFamily | None = None) -> dict:
    """Product rule from the per-cube Holder inequality:

        M^{rho,gamma}(f u) <= 2 M_eta^{rho,sigma} f * M_etatilde^{rho,gamma-sigma} u

    pointwise, all three fields over the same family.
    """
    if gamma < sigma:
        raise ValueError("gamma must be >= sigma")
    family = family or CubeFamily(f.domain)
    prod = SampledFunction(f.domain, f.values * u.values)
    lhs = hl_maximal(prod, gamma, rho, family).values
    m_f = orlicz_maximal(f, eta, sigma, rho, family).values
    m_u = orlicz_maximal(u, eta.complementary(), gamma - sigma, rho, family).values
    rhs = 2.0 * m_f * m_u
    viol = lhs > rhs * (1.0 + 1e-8) + 1e-14
    return {"ok": not bool(np.any(viol)),
            "violations": int(np.count_nonzero(viol)),
            "max_lhs": float(np.max(lhs))}


def indicator_ball_decay_check(domain: Domain, x0, sigma: float,
                               rho: CriticalRadius, phi: YoungFunction,
                               points, radii=None) -> dict:
    """Decay of centered maximals of a critical-ball indicator at points
    outside the doubled ball.

    For the identity gauge the value dominates
    (rho0/dist)^(d + sigma (N0+1)) up to a constant (the lower shape); for a
    general gauge it is dominated by
    (rho0/dist)^(sigma/(N0+1)) / phi^{-1}((dist/rho0)^d) (the upper shape).
    Both constants are fitted empirically; log-log slopes are reported for
    comparison with the predicted exponents.
    """
    x0 = np.atleast_1d(np.asarray(x0, float))
    rho0 = float(rho(x0))
    chi = ball_indicator(domain, x0, rho0)
    pts = [np.atleast_1d(np.asarray(p, float)) for p in points]
    dists = np.array([float(np.linalg.norm(p - x0)) for p in pts])
    if np.any(dists <= 2.0 * rho0):
        raise ValueError("evaluation points must lie strictly outside the "
                         "doubled critical ball")
    if radii is None:
        radii = np.geomspace(domain.h, 2.0 * math.sqrt(domain.d) * domain.L,
                             num=96)
    ident = YoungFunction.identity()
    val_hl = np.array([centered_ball_value_at(chi, ident, sigma, rho, p, radii)
                       for p in pts])
    val_phi = np.array([centered_ball_value_at(chi, phi, sigma, rho, p, radii)
                        for p in pts])
    n = domain.d
    n0 = rho.N0
    shape_a = (rho0 / dists) ** (n + sigma * (n0 + 1.0))
    inv_phi = np.asarray(phi.inverse((dists / rho0) ** n))
    shape_b = (rho0 / dists) ** (sigma / (n0 + 1.0)) / inv_phi
    c_lower = float(np.min(val_hl / shape_a))
    c_upper = float(np.max(val_phi / shape_b))

    def _slope(v):
        ok = v > 0
        A = np.vstack([np.log(dists[ok]), np.ones(int(np.sum(ok)))]).T
        sol, *_ = np.linalg.lstsq(A, np.log(v[ok]), rcond=None)
        return float(-sol[0])

    return {
        "distances": dists,
        "values_identity": val_hl,
        "values_gauge": val_phi,
        "lower_shape_exponent": n + sigma * (n0 + 1.0),
        "upper_shape_exponent_identity": n + sigma / (n0 + 1.0),
        "fitted_lower_constant": c_lower,
        "fitted_upper_constant": c_upper,
        "slope_identity": _slope(val_hl),
        "slope_gauge": _slope(val_phi),
        "ok": bool(c_lower > 0 and np.isfinite(c_upper)),
    }
