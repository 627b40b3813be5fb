"""Muckenhoupt-type weight classes adapted to a critical radius function.

The A_p constant of a weight w against rho at exponent theta is

    sup_Q (avg_Q w)^(1/p) (avg_Q w^(1-p'))^(1/p') / (1 + r/rho(x_Q))^theta

over cubes fully inside the domain (zero extension would destroy A_p
finiteness artificially, so the family is restricted here).  "Finite" is an
operational notion on a truncated grid: stable within 20% under N -> 2N at
fixed L; divergence means growth by 2x or more under L -> 2L.  Both
thresholds are arguments, not constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grids import CubeFamily, Domain, SampledFunction
from .operators import hl_maximal
from .radius import CriticalRadius

__all__ = [
    "WeightReport",
    "ap_rho_constant",
    "a1_rho_constant",
    "a1_pointwise_check",
    "openness_probe",
]


@dataclass(frozen=True)
class WeightReport:
    p: float | None              # None for the A_1 variant
    theta: float
    constant: float
    worst_center: tuple
    worst_half_side: float
    per_scale: tuple             # max quotient per ladder level


def _power_mean(avg: np.ndarray, inv_exp: float) -> np.ndarray:
    # sqrt is correctly rounded; generic pow is not, so prefer it at p = 2
    if inv_exp == 0.5:
        return np.sqrt(avg)
    return avg ** inv_exp


def _scan_family(domain: Domain, rho: CriticalRadius, theta: float,
                 quotient_at_level) -> WeightReport:
    family = CubeFamily(domain, boundary_policy="inside_only")
    rho_grid = rho.on_grid(domain)
    best = -math.inf
    best_center, best_s = (), 0.0
    per_scale = []
    for k, s in enumerate(family.half_sides):
        a, b = family.center_slices(k)
        if b <= a:
            per_scale.append(0.0)
            continue
        w_half = family.window_halfwidth(k)
        radius = math.sqrt(domain.d) * float(s)
        quot = quotient_at_level(k, float(s), w_half)
        if theta != 0.0:
            quot = quot / (1.0 + radius / rho_grid) ** theta
        sl = tuple(slice(a, b) for _ in range(domain.d))
        view = quot[sl]
        level_max = float(np.max(view))
        per_scale.append(level_max)
        if level_max > best:
            best = level_max
            flat = int(np.argmax(view))
            idx = np.unravel_index(flat, view.shape)
            best_center = tuple(float(domain.axis[i + a]) for i in idx)
            best_s = float(s)
    return WeightReport(None, theta, best, best_center, best_s, tuple(per_scale))


def ap_rho_constant(w: SampledFunction, p: float, theta: float,
                    rho: CriticalRadius) -> WeightReport:
    """Estimate the adapted A_p constant of a positive weight."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    if np.min(w.values) <= 0:
        raise ValueError("weight must be strictly positive on the grid")
    domain = w.domain
    pp = p / (p - 1.0)
    w_dual = SampledFunction(domain, w.values ** (1.0 - pp))
    from .operators import _level_box_averages

    def quotient(k, s, w_half):
        measure = (2.0 * s) ** domain.d
        avg_w = _level_box_averages(w, w_half, measure)
        avg_d = _level_box_averages(w_dual, w_half, measure)
        return _power_mean(avg_w, 1.0 / p) * _power_mean(avg_d, 1.0 / pp)

    rep = _scan_family(domain, rho, theta, quotient)
    return WeightReport(p, theta, rep.constant, rep.worst_center,
                        rep.worst_half_side, rep.per_scale)


def a1_rho_constant(w: SampledFunction, theta: float,
                    rho: CriticalRadius) -> WeightReport:
    """Estimate the adapted A_1 constant sup_Q avg_Q w / (damping * inf_Q w)."""
    if np.min(w.values) <= 0:
        raise ValueError("weight must be strictly positive on the grid")
    domain = w.domain
    from .operators import _level_box_averages

    def quotient(k, s, w_half):
        measure = (2.0 * s) ** domain.d
        avg_w = _level_box_averages(w, w_half, measure)
        if w_half == 0:
            inf_w = w.values
        else:
            inf_w = ndimage.minimum_filter(w.values, size=2 * w_half + 1,
                                           mode="constant", cval=np.inf)
        return avg_w / inf_w

    return _scan_family(domain, rho, theta, quotient)


def a1_pointwise_check(w: SampledFunction, theta: float,
                       rho: CriticalRadius) -> dict:
    """The pointwise characterization: C = sup of the theta-damped maximal of
    w divided by w itself."""
    if np.min(w.values) <= 0:
        raise ValueError("weight must be strictly positive on the grid")
    mw = hl_maximal(w, theta, rho)
    ratio = mw.values / w.values
    flat = int(np.argmax(ratio))
    idx = np.unravel_index(flat, ratio.shape)
    return {"C": float(np.max(ratio)),
            "worst_point": tuple(float(w.domain.axis[i]) for i in idx)}


def openness_probe(sample_weight, domain: Domain, p: float,
                   rho: CriticalRadius, eps_ladder=None, theta_sweep=None,
                   stability_tol: float = 0.2) -> dict:
    """Probe the self-improvement of the weight class: find the largest
    ladder epsilon (0 < eps < p-1) such that the A_{p-eps} constant, at some
    exponent theta' of the sweep, is stable within ``stability_tol`` under
    N -> 2N.

    ``sample_weight`` maps a Domain to a SampledFunction so the weight can be
    resampled on the refined grid.  "Not found" is a report outcome, not an
    error.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if eps_ladder is None:
        eps_ladder = [0.75 * (p - 1.0), 0.5 * (p - 1.0), 0.25 * (p - 1.0),
                      0.1 * (p - 1.0)]
    if theta_sweep is None:
        theta_sweep = [0.0, 2.0, 4.0]
    fine = domain.refine()
    w_coarse = sample_weight(domain)
    w_fine = sample_weight(fine)
    for eps in sorted(eps_ladder, reverse=True):
        if not (0.0 < eps < p - 1.0):
            continue
        for theta in theta_sweep:
            c1 = ap_rho_constant(w_coarse, p - eps, theta, rho).constant
            c2 = ap_rho_constant(w_fine, p - eps, theta, rho).constant
            if abs(c2 - c1) <= stability_tol * c1:
                return {"found": True, "epsilon": float(eps),
                        "theta": float(theta), "constant": float(c2),
                        "coarse_constant": float(c1)}
    return {"found": False, "epsilon": None, "theta": None}
