"""Inequality experiments over batteries of functions and weights.

Every experiment evaluates the two sides of one inequality for each battery
case, reports the best (largest) empirical ratio, reruns at the doubled
resolution, and attaches a verdict:

* ``BOUNDED-STABLE``: the sup ratio moved by at most the stability tolerance
  (default 15%) under N -> 2N;
* ``UNSTABLE``: it moved more;
* ``FAIL``: a case produced a positive left side against a vanishing right
  side, or a precondition was violated in override mode.

Since the target constants are existential, experiments report empirical
constants plus stability, never fixed bounds; acceptance pins specific
batteries.  Battery cases are independent and can run on a small thread
pool; reports are merged in config order either way, so results do not
depend on the worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dini import DiniReport, dini_condition_check
from .grids import CubeFamily, Domain, SampledFunction
from .operators import ball_indicator, hl_maximal, orlicz_maximal
from .orlicz import luxemburg_norm_global
from .radius import CriticalRadius, critical_covering, overlap_profile
from .specs import FunctionSpec, WeightSpec
from .weights import ap_rho_constant, openness_probe
from .young import GrowthPair, YoungFunction

__all__ = [
    "ExperimentConfig",
    "RatioReport",
    "sufficient_sigma",
    "weak_type_experiment",
    "strong_type_experiment",
    "modular_fefferman_stein_experiment",
    "norm_fefferman_stein_experiment",
    "unweighted_modular_experiment",
    "unweighted_norm_experiment",
    "two_weight_quotient_experiment",
    "level_set_bound_experiment",
    "quotient_weight_cap_experiment",
    "default_battery",
    "DiniPreconditionError",
]

BOUNDED_STABLE = "BOUNDED-STABLE"
UNSTABLE = "UNSTABLE"
FAIL = "FAIL"


class DiniPreconditionError(RuntimeError):
    """The growth pair fails the integral condition and override is off."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared container for every experiment; unused fields are ignored by
    experiments that do not need them."""

    domain: Domain
    rho: CriticalRadius
    functions: tuple = ()
    weights: tuple = (WeightSpec("constant", value=1.0, label="w=1"),)
    u_functions: tuple = ()
    eta: YoungFunction | None = None
    phi: YoungFunction | None = None
    pair: GrowthPair | None = None
    p: float = 2.0
    q: float = 0.0
    sigma: float | None = None
    theta: float = 0.0
    gamma: float | None = None
    a_exponent: float | None = None
    sigma_shell_fraction: float = 0.25      # the c of the sigma rule
    lambda_exponents: tuple = (0, 1, 2, 3, 4, 5, 6, 7)
    refine: bool = True
    stability_tol: float = 0.15
    override_dini: bool = False
    c_prime: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.gamma is not None and self.sigma is not None \
                and self.gamma < self.sigma:
            raise ValueError("gamma must be >= sigma")
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "u_functions", tuple(self.u_functions))
        object.__setattr__(self, "lambda_exponents",
                           tuple(self.lambda_exponents))


@dataclass(frozen=True)
class RatioReport:
    experiment: str
    cases: tuple                  # dicts: case_id, lhs, rhs, ratio, N
    sup_ratio: float
    refined_sup_ratio: float | None
    drift: float | None
    verdict: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "experiment": self.experiment,
            "cases": list(self.cases),
            "sup_ratio": self.sup_ratio,
            "refined_sup_ratio": self.refined_sup_ratio,
            "drift": self.drift,
            "verdict": self.verdict,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("experiment,case_id,lhs,rhs,ratio,N,verdict\n")
            for c in self.cases:
                fh.write(f"{self.experiment},{c['case_id']},{c['lhs']:.17g},"
                         f"{c['rhs']:.17g},{c['ratio']:.17g},{c['N']},"
                         f"{self.verdict}\n")


def sufficient_sigma(theta: float, N0: float, N1: float, c: float) -> float:
    """Damping exponent large enough for the weak-type argument given the
    covering overlap exponent N1 and a shell-decay fraction 0 < c < 1/(N0+1)."""
    if not 0.0 < c < 1.0 / (N0 + 1.0):
        raise ValueError("need 0 < c < 1/(N0+1)")
    return max((theta + N1) / c, 2.0 * N0 / (1.0 - (N0 + 1.0) * c)) + 1e-6


def _fitted_n1(rho: CriticalRadius, domain: Domain) -> float:
    cov = critical_covering(rho, domain)
    prof = overlap_profile(cov, [1.0, 2.0, 4.0, 8.0])
    return max(prof["N1"], 0.0)


def _resolve_sigma(cfg: ExperimentConfig, domain: Domain) -> float:
    if cfg.sigma is not None:
        return cfg.sigma
    n1 = _fitted_n1(cfg.rho, domain)
    return sufficient_sigma(cfg.theta, cfg.rho.N0, max(n1, 1.0),
                            cfg.sigma_shell_fraction)


def _map_cases(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _assemble(experiment: str, cases, refined_cases, cfg: ExperimentConfig,
              params: dict) -> RatioReport:
    ratios = [c["ratio"] for c in cases]
    bad = any(math.isinf(r) for r in ratios)
    sup_ratio = max(ratios) if ratios else 0.0
    refined_sup = None
    drift = None
    verdict = FAIL if bad else BOUNDED_STABLE
    all_cases = list(cases)
    if refined_cases is not None:
        all_cases += list(refined_cases)
        rr = [c["ratio"] for c in refined_cases]
        bad = bad or any(math.isinf(r) for r in rr)
        refined_sup = max(rr) if rr else 0.0
        if sup_ratio > 0:
            drift = abs(refined_sup - sup_ratio) / sup_ratio
        else:
            drift = 0.0 if refined_sup == 0 else math.inf
        if bad:
            verdict = FAIL
        elif drift <= cfg.stability_tol:
            verdict = BOUNDED_STABLE
        else:
            verdict = UNSTABLE
    return RatioReport(experiment, tuple(all_cases), sup_ratio, refined_sup,
                       drift, verdict, params)


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs == 0.0 else math.inf


def default_battery(seed: int = 0, n_cases: int = 20, extent: float = 2.0) -> tuple:
    """Deterministic battery mixing gaussians, indicators, spikes and steps;
    centers and shapes are jittered by the seeded generator."""
    rng = np.random.default_rng(seed)
    out = []
    families = ["gaussian", "indicator", "spike", "step"]
    alphas = [0.3, 0.6, 0.9, 1.0]
    for i in range(n_cases):
        fam = families[i % len(families)]
        center = tuple(rng.uniform(-0.4, 0.4, size=3)[:1] * extent)
        amp = float(rng.uniform(0.5, 2.0))
        if fam == "gaussian":
            spec = FunctionSpec("gaussian", amplitude=amp, center=center,
                                width=float(rng.uniform(0.1, 0.5) * extent),
                                label=f"gaussian-{i}")
        elif fam == "indicator":
            spec = FunctionSpec("indicator", amplitude=amp, center=center,
                                width=float(rng.uniform(0.1, 0.4) * extent),
                                label=f"indicator-{i}")
        elif fam == "spike":
            spec = FunctionSpec("spike", amplitude=amp, center=center,
                                alpha=alphas[(i // 4) % len(alphas)],
                                support_radius=float(rng.uniform(0.3, 0.6) * extent),
                                label=f"spike-{i}")
        else:
            spec = FunctionSpec("step", amplitude=amp, center=center,
                                threshold=float(rng.uniform(-0.2, 0.2) * extent),
                                support_radius=float(rng.uniform(0.3, 0.6) * extent),
                                label=f"step-{i}")
        out.append(spec)
    return tuple(out)


# ---------------------------------------------------------------------------
# Weak type
# ---------------------------------------------------------------------------

def _weak_type_cases(cfg: ExperimentConfig, domain: Domain, sigma: float) -> list:
    phi = cfg.phi
    family = CubeFamily(domain)
    cell = domain.cell_volume

    def run(case):
        fspec, wspec = case
        f = fspec.sample(domain)
        w = wspec.sample(domain)
        mphi = orlicz_maximal(f, phi, sigma, cfg.rho, family).values
        mw = hl_maximal(w, cfg.theta, cfg.rho, family).values
        absf = np.abs(f.values)
        rows = []
        for j in cfg.lambda_exponents:
            lam = fspec.amplitude * 2.0 ** (-float(j))
            lhs = cell * float(np.sum(w.values[mphi > lam]))
            rhs = cell * float(np.sum(np.asarray(phi(absf / lam)) * mw))
            rows.append({"case_id": f"{fspec.case_id}|{wspec.case_id}|lam2^-{j}",
                         "lhs": lhs, "rhs": rhs, "ratio": _ratio(lhs, rhs),
                         "N": domain.N})
        return rows

    items = [(f, w) for f in cfg.functions for w in cfg.weights]
    nested = _map_cases(run, items, cfg.threads)
    return [row for rows in nested for row in rows]


def weak_type_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Superlevel w-measure of the damped Luxemburg maximal against the
    modular of f weighted by the damped maximal of w."""
    if cfg.phi is None:
        raise ValueError("weak-type needs the gauge phi")
    if not cfg.functions:
        raise ValueError("empty battery")
    if not math.isfinite(cfg.phi.doubling_constant()):
        raise ValueError("the gauge must be doubling")
    sigma = _resolve_sigma(cfg, cfg.domain)
    cases = _weak_type_cases(cfg, cfg.domain, sigma)
    refined = _weak_type_cases(cfg, cfg.domain.refine(), sigma) if cfg.refine else None
    return _assemble("weak-type", cases, refined, cfg,
                     {"sigma": sigma, "theta": cfg.theta})


# ---------------------------------------------------------------------------
# Strong type on power-log gauges
# ---------------------------------------------------------------------------

def _strong_type_cases(cfg: ExperimentConfig, domain: Domain, theta: float) -> list:
    gauge = YoungFunction.plog(cfg.p, cfg.q)
    family = CubeFamily(domain)
    cell = domain.cell_volume

    def run(case):
        fspec, wspec = case
        f = fspec.sample(domain)
        w = wspec.sample(domain)
        norm = luxemburg_norm_global(f, w, gauge)
        if norm == 0.0:
            return {"case_id": f"{fspec.case_id}|{wspec.case_id}",
                    "lhs": 0.0, "rhs": 0.0, "ratio": 0.0, "N": domain.N}
        fn = SampledFunction(domain, f.values / norm)
        mf = hl_maximal(fn, theta, cfg.rho, family).values
        lhs = cell * float(np.sum(np.asarray(gauge(mf)) * w.values))
        rhs = cell * float(np.sum(np.asarray(gauge(np.abs(fn.values))) * w.values))
        return {"case_id": f"{fspec.case_id}|{wspec.case_id}",
                "lhs": lhs, "rhs": rhs, "ratio": _ratio(lhs, rhs),
                "N": domain.N}

    items = [(f, w) for f in cfg.functions for w in cfg.weights]
    return _map_cases(run, items, cfg.threads)


def strong_type_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Boundedness of the damped maximal on the weighted power-log space,
    with the damping exponent theta = sigma * a transferred through the
    pointwise power bound; a comes from the openness probe unless given."""
    if cfg.p <= 1:
        raise ValueError("p must exceed 1")
    if not cfg.functions:
        raise ValueError("empty battery")
    a = cfg.a_exponent
    probe = None
    if a is None:
        wspec = cfg.weights[0]
        probe = openness_probe(wspec.sample, cfg.domain, cfg.p, cfg.rho)
        if not probe["found"]:
            raise ValueError("openness probe found no stable smaller exponent")
        a = cfg.p - probe["epsilon"]
    sigma = cfg.sigma if cfg.sigma is not None else 2.0
    theta = sigma * a
    cases = _strong_type_cases(cfg, cfg.domain, theta)
    refined = _strong_type_cases(cfg, cfg.domain.refine(), theta) if cfg.refine else None
    params = {"a": a, "sigma": sigma, "theta": theta, "p": cfg.p, "q": cfg.q}
    if probe is not None:
        params["openness_theta"] = probe["theta"]
    return _assemble("strong-type", cases, refined, cfg, params)


# ---------------------------------------------------------------------------
# Fefferman-Stein style modular / norm experiments
# ---------------------------------------------------------------------------

def _resolve_dini(cfg: ExperimentConfig) -> tuple:
    """Returns (C', DiniReport).  Without override the pair must pass."""
    report = dini_condition_check(cfg.pair, cfg.eta)
    if report.verdict == "FAIL":
        if not cfg.override_dini:
            raise DiniPreconditionError(
                "the growth pair fails the integral condition; rerun with "
                "override to probe the necessity direction")
        return (cfg.c_prime if cfg.c_prime is not None else 1.0), report
    return (cfg.c_prime if cfg.c_prime is not None else report.constant), report


def _fs_cases(cfg: ExperimentConfig, domain: Domain, sigma: float,
              c_prime: float, use_norms: bool) -> list:
    family = CubeFamily(domain)
    cell = domain.cell_volume
    phi = cfg.pair.phi
    psi = cfg.pair.psi

    def run(case):
        fspec, wspec = case
        f = fspec.sample(domain)
        w = wspec.sample(domain)
        m_eta = orlicz_maximal(f, cfg.eta, sigma, cfg.rho, family)
        mw = hl_maximal(w, cfg.theta, cfg.rho, family)
        if use_norms:
            lhs = luxemburg_norm_global(m_eta, w, phi)
            rhs = luxemburg_norm_global(f, mw, psi)
        else:
            lhs = cell * float(np.sum(np.asarray(phi(m_eta.values)) * w.values))
            rhs = cell * float(np.sum(
                np.asarray(psi(c_prime * np.abs(f.values))) * mw.values))
        return {"case_id": f"{fspec.case_id}|{wspec.case_id}",
                "lhs": lhs, "rhs": rhs, "ratio": _ratio(lhs, rhs),
                "N": domain.N}

    items = [(f, w) for f in cfg.functions for w in cfg.weights]
    return _map_cases(run, items, cfg.threads)


def _fs_experiment(cfg: ExperimentConfig, use_norms: bool, name: str) -> RatioReport:
    if cfg.eta is None or cfg.pair is None:
        raise ValueError("needs the gauge eta and the growth pair (a, b)")
    if not cfg.functions:
        raise ValueError("empty battery")
    c_prime, dini_report = _resolve_dini(cfg)
    sigma = _resolve_sigma(cfg, cfg.domain)
    cases = _fs_cases(cfg, cfg.domain, sigma, c_prime, use_norms)
    refined = _fs_cases(cfg, cfg.domain.refine(), sigma, c_prime, use_norms) \
        if cfg.refine else None
    return _assemble(name, cases, refined, cfg,
                     {"sigma": sigma, "theta": cfg.theta, "c_prime": c_prime,
                      "dini_verdict": dini_report.verdict})


def modular_fefferman_stein_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Weighted modular estimate: int phi(M_eta f) w against
    int psi(C'|f|) M w, with C' threaded from the integral-condition
    constant."""
    return _fs_experiment(cfg, use_norms=False, name="modular-fs")


def norm_fefferman_stein_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Luxemburg-norm version of the weighted estimate."""
    return _fs_experiment(cfg, use_norms=True, name="norm-fs")


def _unweighted(cfg: ExperimentConfig) -> ExperimentConfig:
    return replace(cfg, weights=(WeightSpec("constant", value=1.0, label="w=1"),))


def unweighted_modular_experiment(cfg: ExperimentConfig) -> RatioReport:
    return _fs_experiment(_unweighted(cfg), use_norms=False,
                          name="unweighted-modular")


def unweighted_norm_experiment(cfg: ExperimentConfig) -> RatioReport:
    return _fs_experiment(_unweighted(cfg), use_norms=True,
                          name="unweighted-norm")


# ---------------------------------------------------------------------------
# Two-weight quotient estimate
# ---------------------------------------------------------------------------

def _two_weight_cases(cfg: ExperimentConfig, domain: Domain, sigma: float,
                      gamma: float) -> list:
    family = CubeFamily(domain)
    cell = domain.cell_volume
    phi = cfg.pair.phi
    psi = cfg.pair.psi
    eta_dual = cfg.eta.complementary()

    def run(case):
        fspec, uspec, wspec = case
        f = fspec.sample(domain)
        u = uspec.sample(domain)
        w = wspec.sample(domain)
        absf = np.abs(f.values)
        if np.any((absf > 0) & (u.values <= 0)):
            raise ValueError("u must be positive on the support of f")
        num = hl_maximal(f, gamma, cfg.rho, family).values
        den = orlicz_maximal(u, eta_dual, gamma - sigma, cfg.rho, family).values
        quot = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        lhs = cell * float(np.sum(np.asarray(phi(quot)) * w.values))
        mw = hl_maximal(w, cfg.theta, cfg.rho, family).values
        fu = np.where(u.values > 0, absf / np.where(u.values > 0, u.values, 1.0), 0.0)
        rhs = cell * float(np.sum(np.asarray(psi(fu)) * mw))
        return {"case_id": f"{fspec.case_id}|{uspec.case_id}|{wspec.case_id}",
                "lhs": lhs, "rhs": rhs, "ratio": _ratio(lhs, rhs),
                "N": domain.N}

    items = [(f, u, w) for f in cfg.functions for u in cfg.u_functions
             for w in cfg.weights]
    return _map_cases(run, items, cfg.threads)


def two_weight_quotient_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Quotient form: int phi(M^gamma f / M_etatilde^(gamma-sigma) u) w
    against int psi(|f|/u) M^theta w; points where the denominator maximal
    vanishes contribute zero (f and u share support)."""
    if cfg.eta is None or cfg.pair is None:
        raise ValueError("needs the gauge eta and the growth pair (a, b)")
    if not cfg.functions or not cfg.u_functions:
        raise ValueError("empty battery")
    sigma = cfg.sigma if cfg.sigma is not None else 1.0
    gamma = cfg.gamma if cfg.gamma is not None else sigma
    if gamma < sigma:
        raise ValueError("gamma must be >= sigma")
    cases = _two_weight_cases(cfg, cfg.domain, sigma, gamma)
    refined = _two_weight_cases(cfg, cfg.domain.refine(), sigma, gamma) \
        if cfg.refine else None
    return _assemble("two-weight", cases, refined, cfg,
                     {"sigma": sigma, "gamma": gamma, "theta": cfg.theta})


# ---------------------------------------------------------------------------
# Level-set integral bound
# ---------------------------------------------------------------------------

def _level_set_rhs(absf: np.ndarray, mw: np.ndarray, phi: YoungFunction,
                   lam: float, t0: float, cell: float) -> float:
    """int_{t0}^inf (Mw)-measure{4 t0 |f| > lam s} phi'(s) ds, evaluated
    exactly: the superlevel measure is piecewise constant in s, so each grid
    point contributes Mw_i * (phi(u_i) - phi(t0))_+ with u_i = 4 t0 f_i/lam."""
    u = 4.0 * t0 * absf / lam
    contrib = np.maximum(np.asarray(phi(u)) - float(phi(t0)), 0.0)
    return cell * float(np.sum(mw * contrib))


def _level_set_cases(cfg: ExperimentConfig, domain: Domain, sigma: float,
                     t0: float) -> list:
    family = CubeFamily(domain)
    cell = domain.cell_volume
    phi = cfg.phi

    def run(case):
        fspec, wspec = case
        f = fspec.sample(domain)
        w = wspec.sample(domain)
        mphi = orlicz_maximal(f, phi, sigma, cfg.rho, family).values
        mw = hl_maximal(w, cfg.theta, cfg.rho, family).values
        absf = np.abs(f.values)
        rows = []
        for j in cfg.lambda_exponents:
            lam = fspec.amplitude * 2.0 ** (-float(j))
            lhs = cell * float(np.sum(w.values[mphi > lam]))
            rhs = _level_set_rhs(absf, mw, phi, lam, t0, cell)
            rows.append({"case_id": f"{fspec.case_id}|{wspec.case_id}|lam2^-{j}",
                         "lhs": lhs, "rhs": rhs, "ratio": _ratio(lhs, rhs),
                         "N": domain.N})
        return rows

    items = [(f, w) for f in cfg.functions for w in cfg.weights]
    nested = _map_cases(run, items, cfg.threads)
    return [row for rows in nested for row in rows]


def level_set_bound_experiment(cfg: ExperimentConfig) -> RatioReport:
    """Superlevel w-measure of the damped gauge maximal bounded through an
    outer integral of damped-maximal-weight measures against phi'."""
    if cfg.phi is None:
        raise ValueError("needs the gauge phi")
    phi = cfg.phi if cfg.phi.is_normalized() else cfg.phi.normalize()
    cfg = replace(cfg, phi=phi)
    t0 = 1.0 + 1e-6
    sigma = _resolve_sigma(cfg, cfg.domain)
    cases = _level_set_cases(cfg, cfg.domain, sigma, t0)
    refined = _level_set_cases(cfg, cfg.domain.refine(), sigma, t0) \
        if cfg.refine else None
    return _assemble("level-set", cases, refined, cfg,
                     {"sigma": sigma, "theta": cfg.theta, "t0": t0})


# ---------------------------------------------------------------------------
# Quotient-weight cap on the critical ball
# ---------------------------------------------------------------------------

def quotient_weight_cap_experiment(domain: Domain, rho: CriticalRadius,
                                   phi: YoungFunction, eta: YoungFunction,
                                   x0, t: float = 1.0, sigma: float = 1.0,
                                   theta_ladder=(0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0),
                                   stability_tol: float = 0.2) -> dict:
    """Build the radial quotient weight vanishing on the doubled critical
    ball and find the smallest ladder damping exponent keeping its damped
    maximal bounded on the critical ball, stably under refinement.

    Also reports the pessimistic analytic threshold
    theta > (N0+1) ((log2 Cd) ceil(sigma) (N0+1) + 1) coming from chaining
    the doubling constant Cd of phi across dyadic annuli.
    """
    x0 = np.atleast_1d(np.asarray(x0, float))
    rho0 = float(rho(x0))
    n = domain.d
    eta_dual_inv = eta.complementary().inverse

    def weight_values(dom: Domain) -> SampledFunction:
        pts = dom.points
        dist = np.linalg.norm(pts - x0, axis=1)
        outside = dist > 2.0 * rho0
        safe = np.where(outside, dist, 4.0 * rho0)
        ratio = (safe / rho0) ** n
        inv = np.asarray(eta_dual_inv(ratio))
        top = np.asarray(phi(t * (rho0 / safe) ** n * inv))
        bot = np.asarray(phi(t * (rho0 / safe) ** (n + sigma * (rho.N0 + 1.0)) * inv))
        vals = np.where(outside & (bot > 0), top / np.where(bot > 0, bot, 1.0), 0.0)
        return SampledFunction(dom, vals.reshape(dom.shape))

    cd = phi.doubling_constant()
    threshold = (rho.N0 + 1.0) * (math.log2(cd) * math.ceil(sigma)
                                  * (rho.N0 + 1.0) + 1.0)
    fine = domain.refine()
    w_coarse = weight_values(domain)
    w_fine = weight_values(fine)
    ball_coarse = ball_indicator(domain, x0, rho0).values > 0
    ball_fine = ball_indicator(fine, x0, rho0).values > 0
    rows = []
    smallest_stable = None
    for theta in theta_ladder:
        s1 = float(np.max(hl_maximal(w_coarse, theta, rho).values[ball_coarse]))
        s2 = float(np.max(hl_maximal(w_fine, theta, rho).values[ball_fine]))
        stable = s1 > 0 and abs(s2 - s1) <= stability_tol * s1
        rows.append({"theta": float(theta), "sup_coarse": s1, "sup_fine": s2,
                     "stable": bool(stable)})
        if stable and smallest_stable is None:
            smallest_stable = float(theta)
    return {"ladder": rows, "smallest_stable_theta": smallest_stable,
            "analytic_threshold": threshold,
            "doubling_constant": cd,
            "weight_vanishes_on_doubled_ball": bool(
                np.all(w_coarse.values[np.linalg.norm(
                    domain.points - x0, axis=1).reshape(domain.shape)
                    <= 2.0 * rho0] == 0.0))}
