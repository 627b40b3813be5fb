"""Command-line entry point: every experiment and primitive as a subcommand.

Config files are JSON with a mandatory ``"schema_version": 1``; unknown keys
are rejected.  Reports are deterministic (no timestamps in payloads; run
metadata goes to a separate sidecar file), so reruns produce byte-identical
outputs.  Exit codes: 0 success, 2 config/validation error, 3 experiment
FAIL verdict (for CI gating).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import harness
from .dini import dini_condition_check
from .grids import Domain
from .operators import (centered_ball_maximal, hl_maximal, local_global_split,
                        orlicz_maximal)
from .radius import critical_covering, overlap_profile, rho_from_dict, validate_pairs
from .specs import FunctionSpec, WeightSpec
from .weights import a1_pointwise_check, a1_rho_constant, ap_rho_constant
from .young import GrowthPair, growth_from_dict, young_from_dict

SCHEMA_VERSION = 1

_COMMON_KEYS = {"schema_version", "seed", "threads"}

_SCHEMAS = {
    "dini-check": _COMMON_KEYS | {"a", "b", "eta", "t_min", "t_max",
                                  "t_points", "c_bracket"},
    "maximal-eval": _COMMON_KEYS | {"domain", "rho", "operator", "function",
                                    "radii", "root"},
    "weak-type": _COMMON_KEYS | {"domain", "rho", "phi", "theta", "sigma",
                                 "sigma_shell_fraction", "battery",
                                 "lambda_exponents", "refine", "stability_tol"},
    "strong-type": _COMMON_KEYS | {"domain", "rho", "p", "q", "sigma",
                                   "a_exponent", "battery", "refine",
                                   "stability_tol"},
    "modular-fs": _COMMON_KEYS | {"domain", "rho", "a", "b", "eta", "theta",
                                  "sigma", "sigma_shell_fraction", "battery",
                                  "override_dini", "c_prime", "refine",
                                  "stability_tol"},
    "norm-fs": _COMMON_KEYS | {"domain", "rho", "a", "b", "eta", "theta",
                               "sigma", "sigma_shell_fraction", "battery",
                               "override_dini", "c_prime", "refine",
                               "stability_tol"},
    "two-weight": _COMMON_KEYS | {"domain", "rho", "a", "b", "eta", "theta",
                                  "sigma", "gamma", "battery", "refine",
                                  "stability_tol"},
    "weights-estimate": _COMMON_KEYS | {"domain", "rho", "weight", "p",
                                        "theta"},
    "covering": _COMMON_KEYS | {"domain", "rho", "sigmas"},
    "validate-rho": _COMMON_KEYS | {"rho", "C0", "N0", "d", "box_halfwidth",
                                    "n_pairs", "pairs"},
    "selftest": _COMMON_KEYS,
}

_BATTERY_KEYS = {"n_cases", "extent", "functions", "weights", "u_functions"}


class ConfigError(Exception):
    pass


def _load_config(path: str, subcommand: str, overrides) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1:1: top level must be a JSON object")
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"{path}: schema_version must be {SCHEMA_VERSION}")
    allowed = _SCHEMAS[subcommand]
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"{path}: unknown key {key!r} for {subcommand}")
    if "battery" in cfg:
        for key in cfg["battery"]:
            if key not in _BATTERY_KEYS:
                raise ConfigError(f"{path}: unknown battery key {key!r}")
    return cfg


def _resolve_battery(cfg: dict) -> tuple:
    bat = cfg.get("battery", {})
    if "functions" in bat:
        functions = tuple(FunctionSpec.from_dict(s) for s in bat["functions"])
    else:
        functions = harness.default_battery(seed=cfg.get("seed", 0),
                                            n_cases=bat.get("n_cases", 20),
                                            extent=bat.get("extent", 2.0))
    weights = tuple(WeightSpec.from_dict(s) for s in bat.get(
        "weights", [{"family": "constant", "value": 1.0, "label": "w=1"}]))
    u_functions = tuple(FunctionSpec.from_dict(s)
                        for s in bat.get("u_functions", []))
    return functions, weights, u_functions


def _experiment_config(cfg: dict, threads: int) -> harness.ExperimentConfig:
    functions, weights, u_functions = _resolve_battery(cfg)
    kw = dict(
        domain=Domain.from_dict(cfg["domain"]),
        rho=rho_from_dict(cfg["rho"]),
        functions=functions,
        weights=weights,
        u_functions=u_functions,
        theta=cfg.get("theta", 0.0),
        sigma=cfg.get("sigma"),
        gamma=cfg.get("gamma"),
        seed=cfg.get("seed", 0),
        threads=threads,
        refine=cfg.get("refine", True),
        stability_tol=cfg.get("stability_tol", 0.15),
        override_dini=cfg.get("override_dini", False),
        c_prime=cfg.get("c_prime"),
    )
    if "sigma_shell_fraction" in cfg:
        kw["sigma_shell_fraction"] = cfg["sigma_shell_fraction"]
    if "lambda_exponents" in cfg:
        kw["lambda_exponents"] = tuple(cfg["lambda_exponents"])
    if "phi" in cfg:
        kw["phi"] = young_from_dict(cfg["phi"])
    if "eta" in cfg:
        kw["eta"] = young_from_dict(cfg["eta"])
    if "a" in cfg and "b" in cfg:
        kw["pair"] = GrowthPair(growth_from_dict(cfg["a"]),
                                growth_from_dict(cfg["b"]))
    if "p" in cfg:
        kw["p"] = cfg["p"]
    if "q" in cfg:
        kw["q"] = cfg["q"]
    if "a_exponent" in cfg:
        kw["a_exponent"] = cfg["a_exponent"]
    return harness.ExperimentConfig(**kw)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_sidecar(out_dir: Path, argv) -> None:
    _write_json(out_dir / "run_meta.json",
                {"argv": list(argv), "timestamp": time.time()})


def _finish_ratio(report, out_dir: Path, name: str) -> int:
    _write_json(out_dir / f"{name}.json", report.to_dict())
    report.write_csv(out_dir / f"{name}.csv")
    print(f"{name}: sup ratio {report.sup_ratio:.6g}, verdict {report.verdict}")
    return 3 if report.verdict == harness.FAIL else 0


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------

def _run_dini_check(cfg: dict, out_dir: Path, threads: int) -> int:
    pair = GrowthPair(growth_from_dict(cfg["a"]), growth_from_dict(cfg["b"]))
    eta = young_from_dict(cfg["eta"])
    t_grid = np.geomspace(cfg.get("t_min", 1e-4), cfg.get("t_max", 1e4),
                          cfg.get("t_points", 64))
    bracket = tuple(cfg.get("c_bracket", (2.0 ** -10, 2.0 ** 20)))
    report = dini_condition_check(pair, eta, t_grid=t_grid, c_bracket=bracket)
    _write_json(out_dir / "dini-check.json", report.to_dict())
    print(f"dini-check: verdict {report.verdict}, C = {report.constant}")
    return 3 if report.verdict == "FAIL" else 0


def _run_maximal_eval(cfg: dict, out_dir: Path, threads: int) -> int:
    domain = Domain.from_dict(cfg["domain"])
    rho = rho_from_dict(cfg["rho"])
    f = FunctionSpec.from_dict(cfg["function"]).sample(domain)
    op = cfg["operator"]
    kind = op.get("kind")
    sigma = op.get("sigma", 0.0)
    eta = young_from_dict(op["eta"]) if "eta" in op else None
    if kind == "hl":
        field = hl_maximal(f, sigma, rho)
    elif kind == "orlicz":
        field = orlicz_maximal(f, eta, sigma, rho)
    elif kind == "centered-ball":
        radii = cfg.get("radii")
        radii = np.asarray(radii) if radii else np.geomspace(
            domain.h, 2.0 * math.sqrt(domain.d) * domain.L, 48)
        field = centered_ball_maximal(f, eta, sigma, rho, radii)
    elif kind in ("local-part", "global-part"):
        loc, glob = local_global_split(f, eta, sigma, rho)
        field = loc if kind == "local-part" else glob
    else:
        raise ConfigError(f"maximal-eval does not support kind {kind!r}")
    payload = {"schema_version": SCHEMA_VERSION, "domain": domain.to_dict(),
               "operator": op,
               "values": [float(v) for v in field.values.ravel(order="C")]}
    _write_json(out_dir / "maximal-eval.json", payload)
    print(f"maximal-eval: {kind}, max {float(np.max(field.values)):.6g}")
    return 0


def _run_weights_estimate(cfg: dict, out_dir: Path, threads: int) -> int:
    domain = Domain.from_dict(cfg["domain"])
    rho = rho_from_dict(cfg["rho"])
    w = WeightSpec.from_dict(cfg["weight"]).sample(domain)
    theta = cfg.get("theta", 0.0)
    payload = {"schema_version": SCHEMA_VERSION, "theta": theta}
    if "p" in cfg:
        rep = ap_rho_constant(w, cfg["p"], theta, rho)
        payload["ap"] = {"p": cfg["p"], "constant": rep.constant,
                         "worst_center": list(rep.worst_center),
                         "worst_half_side": rep.worst_half_side,
                         "per_scale": list(rep.per_scale)}
    rep1 = a1_rho_constant(w, theta, rho)
    payload["a1"] = {"constant": rep1.constant,
                     "worst_center": list(rep1.worst_center),
                     "worst_half_side": rep1.worst_half_side,
                     "per_scale": list(rep1.per_scale)}
    payload["a1_pointwise"] = a1_pointwise_check(w, theta, rho)
    payload["a1_pointwise"]["worst_point"] = list(
        payload["a1_pointwise"]["worst_point"])
    _write_json(out_dir / "weights-estimate.json", payload)
    print(f"weights-estimate: A1 constant {rep1.constant:.6g}")
    return 0


def _run_covering(cfg: dict, out_dir: Path, threads: int) -> int:
    domain = Domain.from_dict(cfg["domain"])
    rho = rho_from_dict(cfg["rho"])
    cov = critical_covering(rho, domain)
    prof = overlap_profile(cov, cfg.get("sigmas", [1.0, 2.0, 4.0, 8.0]))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "centers": [list(c) for c in cov.centers],
        "radii": [float(r) for r in cov.radii],
        "covers_all_grid_points": cov.covers_all_grid_points(),
        "overlap": {"sigmas": [float(s) for s in prof["sigmas"]],
                    "max_counts": [int(c) for c in prof["max_counts"]],
                    "N1": prof["N1"], "C": prof["C"]},
    }
    _write_json(out_dir / "covering.json", payload)
    print(f"covering: {len(cov.radii)} cubes, fitted N1 {prof['N1']:.3g}")
    return 0


def _run_validate_rho(cfg: dict, out_dir: Path, threads: int) -> int:
    rho = rho_from_dict(cfg["rho"])
    if "pairs" in cfg:
        pairs = np.asarray(cfg["pairs"], dtype=float)
    else:
        rng = np.random.default_rng(cfg.get("seed", 0))
        d = cfg.get("d", 2)
        half = cfg.get("box_halfwidth", 10.0)
        n = cfg.get("n_pairs", 1000)
        pairs = rng.uniform(-half, half, size=(n, 2, d))
    report = validate_pairs(rho, pairs, C0=cfg.get("C0"), N0=cfg.get("N0"))
    payload = dict(report)
    payload["worst_pair"] = [list(report["worst_pair"][0]),
                             list(report["worst_pair"][1])]
    payload["schema_version"] = SCHEMA_VERSION
    _write_json(out_dir / "validate-rho.json", payload)
    print(f"validate-rho: ok={report['ok']} worst slack "
          f"{report['worst_slack']:.6g}")
    return 0 if report["ok"] else 3


def _run_selftest(cfg: dict, out_dir: Path, threads: int) -> int:
    """Closed-form oracle suite, a fast subset of the full test battery."""
    from .grids import Cube, SampledFunction
    from .operators import _damping
    from .orlicz import luxemburg_average
    from .radius import CriticalRadius
    from .young import GrowthFunction, YoungFunction
    import rho_maximal as rm

    checks = []

    def check(name, ok):
        checks.append((name, bool(ok)))
        print(f"{'PASS' if ok else 'FAIL'}  {name}")

    f2 = YoungFunction.power(2)
    check("conjugate of t^2 sends 1 to 1/4", abs(f2.complementary()(1.0) - 0.25) < 1e-12)
    t = np.geomspace(1e-3, 1e3, 16)
    prod = np.asarray(f2.inverse(t)) * np.asarray(f2.complementary().inverse(t))
    # the upper bound is exactly attained by the power pair; guard rounding
    check("inverse sandwich for t^2",
          np.all(prod >= t / 2 * (1 - 1e-9)) and np.all(prod <= 2 * t * (1 + 1e-9)))

    pair = GrowthPair(GrowthFunction.power(2), GrowthFunction.power(2))
    rep = dini_condition_check(pair, YoungFunction.identity())
    check("integral condition constant ~ 2^(-1/3)",
          rep.verdict == "OK" and abs(rep.constant - 2 ** (-1 / 3)) < 0.05 * 2 ** (-1 / 3))
    rep2 = dini_condition_check(pair, YoungFunction.power(3))
    check("divergent gauge detected", rep2.verdict == "FAIL")

    dom = rm.Domain(1, 4.0, 32)
    rng = np.random.default_rng(0)
    f = SampledFunction(dom, rng.uniform(0.0, 2.0, dom.shape))
    rho = CriticalRadius.inverse_power(1.0)
    fam = rm.CubeFamily(dom)
    m = rm.hl_maximal(f, 1.0, rho, fam)
    out = np.zeros(dom.shape)
    rho_grid = rho.on_grid(dom)
    for k, s in enumerate(fam.half_sides):
        damp = _damping(rho_grid, math.sqrt(dom.d) * float(s), 1.0)
        for j in range(dom.N):
            cube = Cube((float(dom.axis[j]),), float(s))
            val = (rm.integrate(f, cube) / cube.measure) * damp[j]
            lo = cube.center[0] - cube.half_side
            hi = cube.center[0] + cube.half_side
            inside = (dom.axis > lo) & (dom.axis < hi)
            out[inside] = np.maximum(out[inside], val)
    check("maximal equals brute force", np.array_equal(out, m.values))

    cube = Cube((0.5,), 1.0)
    lux = luxemburg_average(f, cube, YoungFunction.power(2))
    closed = math.sqrt(rm.integrate(SampledFunction(dom, f.values ** 2), cube)
                       / cube.measure)
    check("Luxemburg power identity", abs(lux - closed) <= 1e-8 * closed)

    cov = critical_covering(rho, dom)
    check("critical covering covers the grid", cov.covers_all_grid_points())

    ok = all(flag for _, flag in checks)
    _write_json(out_dir / "selftest.json",
                {"schema_version": SCHEMA_VERSION,
                 "checks": [{"name": n, "ok": o} for n, o in checks],
                 "ok": ok})
    return 0 if ok else 3


_EXPERIMENTS = {
    "weak-type": harness.weak_type_experiment,
    "strong-type": harness.strong_type_experiment,
    "modular-fs": harness.modular_fefferman_stein_experiment,
    "norm-fs": harness.norm_fefferman_stein_experiment,
    "two-weight": harness.two_weight_quotient_experiment,
}


def _run_experiment(name: str, cfg: dict, out_dir: Path, threads: int) -> int:
    report = _EXPERIMENTS[name](_experiment_config(cfg, threads))
    return _finish_ratio(report, out_dir, name)


_RUNNERS = {
    "dini-check": _run_dini_check,
    "maximal-eval": _run_maximal_eval,
    "weights-estimate": _run_weights_estimate,
    "covering": _run_covering,
    "validate-rho": _run_validate_rho,
    "selftest": _run_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rho-maximal",
        description="Experiments on critical-radius-weighted maximal operators")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _SCHEMAS:
        p = sub.add_parser(name)
        if name != "selftest":
            p.add_argument("--config", required=True,
                           help="JSON config (schema_version 1)")
        p.add_argument("--out", default="reports", help="output directory")
        p.add_argument("--set", action="append", dest="overrides", default=[],
                       metavar="KEY=VALUE", help="dotted-path config override")
        p.add_argument("--threads", type=int, default=None,
                       help="worker cap (fallback: RHO_MAXIMAL_THREADS)")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    name = args.subcommand
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("RHO_MAXIMAL_THREADS", "1"))
    out_dir = Path(args.out)
    try:
        if name == "selftest":
            cfg = {"schema_version": SCHEMA_VERSION}
        else:
            cfg = _load_config(args.config, name, args.overrides)
        if "threads" in cfg and args.threads is None:
            threads = int(cfg["threads"])
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_sidecar(out_dir, ["rho-maximal", name])
        if name in _RUNNERS:
            code = _RUNNERS[name](cfg, out_dir, threads)
        else:
            code = _run_experiment(name, cfg, out_dir, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
