"""``cat0lab`` command line: audit, iterate, fixedpoint, bounds, suggest.

Every subcommand reads an optional JSON config (``--config``); flags override
config values and ``CAT0LAB_SEED`` supplies the default seed. Exit codes:
0 all checks passed, 1 a mathematical check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Any

from . import serialize
from .audit import (AuditSpec, ModulusProbe, check_busemann, check_cat0, check_convex_structure,
                    check_implication, check_midpoint_pair_bound, check_p_convexity,
                    estimate_uc_modulus)
from .dynamics import (QtConfig, batch_iterated, batch_slices, batch_two_map, check_decay,
                       compute_zt, random_tuples)
from .maps import Contraction, LipschitzMap, audit_lipschitz, map_from_json
from .reports import ViolationReport
from .scheme import (InsufficientTraceError, ScheduleConfig, audit_monotone, audit_product_bound,
                     audit_step_bound, run_scheme, suggest_blend)
from .spaces import (GeodesicSpace, MetricTree, Point, audit_metric_axioms, coerce_point,
                     space_from_name)

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2

AUDIT_CHECKS = ("p_convexity", "midpoint_pair", "busemann", "convex_structure", "uc_modulus",
                "cat0", "implication", "metric_axioms", "lipschitz")
BOUND_CHECKS = ("two_map", "iterated", "decay", "slices")
SCHEME_AUDITS = ("step_bound", "product", "monotone")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing


def _parse_p(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    p = float(v)
    if not p >= 1.0:
        raise ConfigError(f"p={v} must be >= 1 or 'inf'")
    return p


def _parse_t_list(v) -> list[float]:
    if isinstance(v, (int, float)):
        return [float(v)]
    if isinstance(v, list):
        return [float(u) for u in v]
    s = str(v).strip()
    if s.startswith("["):
        return _parse_t_list(json.loads(s))
    return [float(u) for u in s.split(",") if u.strip()]


def _maybe_json(s: str):
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s


def load_config(args: argparse.Namespace) -> dict[str, Any]:
    """Merge config file, environment seed and flags (flags win)."""
    cfg: dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    if "seed" not in cfg:
        env = os.environ.get("CAT0LAB_SEED")
        if env is not None:
            cfg["seed"] = env
    for key, val in vars(args).items():
        if key in ("config", "command", "func") or val is None:
            continue
        cfg[key] = val
    try:
        cfg["seed"] = int(cfg.get("seed", 0))
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {cfg.get('seed')!r}") from None
    return cfg


def _digest(cfg: dict) -> str:
    return serialize.digest({k: v for k, v in cfg.items() if k != "out"})


def _space(cfg) -> GeodesicSpace:
    spec = cfg.get("space", "euclidean:2")
    if isinstance(spec, dict):
        return MetricTree.load(spec, name=spec.get("name", "custom"))
    try:
        return space_from_name(str(spec))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid space {spec!r}: {exc}") from None


def parse_point(space: GeodesicSpace, v) -> Point:
    """Flag values arrive as strings; decode JSON before coercing."""
    if isinstance(v, str):
        v = _maybe_json(v)
    return coerce_point(space, v)


def _map(space, cfg, key, k_key) -> LipschitzMap:
    doc = cfg.get(key)
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc is not None:
        return map_from_json(space, doc)
    factor = float(cfg.get(k_key, 0.5))
    declared = cfg.get("declared_k")
    return Contraction(space.origin(), factor, None if declared is None else float(declared))


def _write(cfg, name: str, text: str) -> None:
    if cfg.get("out"):
        try:
            serialize.write_text(Path(cfg["out"]) / name, text)
        except OSError as exc:
            raise ConfigError(f"cannot write {name}: {exc}") from None


def _finish(cfg, summary: dict, code: int) -> int:
    summary.update(seed=cfg["seed"], config_digest=_digest(cfg), exit_code=code)
    text = serialize.dumps(summary)
    _write(cfg, "summary.json", text)
    sys.stdout.write(text)
    return code


# ---------------------------------------------------------------------------
# subcommands


def _audit_spec(cfg) -> AuditSpec:
    tol = cfg.get("tol")
    return AuditSpec(p=_parse_p(cfg.get("p", 2.0)), sample_count=int(cfg.get("samples", 10_000)),
                     seed=cfg["seed"], tol=None if tol is None else float(tol),
                     strict=bool(cfg.get("strict", False)))


def _uc_report(space, spec, cfg) -> dict:
    probe = ModulusProbe(epsilon=float(cfg.get("epsilon", 1.0)), r=float(cfg.get("radius", 1.0)))
    est = estimate_uc_modulus(space, probe, float(cfg.get("uc_p", 1.0)), spec)
    return {"check": "uc_modulus", "space": space.id, "samples": spec.sample_count,
            "epsilon": est.epsilon, "r": est.r, "p": est.p,
            "estimated_delta": est.estimated_delta, "sup_ratio": est.sup_ratio,
            "admissible": est.admissible, "passed": True,
            "status": "inconclusive" if est.inconclusive else "ok",
            "witness": None if est.witness is None else
            {k: space.to_json(v) for k, v in est.witness.items()}}


def _run_check(name, space, spec, cfg) -> dict:
    if name == "uc_modulus":
        return _uc_report(space, spec, cfg)
    if name == "p_convexity":
        rep = check_p_convexity(space, spec)
    elif name == "midpoint_pair":
        if math.isinf(spec.p):
            raise ConfigError("midpoint_pair needs a finite p")
        rep = check_midpoint_pair_bound(space, spec)
    elif name == "busemann":
        rep = check_busemann(space, spec, use_min=bool(cfg.get("use_min", False)))
    elif name == "convex_structure":
        rep = check_convex_structure(space, spec)
    elif name == "cat0":
        rep = check_cat0(space, spec)
    elif name == "implication":
        rep = check_implication(space, cfg.get("kind", "midpoint=>1-convex"), spec)
    elif name == "metric_axioms":
        rep = audit_metric_axioms(space, spec.sample_count, spec.seed)
    else:
        rep = audit_lipschitz(space, _map(space, cfg, "map", "ks"), spec)
    return rep.to_dict(space)


def cmd_audit(cfg) -> int:
    checks = cfg.get("check") or []
    if isinstance(checks, str):
        checks = [checks]
    checks = [c for item in checks for c in str(item).split(",") if c]
    if not checks:
        raise ConfigError("no checks requested (use --check)")
    unknown = [c for c in checks if c not in AUDIT_CHECKS]
    if unknown:
        raise ConfigError(f"unknown check {unknown[0]!r}; choose from {', '.join(AUDIT_CHECKS)}")
    space = _space(cfg)
    spec = _audit_spec(cfg)
    digest = _digest(cfg)
    results = {}
    for name in checks:
        doc = _run_check(name, space, spec, cfg)
        doc.update(seed=cfg["seed"], config_digest=digest)
        _write(cfg, f"{name}.json", serialize.dumps(doc))
        results[name] = doc
    ok = all(d["passed"] for d in results.values())
    summary = {"command": "audit", "space": space.id,
               "checks": {k: {"passed": d["passed"], "status": d.get("status"),
                              "worst_residual": d.get("worst_residual")}
                          for k, d in results.items()}}
    return _finish(cfg, summary, EXIT_OK if ok else EXIT_VIOLATION)


def _initial(space, cfg, key, rng):
    if cfg.get(key) is not None:
        return parse_point(space, cfg[key])
    return space.sample(rng)


def cmd_iterate(cfg) -> int:
    import numpy as np

    space = _space(cfg)
    rng = np.random.default_rng(cfg["seed"])
    x0, x1 = _initial(space, cfg, "x0", rng), _initial(space, cfg, "x1", rng)
    ts = _parse_t_list(cfg.get("t", 0.5))
    if not ts:
        raise ConfigError("iterate needs at least one blend weight t")
    steps = int(cfg.get("steps", 100))
    sched = ts[0] if len(ts) == 1 else ts
    S, T = _map(space, cfg, "S", "ks"), _map(space, cfg, "T", "kt")
    sc = ScheduleConfig(sched, S, T, steps, x0, x1, stop_tol=float(cfg.get("stop_tol", 1e-15)))
    audits = cfg.get("audits", list(SCHEME_AUDITS))
    if isinstance(audits, str):
        audits = [a for a in audits.split(",") if a]
    bad = [a for a in audits if a not in SCHEME_AUDITS]
    if bad:
        raise ConfigError(f"unknown scheme audit {bad[0]!r}")
    m = int(cfg.get("m", 2))
    tol = cfg.get("tol")
    tol = space.default_tol if tol is None else float(tol)

    try:
        trace = run_scheme(space, sc)
    except FloatingPointError as exc:
        return _finish(cfg, {"command": "iterate", "error": str(exc)}, EXIT_VIOLATION)
    _write(cfg, "trace.csv", serialize.trace_csv(trace))

    results: dict[str, Any] = {}
    failed = False
    for name in audits:
        try:
            if name == "step_bound":
                rep = audit_step_bound(trace, tol)
                results[name] = _brief(rep)
                failed |= not rep.passed
            elif name == "monotone":
                rep = audit_monotone(trace, tol)
                results[name] = _brief(rep)
                failed |= not rep.passed
            else:
                recs = [audit_product_bound(trace, n, m, tol)
                        for n in range(len(trace.step_dists) - m)]
                if not recs:
                    raise InsufficientTraceError(f"product bound with m={m} needs a longer trace")
                worst = min(recs, key=lambda r: r.residual)
                passed = worst.residual >= -tol
                results[name] = {"m": m, "records": len(recs), "passed": passed,
                                 "worst_residual": worst.residual, "worst_n": worst.n,
                                 "vacuous": sum(r.label == "product_vacuous" for r in recs)}
                failed |= not passed
        except InsufficientTraceError as exc:
            results[name] = {"status": "insufficient trace", "reason": str(exc), "passed": None}

    a = trace.step_dists
    converge_tol = float(cfg.get("converge_tol", 1e-9))
    summary = {"command": "iterate", "space": space.id, "steps": len(trace.steps) - 2,
               "converged": bool(a) and a[-1] <= converge_tol, "converge_tol": converge_tol,
               "stopped_early": trace.stopped_early, "final_step_dist": a[-1] if a else None,
               "min_residuals": {
                   "step_bound": _min([s.step_bound_residual for s in trace.steps]),
                   "monotone": _min([s.monotone_residual for s in trace.steps])},
               "audits": results}
    return _finish(cfg, summary, EXIT_VIOLATION if failed else EXIT_OK)


def _min(vals):
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def _brief(rep: ViolationReport) -> dict:
    return {"passed": rep.passed, "status": rep.to_dict()["status"], "worst_residual": rep.worst_residual,
            "checked": rep.checked, **{k: v for k, v in rep.extras.items()
                                       if isinstance(v, (int, float, str, bool, list))
                                       or v is None}}


def cmd_fixedpoint(cfg) -> int:
    space = _space(cfg)
    S, T = _map(space, cfg, "S", "ks"), _map(space, cfg, "T", "kt")
    need = cfg.get("contractive", ["S", "T"])
    for label, m in (("S", S), ("T", T)):
        if label in need and not m.declared_k < 1.0:
            raise ConfigError(f"{label} must be a strict contraction (declared K={m.declared_k})")
    if "T" not in need and not T.declared_k < 1.0:
        raise ConfigError("T must be a strict contraction")
    ts = _parse_t_list(cfg.get("t", [0.0, 0.5, 1.0]))
    p0 = parse_point(space, cfg["x0"]) if cfg.get("x0") is not None else space.origin()
    x0 = parse_point(space, cfg["x1"]) if cfg.get("x1") is not None else p0
    tol = float(cfg.get("fp_tol", 1e-12))
    max_iter = int(cfg.get("max_iter", 10_000))
    rows, ok = [], True
    p_star = y_star = None
    for t in ts:
        try:
            z = compute_zt(space, QtConfig(t, S, T), p0, x0, tol, max_iter)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        ok &= z.converged
        p_star, y_star = z.p_star, z.y_star
        rows.append({"t": t, "z": space.to_json(z.point), "converged": z.converged,
                     "geodesic_residual": z.geodesic_residual,
                     "ratio_residual": z.ratio_residual, "endpoint_residual": z.endpoint_residual,
                     "blend_gap": z.blend_gap})
    summary = {"command": "fixedpoint", "space": space.id, "results": rows}
    for key, fp in (("p_star", p_star), ("y_star", y_star)):
        if fp is not None:
            summary[key] = {"point": space.to_json(fp.point), "iterations": fp.iterations,
                            "final_step": fp.final_step, "converged": fp.converged}
    if not ok:
        summary["diagnostics"] = "fixed-point iteration did not converge within max_iter"
    return _finish(cfg, summary, EXIT_OK if ok else EXIT_VIOLATION)


def cmd_bounds(cfg) -> int:
    check = cfg.get("check") or ["two_map"]
    check = check[0] if isinstance(check, list) else check
    if check not in BOUND_CHECKS:
        raise ConfigError(f"unknown check {check!r}; choose from {', '.join(BOUND_CHECKS)}")
    tuples = int(cfg.get("tuples", 100))
    if tuples < 1:
        raise ConfigError("--tuples must be >= 1")
    space = _space(cfg)
    S, T = _map(space, cfg, "S", "ks"), _map(space, cfg, "T", "kt")
    ts = _parse_t_list(cfg.get("t", 0.5))
    if not ts:
        raise ConfigError("bounds needs at least one blend weight t")
    n = int(cfg.get("n", 50 if check == "decay" else 3))
    m = int(cfg.get("m", 2))
    tol = cfg.get("tol")
    tol = space.default_tol if tol is None else float(tol)
    seed = cfg["seed"]

    records, decay_failed, modes = [], False, set()
    for t in ts:
        qc = QtConfig(t, S, T)
        if check == "two_map":
            records += batch_two_map(space, qc, tuples, seed)
        elif check == "iterated":
            records += batch_iterated(space, qc, tuples, n, seed)
        elif check == "slices":
            records += batch_slices(space, qc, tuples, n, m, seed)
        else:
            for tup in random_tuples(space, tuples, seed):
                rep = check_decay(space, qc, *tup, n, tol=float(cfg.get("decay_tol", 1e-9)))
                modes.add(rep.mode)
                records += rep.records
                decay_failed |= rep.passed is False
    _write(cfg, "bounds.csv", serialize.records_csv(space, records))
    bad = [r for r in records if not r.ok(tol)]
    summary = {"command": "bounds", "check": check, "space": space.id, "records": len(records),
               "violations": len(bad),
               "min_residual": min((r.residual for r in records), default=None)}
    if check == "decay":
        summary["modes"] = sorted(modes)
        finals = [r.lhs for r in records if r.n == n]
        summary["max_final_distance"] = max(finals, default=None)
    failed = bool(bad) or decay_failed
    return _finish(cfg, summary, EXIT_VIOLATION if failed else EXIT_OK)


def cmd_suggest(cfg) -> int:
    try:
        ks, kt, theta = float(cfg["ks"]), float(cfg["kt"]), float(cfg["theta"])
    except KeyError as exc:
        raise ConfigError(f"suggest needs --ks, --kt and --theta (missing {exc})") from None
    ivs = suggest_blend(ks, kt, theta, strict=bool(cfg.get("strict", False)))
    summary = {"command": "suggest", "K_S": ks, "K_T": kt, "theta": theta,
               "intervals": [{"lo": iv.lo, "hi": iv.hi, "lo_closed": iv.lo_closed,
                              "hi_closed": iv.hi_closed} for iv in ivs]}
    return _finish(cfg, summary, EXIT_OK)


COMMANDS = {"audit": cmd_audit, "iterate": cmd_iterate, "fixedpoint": cmd_fixedpoint,
            "bounds": cmd_bounds, "suggest": cmd_suggest}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cat0lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--space", help="euclidean:N, disk, tree:star3, tree:path4 or tree:<file>")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", help="output directory")
    common.add_argument("--ks", type=float, help="contraction factor of S")
    common.add_argument("--kt", type=float, help="contraction factor of T")
    common.add_argument("--declared-k", dest="declared_k", type=float,
                        help="declared Lipschitz constant overriding the true one")
    common.add_argument("--t", help="blend weight(s): 0.5 or 0,0.5,1")

    a = sub.add_parser("audit", parents=[common], help="sampled inequality audits")
    a.add_argument("--check", action="append", help="check name (repeatable)")
    a.add_argument("--p")
    a.add_argument("--samples", type=int)
    a.add_argument("--strict", action="store_true", default=None)
    a.add_argument("--kind", help="implication kind")
    a.add_argument("--epsilon", type=float)
    a.add_argument("--radius", type=float)

    it = sub.add_parser("iterate", parents=[common], help="run the two-step scheme")
    it.add_argument("--steps", type=int)
    it.add_argument("--x0")
    it.add_argument("--x1")
    it.add_argument("--m", type=int, help="product length for the product bound")
    it.add_argument("--audits", help="comma list of step_bound,product,monotone")

    fp = sub.add_parser("fixedpoint", parents=[common], help="fixed points and z_t")
    fp.add_argument("--x0", help="starting point for S")
    fp.add_argument("--x1", help="starting point for T")

    b = sub.add_parser("bounds", parents=[common], help="two-map bounds over random tuples")
    b.add_argument("--check", action="append")
    b.add_argument("--tuples", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--m", type=int)

    s = sub.add_parser("suggest", parents=[common], help="blend weights with rho <= 1")
    s.add_argument("--theta", type=float)
    s.add_argument("--strict", action="store_true", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"cat0lab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, TypeError) as exc:
        print(f"cat0lab: error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
