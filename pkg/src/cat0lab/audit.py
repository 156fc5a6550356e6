"""Sampling audits of convexity and curvature inequalities.

Each check draws random configurations from a space, evaluates
``residual = RHS - LHS`` of one inequality and keeps the most negative value
together with the configuration that produced it. A report passes when
``worst_residual >= -tol``.

The residual functions are plain module-level functions listed in
:data:`RESIDUALS`; :func:`reevaluate` feeds a report's witness back through
them.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .reports import Tracker, ViolationReport
from .spaces import GeodesicSpace, PoincareDisk, Point

INF = math.inf

# relative slack on the admissibility constraints of the modulus probe
_ADMISSIBLE_SLACK = 1e-12
# hyperbolic radius of the disk sampling region (Euclidean radius 0.9)
_DISK_REGION = 2.0 * math.atanh(0.9)


@dataclass(frozen=True)
class AuditSpec:
    """Parameters shared by the audits.

    ``p`` is the convexity order in ``[1, inf]``; use :data:`INF` for the
    ball-convex case. ``tol=None`` selects the space default (1e-9 for
    Euclidean spaces and trees, 1e-7 for the disk).
    """

    p: float = 2.0
    sample_count: int = 10_000
    seed: int = 0
    tol: float | None = None
    strict: bool = False

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise ValueError(f"convexity order p={self.p} must be >= 1")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.tol is not None and self.tol < 0:
            raise ValueError("tol must be >= 0")

    def tol_for(self, space: GeodesicSpace) -> float:
        return space.default_tol if self.tol is None else self.tol


@dataclass
class ModulusProbe:
    """Probe of the modulus of uniform convexity at ``(epsilon, r)``.

    ``estimated_delta`` stays None until estimated, and also when no
    admissible configuration was found (``inconclusive``).
    """

    epsilon: float
    r: float = 1.0
    estimated_delta: float | None = None
    sup_ratio: float | None = None
    p: float = 1.0
    admissible: int = 0
    witness: dict[str, Any] | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 2.0):
            raise ValueError(f"epsilon={self.epsilon} outside (0, 2]")
        if not (self.r > 0.0):
            raise ValueError(f"radius r={self.r} must be positive")

    @property
    def inconclusive(self) -> bool:
        return self.estimated_delta is None


# ---------------------------------------------------------------------------
# residual functions


def power_mean(a: float, b: float, p: float) -> float:
    """``(1/2 (a^p + b^p))^(1/p)``, the max for ``p = inf``."""
    if math.isinf(p):
        return max(a, b)
    if p == 1.0:
        return 0.5 * (a + b)
    return (0.5 * (a ** p + b ** p)) ** (1.0 / p)


def p_convexity_residual(space, x, y, z, p):
    m = space.midpoint(x, y)
    return power_mean(space.distance(x, z), space.distance(y, z), p) - space.distance(m, z)


def midpoint_pair_residual(space, x, y, z, w, p):
    if math.isinf(p):
        raise ValueError("the four-point midpoint bound is stated for finite p only")
    d = space.distance
    rhs = (0.25 * (d(x, z) ** p + d(x, w) ** p + d(y, z) ** p + d(y, w) ** p)) ** (1.0 / p)
    return rhs - d(space.midpoint(x, y), space.midpoint(z, w))


def busemann_residual(space, x, y, z, w, p, use_min=False):
    d = space.distance
    rhs = power_mean(d(x, z), d(y, w), p)
    if use_min:
        rhs = min(rhs, power_mean(d(x, w), d(y, z), p))
    return rhs - d(space.midpoint(x, y), space.midpoint(z, w))


def convex_structure_residual(space, x, y, z, t):
    d = space.distance
    return t * d(z, x) + (1.0 - t) * d(z, y) - d(z, space.combine(x, y, t))


def cat0_residual(space, x, y, z, t):
    # (1-t) x (+) t y is combine(x, y, 1 - t)
    d = space.distance
    lhs = d(space.combine(x, y, 1.0 - t), z) ** 2
    return (1.0 - t) * d(z, x) ** 2 + t * d(z, y) ** 2 - t * (1.0 - t) * d(x, y) ** 2 - lhs


def midpoint_residual(space, x, y):
    """Minus the deviation of the computed midpoint from d(x, y)/2 to each end."""
    m = space.midpoint(x, y)
    half = 0.5 * space.distance(x, y)
    return -max(abs(space.distance(x, m) - half), abs(space.distance(y, m) - half))


def _uc_hypothesis(space, x, y, z, r, delta):
    return r * (1.0 - delta) - space.distance(z, space.midpoint(x, y))


def _uc_conclusion(space, x, y, z, r, delta, p):
    return r * (1.0 - delta) ** (1.0 / p) - space.distance(z, space.midpoint(x, y))


def implication_residual(space, kind, p=1.0, r=None, delta=None, **pts):
    kind = normalize_kind(kind)
    if kind == "midpoint=>1-convex":
        return p_convexity_residual(space, pts["x"], pts["y"], pts["z"], 1.0)
    if kind == "busemann&midpoint=>p-convex":
        return p_convexity_residual(space, pts["x"], pts["y"], pts["z"], p)
    return _uc_conclusion(space, pts["x"], pts["y"], pts["z"], r, delta, p)


RESIDUALS = {
    "p_convexity": p_convexity_residual,
    "midpoint_pair": midpoint_pair_residual,
    "busemann": busemann_residual,
    "convex_structure": convex_structure_residual,
    "cat0": cat0_residual,
    "implication": implication_residual,
}


def reevaluate(space: GeodesicSpace, report: ViolationReport) -> float:
    """Residual of ``report``'s witness, recomputed from scratch."""
    if report.witness is None:
        raise ValueError("report has no witness")
    return RESIDUALS[report.check](space, **report.witness, **report.params)


# ---------------------------------------------------------------------------
# audits


def _draw(space, rng, names, with_t=False):
    w = {n: space.sample(rng) for n in names}
    if with_t:
        w["t"] = float(rng.uniform())
    return w


def _run(check, space, spec, names, residual, params, with_t=False):
    rng = np.random.default_rng(spec.seed)
    tr = Tracker()
    for _ in range(spec.sample_count):
        w = _draw(space, rng, names, with_t)
        tr.add(residual(space, **w, **params), w)
    return tr.report(check, space.id, spec.tol_for(space), params)


def check_p_convexity(space: GeodesicSpace, spec: AuditSpec) -> ViolationReport:
    """Midpoint p-convexity: ``d(m(x,y), z) <= (1/2 (d^p(x,z) + d^p(y,z)))^(1/p)``.

    Also tracks, for finite p, the two valid links of the relaxed chain
    ``d(m, z) <= (1/2)^(1/p) (d(x,z) + d(y,z))`` (``eq2_relaxed``) and
    ``d(m, z) <= (d(x,z) + d(y,z)) / 2`` (``eq2_outer``), plus the middle link
    ``(1/2)^(1/p) (a + b) <= (a + b) / 2`` which only holds for p = 1
    (``eq2_middle``; informational, not part of ``passed``).

    With ``spec.strict`` the inequality must be strict whenever ``x != y``
    (for ``p = 1``: whenever ``d(x,y) > |d(x,z) - d(y,z)|``); samples where it
    is not are counted in ``extras["strict_failures"]`` and fail the report.
    """
    p = spec.p
    rng = np.random.default_rng(spec.seed)
    tr, relaxed, outer, middle = Tracker(), Tracker(), Tracker(), Tracker()
    strict_failures, strict_witness = 0, None
    for _ in range(spec.sample_count):
        w = _draw(space, rng, ("x", "y", "z"))
        x, y, z = w["x"], w["y"], w["z"]
        a, b = space.distance(x, z), space.distance(y, z)
        lhs = space.distance(space.midpoint(x, y), z)
        res = power_mean(a, b, p) - lhs
        tr.add(res, w)
        if not math.isinf(p):
            c = 0.5 ** (1.0 / p)
            relaxed.add(c * (a + b) - lhs, w)
            outer.add(0.5 * (a + b) - lhs, w)
            middle.add(0.5 * (a + b) - c * (a + b), w)
        if spec.strict:
            dxy = space.distance(x, y)
            qualifies = dxy > abs(a - b) if p == 1.0 else dxy > 0.0
            if qualifies and res <= 0.0:
                strict_failures += 1
                strict_witness = strict_witness or w
    report = tr.report("p_convexity", space.id, spec.tol_for(space), {"p": p})
    if not math.isinf(p):
        report.extras.update(eq2_relaxed=relaxed.worst, eq2_outer=outer.worst,
                             eq2_middle=middle.worst)
    if spec.strict:
        report.extras["strict_failures"] = strict_failures
        if strict_witness is not None:
            report.extras["strict_witness"] = {k: str(v) for k, v in strict_witness.items()}
        if strict_failures:
            report.status = "failed"
    return report


def check_midpoint_pair_bound(space: GeodesicSpace, spec: AuditSpec) -> ViolationReport:
    """``d(m(x,y), m(z,w)) <= (1/4 sum of d^p over the four cross pairs)^(1/p)``."""
    if math.isinf(spec.p):
        raise ValueError("the four-point midpoint bound is stated for finite p only")
    return _run("midpoint_pair", space, spec, ("x", "y", "z", "w"),
                midpoint_pair_residual, {"p": spec.p})


def check_busemann(space: GeodesicSpace, spec: AuditSpec, use_min: bool = False) -> ViolationReport:
    """p-Busemann curvature: ``d(m(x,y), m(z,w)) <= power_mean(d(x,z), d(y,w))``.

    ``use_min`` tightens the right side to the minimum over both pairings
    (valid because midpoints are unique in every model space).
    """
    return _run("busemann", space, spec, ("x", "y", "z", "w"), busemann_residual,
                {"p": spec.p, "use_min": bool(use_min)})


def check_convex_structure(space: GeodesicSpace, spec: AuditSpec) -> ViolationReport:
    """Takahashi inequality ``d(z, W(x,y,t)) <= t d(z,x) + (1-t) d(z,y)`` with
    ``W = combine``."""
    return _run("convex_structure", space, spec, ("x", "y", "z"),
                convex_structure_residual, {}, with_t=True)


def check_cat0(space: GeodesicSpace, spec: AuditSpec) -> ViolationReport:
    """CAT(0) inequality
    ``d^2((1-t)x (+) t y, z) <= (1-t) d^2(z,x) + t d^2(z,y) - t(1-t) d^2(x,y)``."""
    return _run("cat0", space, spec, ("x", "y", "z"), cat0_residual, {}, with_t=True)


# ---------------------------------------------------------------------------
# modulus of uniform convexity


def _center_sampler(space, r):
    if isinstance(space, PoincareDisk):
        if r >= _DISK_REGION:
            raise ValueError(f"r={r} too large: balls must fit in the sampling region "
                             f"(hyperbolic radius {_DISK_REGION:.4f})")
        o = space.origin()
        return lambda rng: space.sample_near(o, _DISK_REGION - r, rng)
    return space.sample


def _modulus_candidates(space, r, eps, spec):
    """Yield admissible (x, y, z) configurations: both ends within r of z and
    d(x, y) >= r eps (up to a relative slack of 1e-12)."""
    rng = np.random.default_rng(spec.seed)
    center = _center_sampler(space, r)
    r_hi = r * (1.0 + _ADMISSIBLE_SLACK)
    sep = r * eps * (1.0 - _ADMISSIBLE_SLACK)
    for _ in range(spec.sample_count):
        z = center(rng)
        x = space.sample_near(z, r, rng, on_sphere=rng.uniform() < 0.5)
        if rng.uniform() < 0.5:
            y = space.sample_near(z, r, rng, on_sphere=rng.uniform() < 0.5)
        else:
            length = r if rng.uniform() < 0.5 else r * rng.uniform()
            y = space.extend(x, z, length, rng)
            if y is None:
                continue
        if max(space.distance(x, z), space.distance(y, z)) > r_hi:
            continue
        if space.distance(x, y) < sep:
            continue
        yield {"x": x, "y": y, "z": z}


def _ratio(space, w, r):
    return space.distance(w["z"], space.midpoint(w["x"], w["y"])) / r


def _admissible(space, w, r, eps):
    return (max(space.distance(w["x"], w["z"]), space.distance(w["y"], w["z"]))
            <= r * (1.0 + _ADMISSIBLE_SLACK)
            and space.distance(w["x"], w["y"]) >= r * eps * (1.0 - _ADMISSIBLE_SLACK))


def _hill_climb(space, w, r, eps, steps=100):
    """Coordinate ascent on the midpoint ratio, staying admissible."""
    best = _ratio(space, w, r)
    h = 0.05 * r
    for _ in range(steps):
        improved = None
        for name in ("x", "y", "z"):
            for i in range(space.n_coords):
                for sgn in (1.0, -1.0):
                    q = space.nudge(w[name], i, sgn * h)
                    if q is None:
                        continue
                    cand = dict(w, **{name: q})
                    if not _admissible(space, cand, r, eps):
                        continue
                    val = _ratio(space, cand, r)
                    if val > best:
                        best, improved = val, cand
        if improved is None:
            h *= 0.5
        else:
            w = improved
    return best, w


def estimate_uc_modulus(space: GeodesicSpace, probe: ModulusProbe, p: float = 1.0,
                        spec: AuditSpec | None = None, refine_steps: int = 100) -> ModulusProbe:
    """Estimate the modulus of uniform (p-)convexity at ``(probe.epsilon, probe.r)``.

    ``sup_ratio`` is the largest ``d(z, m(x,y)) / r`` found over admissible
    configurations (``max(d(x,z), d(y,z)) <= r`` and ``d(x,y) >= r eps``),
    first by rejection sampling and then by coordinate hill-climbing from the
    best sample. The estimate is ``1 - sup_ratio**p`` clamped to [0, 1];
    ``p = 1`` is plain uniform convexity.

    Returns a new probe; it is inconclusive (``estimated_delta is None``) when
    no admissible configuration turned up.
    """
    if not (p >= 1.0):
        raise ValueError("p must be >= 1")
    spec = spec or AuditSpec(sample_count=10_000)
    r, eps = probe.r, probe.epsilon
    best, best_w, count = -1.0, None, 0
    for w in _modulus_candidates(space, r, eps, spec):
        count += 1
        val = _ratio(space, w, r)
        if val > best:
            best, best_w = val, w
    if best_w is None:
        return dataclasses.replace(probe, estimated_delta=None, sup_ratio=None, p=p,
                                   admissible=0, witness=None)
    if refine_steps:
        best, best_w = _hill_climb(space, best_w, r, eps, refine_steps)
    delta = min(max(1.0 - best ** p, 0.0), 1.0) if math.isfinite(p) else (1.0 if best < 1 else 0.0)
    return dataclasses.replace(probe, estimated_delta=delta, sup_ratio=best, p=p,
                               admissible=count, witness=best_w)


# ---------------------------------------------------------------------------
# implications between the properties

_KINDS = {
    "midpoint=>1-convex": "midpoint=>1-convex",
    "midpoint⇒1-convex": "midpoint=>1-convex",
    "busemann&midpoint=>p-convex": "busemann&midpoint=>p-convex",
    "busemann∧midpoint⇒p-convex": "busemann&midpoint=>p-convex",
    "uc=>uc-p": "uc=>uc-p",
    "uc⇒uc-p": "uc=>uc-p",
}


def normalize_kind(kind: str) -> str:
    try:
        return _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown implication kind {kind!r}; "
                         f"expected one of {sorted(set(_KINDS.values()))}") from None


def check_implication(space: GeodesicSpace, kind: str, spec: AuditSpec,
                      probe: ModulusProbe | None = None) -> ViolationReport:
    """Sample-level check that a hypothesis inequality implies a conclusion.

    Hypothesis and conclusion are evaluated on the same sampled tuple;
    ``worst_residual`` is the worst conclusion residual among tuples where
    every hypothesis holds (0 when none do, i.e. vacuous). Kinds:

    ``midpoint=>1-convex``
        midpoints are exact  =>  1-convexity.
    ``busemann&midpoint=>p-convex``
        exact midpoints and p-Busemann on ``(x,y,z,w)`` and ``(x,y,z,z)``
        =>  p-convexity on ``(x,y,z)``.
    ``uc=>uc-p``
        ``d(z, m) <= r (1 - delta)``  =>  ``d(z, m) <= r (1 - delta)^(1/p)``,
        with ``delta`` first estimated from ``probe`` (default eps=1, r=1).
    """
    kind = normalize_kind(kind)
    tol = spec.tol_for(space)
    p = spec.p
    concl, hyp_worst = Tracker(), Tracker()
    held = 0
    params: dict[str, Any] = {"kind": kind, "p": p}
    if kind == "uc=>uc-p":
        if math.isinf(p):
            raise ValueError("uc=>uc-p needs finite p")
        probe = probe or ModulusProbe(epsilon=1.0, r=1.0)
        est = estimate_uc_modulus(space, probe, 1.0, spec)
        if est.inconclusive:
            rep = Tracker().report("implication", space.id, tol, params, status="inconclusive")
            rep.extras["reason"] = "no admissible configuration for the modulus probe"
            return rep
        delta, r = est.estimated_delta, probe.r
        params.update(r=r, delta=delta)
        sub = dataclasses.replace(spec, seed=spec.seed + 1)
        for w in _modulus_candidates(space, r, probe.epsilon, sub):
            h = _uc_hypothesis(space, w["x"], w["y"], w["z"], r, delta)
            hyp_worst.add(h, w)
            if h >= -tol:
                held += 1
                concl.add(_uc_conclusion(space, w["x"], w["y"], w["z"], r, delta, p), w)
    else:
        rng = np.random.default_rng(spec.seed)
        names = ("x", "y", "z") if kind == "midpoint=>1-convex" else ("x", "y", "z", "w")
        for _ in range(spec.sample_count):
            w = _draw(space, rng, names)
            h = midpoint_residual(space, w["x"], w["y"])
            if kind == "busemann&midpoint=>p-convex":
                h = min(h, busemann_residual(space, w["x"], w["y"], w["z"], w["w"], p),
                        busemann_residual(space, w["x"], w["y"], w["z"], w["z"], p))
            hyp_worst.add(h, w)
            if h >= -tol:
                held += 1
                pts = {"x": w["x"], "y": w["y"], "z": w["z"]}
                concl.add(implication_residual(space, kind, p, **pts), pts)
    report = concl.report("implication", space.id, tol, params)
    report.checked = hyp_worst.count
    report.extras.update(hypothesis_held=held,
                         hypothesis_worst=hyp_worst.worst if hyp_worst.count else None)
    if held == 0:
        report.status = "vacuous"
    return report


# ---------------------------------------------------------------------------


def is_eps_separated(space: GeodesicSpace, points: Sequence[Point], epsilon: float) -> bool:
    """True iff all pairwise distances between distinct indices are >= epsilon."""
    if not (epsilon > 0):
        raise ValueError("epsilon must be positive")
    if len(points) == 0:
        raise ValueError("need at least one point")
    pts = list(points)
    return all(space.distance(pts[i], pts[j]) >= epsilon
               for i in range(len(pts)) for j in range(i + 1, len(pts)))
