"""The two-map blend ``Q_t(a, b) = t a (+) (1 - t) b`` and checks of its bounds.

Given Lipschitz maps ``S`` (constant ``K_S``) and ``T`` (constant ``K_T``), the
central estimate in a CAT(0) space is::

    d^2(Q_t(Sp, Tx), Q_t(Sq, Ty))
        <= (t^2 K_S^2 + (1-t)^2 K_T^2) max(d^2(p,q), d^2(x,y))
         + t(1-t) (d(Sp,Ty) + d(Sq,Ty) + d(Tx,Sq) + d(Sp,Tx)) min(K_S d(p,q), K_T d(x,y))

obtained by applying the CAT(0) inequality twice and then the Lipschitz
bounds. :func:`check_two_map_bound` evaluates every link of that chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .maps import (BallProjection, Compose, Contraction, DiskRotation, FixedPointResult, Identity,
                   LipschitzMap, RigidMotion, TreeAutomorphism, banach_fixed_point, power)
from .spaces import Euclidean, GeodesicSpace, MetricTree, Point, TreePos


@dataclass(frozen=True)
class QtConfig:
    t: float
    S: LipschitzMap
    T: LipschitzMap

    def __post_init__(self):
        if not (0.0 <= self.t <= 1.0):
            raise ValueError(f"t={self.t} outside [0, 1]")


@dataclass
class BoundCheckRecord:
    """Both sides of one evaluated inequality; ``residual = rhs - lhs``."""

    lhs: float
    rhs: float
    residual: float
    inputs: dict[str, Any]
    n: int = 1
    t: float | None = None
    label: str = ""
    chain: dict[str, float] = field(default_factory=dict)

    def ok(self, tol: float) -> bool:
        return self.residual >= -tol and all(v >= -tol for v in self.chain.values())


def _record(lhs, rhs, inputs, n, t, label, chain=None):
    return BoundCheckRecord(lhs=lhs, rhs=rhs, residual=rhs - lhs, inputs=inputs, n=n, t=t,
                            label=label, chain=chain or {})


def qt_apply(space: GeodesicSpace, cfg: QtConfig, a: Point, b: Point) -> Point:
    """``Q_t(a, b)``. No map is applied here; pass ``Sx`` and ``Ty`` explicitly."""
    return space.combine(a, b, cfg.t)


def _two_map(space, t, sp, sq, tx, ty, dpq, dxy, ks, kt):
    """lhs, rhs and chain residuals of the two-map bound from mapped points."""
    d = space.distance
    u = space.combine(sp, tx, t)
    w = space.combine(sq, ty, t)
    s = 1.0 - t
    lhs = d(u, w) ** 2
    # first use of the CAT(0) inequality: u on the geodesic [Sp, Tx], base point w
    c1 = t * d(sp, w) ** 2 + s * d(tx, w) ** 2 - t * s * d(sp, tx) ** 2
    # second use: w on [Sq, Ty], base points Sp and Tx
    sp_ty, sq_ty, tx_sq, sp_tx = d(sp, ty), d(sq, ty), d(tx, sq), d(sp, tx)
    c2 = (t * t * d(sp, sq) ** 2 + s * s * d(tx, ty) ** 2
          + t * s * (sp_ty ** 2 + tx_sq ** 2 - sq_ty ** 2 - sp_tx ** 2))
    rhs = ((t * t * ks * ks + s * s * kt * kt) * max(dpq, dxy) ** 2
           + t * s * (sp_ty + sq_ty + tx_sq + sp_tx) * min(ks * dpq, kt * dxy))
    chain = {"cat0_outer": c1 - lhs, "cat0_inner": c2 - c1, "lipschitz": rhs - c2}
    return lhs, rhs, chain


def check_two_map_bound(space: GeodesicSpace, cfg: QtConfig, p: Point, q: Point, x: Point,
                        y: Point) -> BoundCheckRecord:
    """Evaluate the two-map bound at ``(p, q, x, y)``.

    ``chain`` holds the residual of each link: ``cat0_outer`` and
    ``cat0_inner`` (the two CAT(0) applications) and ``lipschitz`` (the final
    estimate through ``K_S``, ``K_T``).
    """
    S, T = cfg.S, cfg.T
    lhs, rhs, chain = _two_map(space, cfg.t, S(space, p), S(space, q), T(space, x), T(space, y),
                               space.distance(p, q), space.distance(x, y),
                               S.declared_k, T.declared_k)
    return _record(lhs, rhs, {"p": p, "q": q, "x": x, "y": y}, 1, cfg.t, "two_map", chain)


def check_iterated_bound(space: GeodesicSpace, cfg: QtConfig, p: Point, q: Point, x: Point,
                         y: Point, n: int) -> BoundCheckRecord:
    """The two-map bound for the iterates ``S^n``, ``T^n`` with constants
    ``K_S^n``, ``K_T^n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg_n = QtConfig(cfg.t, _power_declared(cfg.S, n), _power_declared(cfg.T, n))
    rec = check_two_map_bound(space, cfg_n, p, q, x, y)
    rec.n = n
    rec.label = "iterated"
    return rec


def _power_declared(m: LipschitzMap, n: int) -> LipschitzMap:
    # K^n as the declared constant, whatever m declares
    return Compose((m,) * n, declared=m.declared_k ** n) if n > 1 else m


# ---------------------------------------------------------------------------
# decay of the blended orbits


def known_fixed_point(space: GeodesicSpace, m: LipschitzMap) -> Point | None:
    """A fixed point of ``m`` when one is available in closed form."""
    if isinstance(m, Identity):
        return space.origin()
    if isinstance(m, Contraction):
        return m.anchor
    if isinstance(m, BallProjection):
        return m.center
    if isinstance(m, DiskRotation):
        return m.center
    if isinstance(m, RigidMotion) and isinstance(space, Euclidean):
        n = m.matrix.shape[0]
        c, *_ = np.linalg.lstsq(np.eye(n) - m.matrix, m.shift, rcond=None)
        if np.allclose((np.eye(n) - m.matrix) @ c, m.shift, atol=1e-12):
            return Point(space.id, tuple(float(v) for v in c))
        return None
    if isinstance(m, TreeAutomorphism) and isinstance(space, MetricTree):
        # an automorphism of a finite tree fixes its center (a node or an edge midpoint)
        for cand in _tree_centers(space):
            if space.distance(m(space, cand), cand) == 0.0:
                return cand
        return None
    return None


def _tree_centers(tree: MetricTree) -> list[Point]:
    ecc = tree.D.max(axis=1)
    i, j = np.unravel_index(int(np.argmax(tree.D)), tree.D.shape)
    diameter_mid = tree.combine(Point(tree.id, TreePos(node=int(i))),
                                Point(tree.id, TreePos(node=int(j))), 0.5)
    return [diameter_mid, Point(tree.id, TreePos(node=int(np.argmin(ecc))))]


@dataclass
class DecayReport:
    """Orbit distances ``d_n = d(Q_t(S^n p, T^n x), Q_t(S^n q, T^n y))``.

    ``mode`` is ``"contractive"`` (both constants below 1: ``d_n -> 0``),
    ``"mixed"`` (one constant below 1, the other equal to 1 with a fixed
    point: tail check of ``d_n^2 - min(t^2, (1-t)^2) max(d^2(x,y), d^2(p,q))``)
    or ``"inconclusive"`` (hypotheses not met).
    """

    mode: str
    records: list[BoundCheckRecord]
    passed: bool | None
    distances: list[float]
    final_distance: float | None = None
    log_slope: float | None = None
    tail_limsup: float | None = None
    reason: str = ""


def check_decay(space: GeodesicSpace, cfg: QtConfig, p: Point, q: Point, x: Point, y: Point,
                n_max: int, tol: float = 1e-9) -> DecayReport:
    """Follow ``d_n`` for ``n = 1..n_max`` and test the applicable limit statement.

    Contractive records compare ``d_n`` with the square root of the iterated
    two-map bound. Mixed records compare ``d_n^2`` with
    ``min(t^2, (1-t)^2) max(d^2(x,y), d^2(p,q))``; the limsup is taken as the
    max of ``lhs - rhs`` over the last 10% of ``n``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    S, T, t = cfg.S, cfg.T, cfg.t
    ks, kt = S.declared_k, T.declared_k
    if max(ks, kt) < 1.0:
        mode = "contractive"
    elif (ks < 1.0 and kt == 1.0) or (kt < 1.0 and ks == 1.0):
        nonexp = T if kt == 1.0 else S
        mode = "mixed" if known_fixed_point(space, nonexp) is not None else "inconclusive"
    else:
        mode = "inconclusive"
    if mode == "inconclusive":
        return DecayReport(mode, [], None, [], reason="hypotheses of the decay statements not met "
                           f"(K_S={ks}, K_T={kt}, fixed point of the nonexpansive map unknown)")

    dpq, dxy = space.distance(p, q), space.distance(x, y)
    base = min(t * t, (1.0 - t) ** 2) * max(dxy, dpq) ** 2
    sp, sq, tx, ty = p, q, x, y
    records, dist = [], []
    for n in range(1, n_max + 1):
        sp, sq, tx, ty = S(space, sp), S(space, sq), T(space, tx), T(space, ty)
        d_n = space.distance(space.combine(sp, tx, t), space.combine(sq, ty, t))
        dist.append(d_n)
        inputs = {"p": p, "q": q, "x": x, "y": y}
        if mode == "contractive":
            _, rhs2, _ = _two_map(space, t, sp, sq, tx, ty, dpq, dxy, ks ** n, kt ** n)
            records.append(_record(d_n, math.sqrt(max(rhs2, 0.0)), inputs, n, t, "decay"))
        else:
            records.append(_record(d_n * d_n, base, inputs, n, t, "limsup"))

    rep = DecayReport(mode, records, None, dist, final_distance=dist[-1])
    if mode == "contractive":
        pos = [(n, math.log(v)) for n, v in enumerate(dist, start=1) if v > 0.0]
        if len(pos) >= 2:
            ns, logs = zip(*pos)
            rep.log_slope = float(np.polyfit(ns, logs, 1)[0])
        rep.passed = dist[-1] <= tol
    else:
        tail = records[-max(1, math.ceil(0.1 * n_max)):]
        rep.tail_limsup = max(r.lhs - r.rhs for r in tail)
        rep.passed = rep.tail_limsup <= tol
    return rep


# ---------------------------------------------------------------------------
# one-sided slices


def check_slice_bounds(space: GeodesicSpace, cfg: QtConfig, p: Point, q: Point, x: Point,
                       y: Point, n: int, m: int) -> list[BoundCheckRecord]:
    """The four slice bounds, in first powers of ``d``:

    1. ``d(Q_t(S^m p, T x), Q_t(S^m p, T y)) <= (1-t) K_T d(x,y)``
    2. ``d(Q_t(S^m p, T^n x), Q_t(S^m p, T^n y)) <= (1-t) K_T^n d(x,y)``
    3. ``d(Q_t(S p, T^m x), Q_t(S q, T^m x)) <= t K_S d(p,q)``
    4. ``d(Q_t(S^n p, T^m x), Q_t(S^n q, T^m x)) <= t K_S^n d(p,q)``
    """
    if n < 0 or m < 0:
        raise ValueError("n and m must be >= 0")
    S, T, t = cfg.S, cfg.T, cfg.t
    ks, kt = S.declared_k, T.declared_k
    d, Q = space.distance, space.combine
    Sm, Tm, Sn, Tn = power(S, m), power(T, m), power(S, n), power(T, n)
    smp = Sm(space, p)
    tmx = Tm(space, x)
    inputs = {"p": p, "q": q, "x": x, "y": y}
    dxy, dpq = d(x, y), d(p, q)
    out = []
    lhs = d(Q(smp, T(space, x), t), Q(smp, T(space, y), t))
    out.append(_record(lhs, (1 - t) * kt * dxy, inputs, 1, t, "slice_T"))
    lhs = d(Q(smp, Tn(space, x), t), Q(smp, Tn(space, y), t))
    out.append(_record(lhs, (1 - t) * kt ** n * dxy, inputs, n, t, "slice_T^n"))
    lhs = d(Q(S(space, p), tmx, t), Q(S(space, q), tmx, t))
    out.append(_record(lhs, t * ks * dpq, inputs, 1, t, "slice_S"))
    lhs = d(Q(Sn(space, p), tmx, t), Q(Sn(space, q), tmx, t))
    out.append(_record(lhs, t * ks ** n * dpq, inputs, n, t, "slice_S^n"))
    return out


# ---------------------------------------------------------------------------
# the blended fixed point


@dataclass
class ZtResult:
    """``z_t = t p* (+) (1 - t) y*`` with ``p* = S p*`` and ``y* = T y*``.

    ``geodesic_residual`` is ``|d(p*, z) + d(z, y*) - d(p*, y*)|`` and
    ``ratio_residual`` is ``|d(z, y*) - t d(p*, y*)|``. ``blend_fixed_point``
    is the fixed point of ``u -> Q_t(p*, T u)`` (found by iteration when ``T``
    contracts) and ``blend_gap`` its distance to ``z``; they differ in
    general.
    """

    point: Point
    t: float
    p_star: FixedPointResult
    y_star: FixedPointResult
    converged: bool
    geodesic_residual: float
    ratio_residual: float
    endpoint_residual: float
    blend_fixed_point: Point | None = None
    blend_gap: float | None = None


def compute_zt(space: GeodesicSpace, cfg: QtConfig, p0: Point, x0: Point, tol: float = 1e-12,
               max_iter: int = 10_000, p_star: Point | None = None) -> ZtResult:
    """Fixed points ``y*`` of ``T`` and ``p*`` of ``S`` and their blend ``z_t``.

    ``T`` must be a strict contraction. ``p*`` comes from ``p_star`` when
    given, else from Banach iteration when ``S`` contracts, else from a
    closed-form fixed point of a nonexpansive ``S``.
    """
    S, T, t = cfg.S, cfg.T, cfg.t
    if not T.declared_k < 1.0:
        raise ValueError(f"T must be strictly contractive (declared K_T={T.declared_k})")
    ys = banach_fixed_point(space, T, x0, tol, max_iter)
    if p_star is not None:
        ps = FixedPointResult(p_star, 0, space.distance(p_star, S(space, p_star)), True)
    elif S.declared_k < 1.0:
        ps = banach_fixed_point(space, S, p0, tol, max_iter)
    else:
        known = known_fixed_point(space, S)
        if known is None:
            raise ValueError("S is not strictly contractive and has no known fixed point")
        ps = FixedPointResult(known, 0, space.distance(known, S(space, known)), True)
    pstar, ystar = ps.point, ys.point
    z = space.combine(pstar, ystar, t)
    d = space.distance
    dpy = d(pstar, ystar)
    endpoint = max(d(space.combine(pstar, ystar, 0.0), ystar),
                   d(space.combine(pstar, ystar, 1.0), pstar))
    res = ZtResult(point=z, t=t, p_star=ps, y_star=ys, converged=ps.converged and ys.converged,
                   geodesic_residual=abs(d(pstar, z) + d(z, ystar) - dpy),
                   ratio_residual=abs(d(z, ystar) - t * dpy), endpoint_residual=endpoint)
    k = (1.0 - t) * T.declared_k
    if k < 1.0:
        blend = Compose((_BlendWith(pstar, t), T))
        fp = banach_fixed_point(space, blend, z, tol, max_iter)
        if fp.converged:
            res.blend_fixed_point = fp.point
            res.blend_gap = d(fp.point, z)
    return res


@dataclass(frozen=True)
class _BlendWith(LipschitzMap):
    """``u -> Q_t(anchor, u)``."""

    anchor: Point
    t: float
    declared: float | None = None

    @property
    def natural_k(self):
        return 1.0 - self.t

    def __call__(self, space, u):
        return space.combine(self.anchor, u, self.t)


# ---------------------------------------------------------------------------
# batches over random tuples


def random_tuples(space: GeodesicSpace, count: int, seed: int = 0):
    """``count`` independent ``(p, q, x, y)`` tuples from the space's sampler."""
    rng = np.random.default_rng(seed)
    return [tuple(space.sample(rng) for _ in range(4)) for _ in range(count)]


def batch_two_map(space, cfg, count, seed=0):
    return [check_two_map_bound(space, cfg, *tup) for tup in random_tuples(space, count, seed)]


def batch_iterated(space, cfg, count, n, seed=0):
    return [check_iterated_bound(space, cfg, *tup, n) for tup in random_tuples(space, count, seed)]


def batch_slices(space, cfg, count, n, m, seed=0):
    out = []
    for tup in random_tuples(space, count, seed):
        out.extend(check_slice_bounds(space, cfg, *tup, n, m))
    return out
