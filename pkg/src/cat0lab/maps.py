"""Lipschitz self-maps of the model spaces and fixed-point iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .audit import AuditSpec
from .reports import Tracker, ViolationReport
from .spaces import (Euclidean, GeodesicSpace, InvalidPointError, MetricTree, PoincareDisk,
                     Point, TreePos, coerce_point)


class LipschitzMap:
    """Base class. Subclasses implement ``__call__(space, x)`` and
    ``natural_k``; ``declared`` overrides the declared constant (used to build
    deliberately mislabeled maps)."""

    kind = "map"
    declared: float | None = None

    @property
    def natural_k(self) -> float:
        raise NotImplementedError

    @property
    def declared_k(self) -> float:
        return self.natural_k if self.declared is None else self.declared

    def __call__(self, space: GeodesicSpace, x: Point) -> Point:
        raise NotImplementedError

    def to_json(self, space: GeodesicSpace) -> dict[str, Any]:
        doc = self._doc(space)
        if self.declared is not None:
            doc["declared_k"] = self.declared
        return doc


@dataclass(frozen=True)
class Identity(LipschitzMap):
    declared: float | None = None
    kind = "identity"

    @property
    def natural_k(self):
        return 1.0

    def __call__(self, space, x):
        space.check(x)
        return x

    def _doc(self, space):
        return {"kind": "identity"}


@dataclass(frozen=True)
class Contraction(LipschitzMap):
    """Geodesic contraction toward ``anchor``: ``d(anchor, Tx) = factor d(anchor, x)``.

    ``anchor`` is the fixed point. Factors above 1 (homotheties) are only
    available in Euclidean space.
    """

    anchor: Point
    factor: float
    declared: float | None = None
    kind = "contraction"

    def __post_init__(self):
        if not (self.factor >= 0.0 and math.isfinite(self.factor)):
            raise ValueError(f"contraction factor {self.factor} must be a finite value >= 0")

    @property
    def natural_k(self):
        return float(self.factor)

    def __call__(self, space, x):
        if self.factor <= 1.0:
            return space.combine(x, self.anchor, self.factor)
        if not isinstance(space, Euclidean):
            raise ValueError("factor > 1 is only supported in Euclidean space")
        space.check(x, self.anchor)
        a, f = self.anchor.value, self.factor
        return Point(space.id, tuple(ai + f * (xi - ai) for xi, ai in zip(x.value, a)))

    def _doc(self, space):
        return {"kind": "contraction", "anchor": space.to_json(self.anchor), "factor": self.factor}


@dataclass(frozen=True)
class BallProjection(LipschitzMap):
    """Metric projection onto the closed ball ``B(center, radius)``; 1-Lipschitz
    in CAT(0) spaces, fixing every point of the ball."""

    center: Point
    radius: float
    declared: float | None = None
    kind = "ball_projection"

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError("ball radius must be positive")

    @property
    def natural_k(self):
        return 1.0

    def __call__(self, space, x):
        d = space.distance(x, self.center)
        if d <= self.radius:
            return x
        return space.combine(x, self.center, self.radius / d)

    def _doc(self, space):
        return {"kind": "ball_projection", "center": space.to_json(self.center),
                "radius": self.radius}


@dataclass(frozen=True, eq=False)
class RigidMotion(LipschitzMap):
    """Euclidean isometry ``x -> Q x + b`` with ``Q`` orthogonal."""

    matrix: np.ndarray
    shift: np.ndarray
    declared: float | None = None
    kind = "isometry"

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        b = np.asarray(self.shift, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or b.shape != (q.shape[0],):
            raise ValueError("rigid motion needs a square matrix and a matching shift")
        if not np.allclose(q.T @ q, np.eye(q.shape[0]), atol=1e-12):
            raise ValueError("rigid motion matrix is not orthogonal")
        object.__setattr__(self, "matrix", q)
        object.__setattr__(self, "shift", b)

    @classmethod
    def rotation(cls, angle: float, center: Sequence[float] = (0.0, 0.0), declared=None):
        """Planar rotation by ``angle`` about ``center`` (which it fixes)."""
        c, s = math.cos(angle), math.sin(angle)
        q = np.array([[c, -s], [s, c]])
        ctr = np.asarray(center, dtype=float)
        return cls(q, ctr - q @ ctr, declared)

    @property
    def natural_k(self):
        return 1.0

    def __call__(self, space, x):
        space.check(x)
        v = self.matrix @ np.asarray(x.value) + self.shift
        return Point(space.id, tuple(float(c) for c in v))

    def _doc(self, space):
        return {"kind": "isometry", "type": "rigid", "matrix": self.matrix.tolist(),
                "shift": self.shift.tolist()}


@dataclass(frozen=True)
class DiskRotation(LipschitzMap):
    """Hyperbolic rotation of the disk by ``angle`` about ``center``."""

    center: Point
    angle: float
    declared: float | None = None
    kind = "isometry"

    @property
    def natural_k(self):
        return 1.0

    def __call__(self, space, x):
        space.check(x, self.center)
        c, z = self.center.value, x.value
        w = (z - c) / (1.0 - c.conjugate() * z)
        w *= complex(math.cos(self.angle), math.sin(self.angle))
        out = (w + c) / (1.0 + c.conjugate() * w)
        if not space.validate_point(Point(space.id, out)):
            raise InvalidPointError("rotated point left the admissible disk")
        return Point(space.id, out)

    def _doc(self, space):
        return {"kind": "isometry", "type": "rotation", "center": space.to_json(self.center),
                "angle": self.angle}


@dataclass(frozen=True, eq=False)
class TreeAutomorphism(LipschitzMap):
    """Tree isometry induced by a length-preserving permutation of the nodes.

    ``mapping`` maps node ids to node ids; it is validated against ``tree``.
    """

    tree: MetricTree
    mapping: dict
    declared: float | None = None
    kind = "isometry"

    def __post_init__(self):
        tree = self.tree
        perm = {}
        for a, b in self.mapping.items():
            if a not in tree.index or b not in tree.index:
                raise ValueError(f"automorphism refers to unknown node ({a!r} -> {b!r})")
            perm[tree.index[a]] = tree.index[b]
        for i in range(len(tree.nodes)):
            perm.setdefault(i, i)
        if sorted(perm.values()) != list(range(len(tree.nodes))):
            raise ValueError("automorphism is not a bijection of the nodes")
        for e, (i, j) in enumerate(zip(tree.edge_a, tree.edge_b)):
            f = tree.edge_of.get((perm[i], perm[j]))
            if f is None or tree.edge_len[f] != tree.edge_len[e]:
                raise ValueError("node permutation does not preserve edges and lengths")
        object.__setattr__(self, "_perm", perm)

    @property
    def natural_k(self):
        return 1.0

    def __call__(self, space, x):
        space.check(x)
        v, perm, tree = x.value, self._perm, self.tree
        if v.is_node:
            return Point(space.id, TreePos(node=perm[v.node]))
        a, b = perm[tree.edge_a[v.edge]], perm[tree.edge_b[v.edge]]
        f = tree.edge_of[(a, b)]
        off = v.offset if tree.edge_a[f] == a else tree.edge_len[f] - v.offset
        return Point(space.id, TreePos(edge=f, offset=off))

    def _doc(self, space):
        return {"kind": "isometry", "type": "automorphism", "mapping": dict(self.mapping)}


@dataclass(frozen=True, eq=False)
class Affine(LipschitzMap):
    """Euclidean affine map ``x -> A x + b``, declared constant ``||A||_2``."""

    matrix: np.ndarray
    shift: np.ndarray
    declared: float | None = None
    kind = "affine"

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        b = np.atleast_1d(np.asarray(self.shift, dtype=float))
        if a.shape[0] != a.shape[1] or b.shape != (a.shape[0],):
            raise ValueError("affine map needs a square matrix and a matching shift")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "shift", b)

    @property
    def natural_k(self):
        return float(np.linalg.norm(self.matrix, 2))

    def __call__(self, space, x):
        if not isinstance(space, Euclidean):
            raise ValueError("affine maps act on Euclidean space only")
        space.check(x)
        v = self.matrix @ np.asarray(x.value) + self.shift
        return Point(space.id, tuple(float(c) for c in v))

    def _doc(self, space):
        return {"kind": "affine", "matrix": self.matrix.tolist(), "shift": self.shift.tolist()}


@dataclass(frozen=True)
class Compose(LipschitzMap):
    """``maps[0] o maps[1] o ... o maps[-1]`` (the last map is applied first)."""

    maps: tuple
    declared: float | None = None
    kind = "compose"

    @property
    def natural_k(self):
        return math.prod(m.declared_k for m in self.maps)

    def __call__(self, space, x):
        for m in reversed(self.maps):
            x = m(space, x)
        return x

    def _doc(self, space):
        return {"kind": "compose", "maps": [m.to_json(space) for m in self.maps]}


def power(m: LipschitzMap, n: int) -> LipschitzMap:
    """``m`` composed with itself ``n`` times (identity for ``n = 0``)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Identity()
    if n == 1:
        return m
    return Compose((m,) * n)


def map_from_json(space: GeodesicSpace, doc: dict) -> LipschitzMap:
    """Decode a map descriptor such as
    ``{"kind": "contraction", "anchor": <point>, "factor": 0.5}``."""
    kind = doc.get("kind")
    declared = doc.get("declared_k")
    declared = None if declared is None else float(declared)
    if kind == "identity":
        return Identity(declared)
    if kind == "contraction":
        anchor = coerce_point(space, doc["anchor"]) if "anchor" in doc else space.origin()
        return Contraction(anchor, float(doc["factor"]), declared)
    if kind == "ball_projection":
        return BallProjection(coerce_point(space, doc["center"]), float(doc["radius"]), declared)
    if kind == "affine":
        return Affine(np.asarray(doc["matrix"], dtype=float), np.asarray(doc["shift"], dtype=float),
                      declared)
    if kind == "compose":
        return Compose(tuple(map_from_json(space, d) for d in doc["maps"]), declared)
    if kind == "isometry":
        typ = doc.get("type")
        if typ == "rigid":
            return RigidMotion(np.asarray(doc["matrix"]), np.asarray(doc["shift"]), declared)
        if typ == "rotation":
            if isinstance(space, PoincareDisk):
                return DiskRotation(coerce_point(space, doc["center"]), float(doc["angle"]), declared)
            center = coerce_point(space, doc["center"]).value if "center" in doc else (0.0, 0.0)
            return RigidMotion.rotation(float(doc["angle"]), center, declared)
        if typ == "automorphism":
            if not isinstance(space, MetricTree):
                raise ValueError("automorphisms act on metric trees only")
            return TreeAutomorphism(space, dict(doc["mapping"]), declared)
        raise ValueError(f"unknown isometry type {typ!r}")
    raise ValueError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------


def apply(space: GeodesicSpace, m: LipschitzMap, x: Point) -> Point:
    return m(space, x)


def iterate(space: GeodesicSpace, m: LipschitzMap, x: Point, n: int) -> list[Point]:
    """``[x, m x, m^2 x, ..., m^n x]``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = [x]
    for _ in range(n):
        out.append(m(space, out[-1]))
    return out


def _lipschitz_pairs(space, spec):
    rng = np.random.default_rng(spec.seed)
    for k in range(spec.sample_count):
        x = space.sample(rng)
        # alternate far pairs and close pairs to probe local stretching
        y = space.sample(rng) if k % 2 == 0 else space.sample_near(x, 0.05, rng)
        yield x, y


def audit_lipschitz(space: GeodesicSpace, m: LipschitzMap, spec: AuditSpec) -> ViolationReport:
    """Sampled check of ``d(mx, my) <= declared_k d(x, y)``.

    The residual is ``declared_k - d(mx, my) / d(x, y)``; ``extras["k_hat"]``
    holds the largest sampled ratio.
    """
    tr = Tracker()
    k = m.declared_k
    for x, y in _lipschitz_pairs(space, spec):
        d = space.distance(x, y)
        if d == 0.0:
            continue
        tr.add(k - space.distance(m(space, x), m(space, y)) / d, {"x": x, "y": y})
    report = tr.report("lipschitz", space.id, spec.tol_for(space), {"declared_k": k})
    if tr.count == 0:
        report.status = "inconclusive"
        report.extras["k_hat"] = None
    else:
        report.extras["k_hat"] = k - tr.worst
    return report


def estimate_lipschitz(space: GeodesicSpace, m: LipschitzMap, spec: AuditSpec) -> float:
    """Largest sampled ratio ``d(mx, my) / d(x, y)`` over distinct pairs."""
    report = audit_lipschitz(space, m, spec)
    if report.extras["k_hat"] is None:
        raise ValueError("inconclusive: every sampled pair was coincident")
    return report.extras["k_hat"]


@dataclass
class FixedPointResult:
    point: Point
    iterations: int
    final_step: float
    converged: bool
    history: list[float] = field(default_factory=list, repr=False)


def banach_fixed_point(space: GeodesicSpace, m: LipschitzMap, x0: Point, tol: float = 1e-12,
                       max_iter: int = 10_000) -> FixedPointResult:
    """Picard iteration ``x_{k+1} = m(x_k)`` until ``d(x_k, x_{k+1}) <= tol``.

    Convergence is guaranteed when ``m`` is a strict contraction; otherwise
    the result reports ``converged=False`` after ``max_iter`` steps.
    """
    if not (tol > 0):
        raise ValueError("tol must be positive")
    x = x0
    steps = []
    for k in range(1, max_iter + 1):
        nxt = m(space, x)
        step = space.distance(x, nxt)
        steps.append(step)
        x = nxt
        if not math.isfinite(step):
            break
        if step <= tol:
            return FixedPointResult(x, k, step, True, steps)
    return FixedPointResult(x, len(steps), steps[-1] if steps else math.nan, False, steps)
