"""Concrete CAT(0) model spaces.

Three uniquely geodesic spaces are provided:

* :class:`Euclidean` -- R^n with the Euclidean norm,
* :class:`PoincareDisk` -- the hyperbolic plane (curvature -1) in the unit disk,
* :class:`MetricTree` -- a weighted finite tree viewed as an R-tree.

Every space exposes ``distance``, ``combine`` and ``midpoint``. The blend
``combine(x, y, t)`` weights its *first* argument by ``t``: the result lies on
the geodesic from ``y`` to ``x`` with ``d(result, x) = (1 - t) d(x, y)`` and
``d(result, y) = t d(x, y)``. Hence ``combine(x, y, 1) == x`` and
``combine(x, y, 0) == y``.

Points are immutable :class:`Point` records tagged with the id of the space
that created them; mixing points of different spaces raises
:class:`SpaceMismatchError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .reports import Tracker, ViolationReport

__all__ = [
    "Point", "TreePos", "GeodesicSpace", "Euclidean", "PoincareDisk", "MetricTree",
    "SpaceMismatchError", "InvalidPointError", "audit_metric_axioms", "space_from_name",
    "encode_value", "star3", "path4",
]

# disk points at or beyond this radius are rejected (artanh conditioning)
DISK_RADIUS_LIMIT = 1.0 - 1e-12
# sampling region for the disk
DISK_SAMPLE_RADIUS = 0.9


class SpaceMismatchError(ValueError):
    """Points from different spaces were combined."""


class InvalidPointError(ValueError):
    """A point payload violates the invariants of its space."""


@dataclass(frozen=True)
class TreePos:
    """Position in a metric tree: a node, or an interior point of an edge.

    Edge positions measure ``offset`` from the edge's first endpoint ``a``.
    """

    node: int = -1
    edge: int = -1
    offset: float = 0.0

    @property
    def is_node(self) -> bool:
        return self.node >= 0


@dataclass(frozen=True)
class Point:
    space: str
    value: Any

    def __repr__(self):
        return f"Point({self.space!r}, {self.value!r})"


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise ValueError(f"blend weight t={t} outside [0, 1]")
    return t


class GeodesicSpace:
    """Common interface of the model spaces.

    Subclasses implement the private ``_distance``/``_combine``/``_valid``
    hooks on raw payloads; the public methods add validation.
    """

    id: str = ""
    default_tol: float = 1e-9
    n_coords: int = 1

    # -- validation -------------------------------------------------------
    def validate_point(self, x: Point) -> bool:
        """True iff ``x`` belongs to this space and its payload is valid."""
        if not isinstance(x, Point) or x.space != self.id:
            return False
        try:
            return bool(self._valid(x.value))
        except (TypeError, ValueError):
            return False

    def check(self, *points: Point) -> None:
        for x in points:
            if not isinstance(x, Point):
                raise TypeError(f"expected Point, got {type(x).__name__}")
            if x.space != self.id:
                raise SpaceMismatchError(f"point of space {x.space!r} used in {self.id!r}")
            if not self._valid(x.value):
                raise InvalidPointError(f"invalid point {x!r} for space {self.id!r}")

    # -- metric -----------------------------------------------------------
    def distance(self, x: Point, y: Point) -> float:
        self.check(x, y)
        return self._distance(x.value, y.value)

    def combine(self, x: Point, y: Point, t: float) -> Point:
        """Geodesic blend ``t x (+) (1 - t) y``."""
        t = _check_t(t)
        self.check(x, y)
        if t == 1.0:
            return x
        if t == 0.0:
            return y
        return Point(self.id, self._combine(x.value, y.value, t))

    def midpoint(self, x: Point, y: Point) -> Point:
        return self.combine(x, y, 0.5)

    # -- sampling ---------------------------------------------------------
    def sample(self, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def sample_near(self, center: Point, radius: float, rng: np.random.Generator,
                    on_sphere: bool = False) -> Point:
        """Random point within ``radius`` of ``center`` (exactly at ``radius``
        when ``on_sphere`` and the space extends that far)."""
        raise NotImplementedError

    def extend(self, x: Point, through: Point, length: float,
               rng: np.random.Generator) -> Point | None:
        """Point beyond ``through`` on a geodesic from ``x``, at ``length`` from
        ``through``. None if the geodesic cannot be extended."""
        raise NotImplementedError

    def nudge(self, x: Point, coord: int, delta: float) -> Point | None:
        """Move ``x`` by ``delta`` along local coordinate ``coord``; None if the
        result leaves the space."""
        raise NotImplementedError

    def origin(self) -> Point:
        raise NotImplementedError

    # -- serialization ----------------------------------------------------
    def to_json(self, x: Point) -> dict[str, Any]:
        raise NotImplementedError

    def point_from_json(self, doc: dict[str, Any]) -> Point:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.id!r})"


# ---------------------------------------------------------------------------
# Euclidean space


class Euclidean(GeodesicSpace):
    """R^n. Samples are uniform in the box ``[-box, box]^n``."""

    default_tol = 1e-9

    def __init__(self, n: int, box: float = 1.0):
        if int(n) != n or n < 1:
            raise ValueError(f"Euclidean dimension must be a positive integer, got {n}")
        self.n = int(n)
        self.n_coords = self.n
        self.box = float(box)
        self.id = f"euclidean:{self.n}"

    def point(self, coords: Iterable[float] | float) -> Point:
        if np.isscalar(coords):
            coords = [coords]
        x = Point(self.id, tuple(float(c) for c in coords))
        self.check(x)
        return x

    def origin(self) -> Point:
        return Point(self.id, (0.0,) * self.n)

    def _valid(self, v) -> bool:
        return (isinstance(v, tuple) and len(v) == self.n
                and all(isinstance(c, float) and math.isfinite(c) for c in v))

    def _distance(self, a, b) -> float:
        return math.dist(a, b)

    def _combine(self, a, b, t):
        s = 1.0 - t
        return tuple(t * ai + s * bi for ai, bi in zip(a, b))

    def sample(self, rng):
        return Point(self.id, tuple(float(c) for c in rng.uniform(-self.box, self.box, self.n)))

    def sample_near(self, center, radius, rng, on_sphere=False):
        u = rng.normal(size=self.n)
        nrm = np.linalg.norm(u)
        while nrm == 0.0:
            u = rng.normal(size=self.n)
            nrm = np.linalg.norm(u)
        rho = radius if on_sphere else radius * rng.uniform() ** (1.0 / self.n)
        return Point(self.id, tuple(float(c + rho * ui / nrm) for c, ui in zip(center.value, u)))

    def extend(self, x, through, length, rng):
        d = self._distance(x.value, through.value)
        if d == 0.0:
            return self.sample_near(through, length, rng, on_sphere=True)
        return Point(self.id, tuple(c + length * (c - xi) / d
                                    for c, xi in zip(through.value, x.value)))

    def nudge(self, x, coord, delta):
        v = list(x.value)
        v[coord] += delta
        return Point(self.id, tuple(v))

    def to_json(self, x):
        return {"space": self.id, "euclidean": list(x.value)}

    def point_from_json(self, doc):
        if "euclidean" not in doc:
            raise InvalidPointError(f"not a Euclidean point document: {doc!r}")
        return self.point(doc["euclidean"])


# ---------------------------------------------------------------------------
# Poincare disk


def _to_origin(z: complex, c: complex) -> complex:
    """Mobius isometry of the disk sending ``c`` to 0."""
    return (z - c) / (1.0 - c.conjugate() * z)


def _from_origin(w: complex, c: complex) -> complex:
    return (w + c) / (1.0 + c.conjugate() * w)


class PoincareDisk(GeodesicSpace):
    """Hyperbolic plane of curvature -1 in the open unit disk.

    Payloads are Python complex numbers. Samples are area-uniform in the
    Euclidean sub-disk of radius 0.9.
    """

    id = "disk"
    default_tol = 1e-7
    n_coords = 2

    def __init__(self, sample_radius: float = DISK_SAMPLE_RADIUS):
        self.sample_radius = float(sample_radius)

    def point(self, z) -> Point:
        if isinstance(z, (tuple, list, np.ndarray)):
            z = complex(z[0], z[1])
        x = Point(self.id, complex(z))
        self.check(x)
        return x

    def origin(self) -> Point:
        return Point(self.id, 0j)

    def _valid(self, v) -> bool:
        return (isinstance(v, complex) and math.isfinite(v.real) and math.isfinite(v.imag)
                and abs(v) < DISK_RADIUS_LIMIT)

    def _distance(self, a, b) -> float:
        num = abs(a - b)
        if num == 0.0:
            return 0.0
        return 2.0 * math.atanh(min(num / abs(1.0 - a.conjugate() * b), DISK_RADIUS_LIMIT))

    def _combine(self, a, b, t):
        w = _to_origin(b, a)
        r = abs(w)
        if r == 0.0:
            return a
        # b sits at hyperbolic distance 2 artanh(r) from the origin; keep (1 - t) of it
        s = math.tanh((1.0 - t) * math.atanh(r))
        return _from_origin(w * (s / r), a)

    def _radial(self, center: complex, rho: float, angle: float) -> complex:
        return _from_origin(math.tanh(rho / 2.0) * complex(math.cos(angle), math.sin(angle)), center)

    def sample(self, rng):
        r = self.sample_radius * math.sqrt(rng.uniform())
        a = rng.uniform(0.0, 2.0 * math.pi)
        return Point(self.id, complex(r * math.cos(a), r * math.sin(a)))

    def sample_near(self, center, radius, rng, on_sphere=False):
        for _ in range(100):
            rho = radius if on_sphere else radius * math.sqrt(rng.uniform())
            z = self._radial(center.value, rho, rng.uniform(0.0, 2.0 * math.pi))
            if abs(z) < DISK_RADIUS_LIMIT:
                return Point(self.id, z)
        raise InvalidPointError("ball around center leaves the disk")

    def extend(self, x, through, length, rng):
        w = _to_origin(x.value, through.value)
        if w == 0:
            angle = rng.uniform(0.0, 2.0 * math.pi)
        else:
            angle = math.atan2(-w.imag, -w.real)
        z = self._radial(through.value, length, angle)
        if abs(z) >= DISK_RADIUS_LIMIT:
            return None
        return Point(self.id, z)

    def nudge(self, x, coord, delta):
        z = x.value + (delta if coord == 0 else 1j * delta)
        if abs(z) >= DISK_RADIUS_LIMIT:
            return None
        return Point(self.id, z)

    def to_json(self, x):
        return {"space": self.id, "disk": [x.value.real, x.value.imag]}

    def point_from_json(self, doc):
        if "disk" not in doc:
            raise InvalidPointError(f"not a disk point document: {doc!r}")
        re_, im_ = doc["disk"]
        return self.point(complex(re_, im_))


# ---------------------------------------------------------------------------
# Metric trees


class MetricTree(GeodesicSpace):
    """Finite weighted tree, with every edge an isometric copy of a real interval.

    Parameters
    ----------
    nodes : sequence of hashable ids
    edges : sequence of ``(a, b, length)`` with ``length > 0``
    name : space id suffix, the space id is ``"tree:<name>"``

    Node-to-node distances and shortest-path predecessors are precomputed, so
    every query is O(path length).
    """

    default_tol = 1e-9
    n_coords = 1

    def __init__(self, nodes: Sequence, edges: Sequence[tuple], name: str = "custom"):
        self.nodes = list(nodes)
        if not self.nodes:
            raise ValueError("a metric tree needs at least one node")
        self.index = {nid: i for i, nid in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise ValueError("duplicate node ids")
        ea, eb, el = [], [], []
        seen = set()
        for a, b, length in edges:
            if a not in self.index or b not in self.index:
                raise ValueError(f"edge ({a!r}, {b!r}) references an unknown node")
            i, j = self.index[a], self.index[b]
            if i == j:
                raise ValueError(f"self-loop at {a!r}")
            if not (length > 0 and math.isfinite(length)):
                raise ValueError(f"edge ({a!r}, {b!r}) has non-positive length {length}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge ({a!r}, {b!r})")
            seen.add(key)
            ea.append(i)
            eb.append(j)
            el.append(float(length))
        n = len(self.nodes)
        if len(el) != n - 1:
            raise ValueError("a tree on n nodes has exactly n - 1 edges")
        self.edge_a = ea
        self.edge_b = eb
        self.edge_len = el
        self.edge_of = {}
        self.incident: list[list[int]] = [[] for _ in range(n)]
        for e, (i, j) in enumerate(zip(ea, eb)):
            self.edge_of[(i, j)] = e
            self.edge_of[(j, i)] = e
            self.incident[i].append(e)
            self.incident[j].append(e)
        if n > 1:
            graph = coo_matrix((el, (ea, eb)), shape=(n, n)).tocsr()
            ncomp, _ = connected_components(graph, directed=False)
            if ncomp != 1:
                raise ValueError("metric tree graph is not connected")
            self.D, self.pred = shortest_path(graph, directed=False, return_predecessors=True)
        else:
            self.D = np.zeros((1, 1))
            self.pred = np.full((1, 1), -9999)
        self.total_length = float(sum(el))
        self.name = name
        self.id = f"tree:{name}"

    # -- construction helpers -------------------------------------------
    @classmethod
    def load(cls, doc: dict | str | Path, name: str | None = None) -> "MetricTree":
        """Build from ``{"nodes": [...], "edges": [{"a":, "b":, "len":}, ...]}``.

        ``doc`` may be the parsed document, a JSON string or a file path.
        """
        if isinstance(doc, Path) or (isinstance(doc, str) and not doc.lstrip().startswith("{")):
            path = Path(doc)
            doc = json.loads(path.read_text())
            name = name or doc.get("name") or path.stem
        elif isinstance(doc, str):
            doc = json.loads(doc)
        try:
            edges = [(e["a"], e["b"], float(e["len"])) for e in doc["edges"]]
            nodes = doc["nodes"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed tree document: {exc}") from None
        return cls(nodes, edges, name=name or doc.get("name", "custom"))

    def to_doc(self) -> dict:
        return {"nodes": list(self.nodes),
                "edges": [{"a": self.nodes[i], "b": self.nodes[j], "len": ln}
                          for i, j, ln in zip(self.edge_a, self.edge_b, self.edge_len)]}

    def node(self, nid) -> Point:
        if nid not in self.index:
            raise InvalidPointError(f"unknown node {nid!r}")
        return Point(self.id, TreePos(node=self.index[nid]))

    def on_edge(self, edge: int, offset: float) -> Point:
        """Point of edge ``edge`` at ``offset`` from its first endpoint."""
        if not (0 <= edge < len(self.edge_len)):
            raise InvalidPointError(f"unknown edge {edge}")
        if not (0.0 <= offset <= self.edge_len[edge]):
            raise InvalidPointError(f"offset {offset} outside [0, {self.edge_len[edge]}]")
        return Point(self.id, self._canon(edge, float(offset)))

    def between(self, a, b, offset: float) -> Point:
        """Point on the edge joining nodes ``a`` and ``b`` at ``offset`` from ``a``."""
        i, j = self.index[a], self.index[b]
        e = self.edge_of.get((i, j))
        if e is None:
            raise InvalidPointError(f"no edge between {a!r} and {b!r}")
        if self.edge_a[e] != i:
            offset = self.edge_len[e] - offset
        return self.on_edge(e, offset)

    def origin(self) -> Point:
        return Point(self.id, TreePos(node=0))

    def _canon(self, e: int, off: float) -> TreePos:
        if off <= 0.0:
            return TreePos(node=self.edge_a[e])
        if off >= self.edge_len[e]:
            return TreePos(node=self.edge_b[e])
        return TreePos(edge=e, offset=off)

    def _valid(self, v) -> bool:
        if not isinstance(v, TreePos):
            return False
        if v.is_node:
            return v.node < len(self.nodes) and v.edge < 0
        return (0 <= v.edge < len(self.edge_len)
                and 0.0 <= v.offset <= self.edge_len[v.edge])

    # -- distances ----------------------------------------------------------
    def _node_dist(self, i: int, v: TreePos) -> float:
        if v.is_node:
            return float(self.D[i, v.node])
        e, o = v.edge, v.offset
        return min(self.D[i, self.edge_a[e]] + o,
                   self.D[i, self.edge_b[e]] + self.edge_len[e] - o)

    def _exit(self, v: TreePos, toward: TreePos) -> tuple[int, float]:
        """First node on the geodesic from ``v`` to ``toward`` and its distance."""
        if v.is_node:
            return v.node, 0.0
        e, o = v.edge, v.offset
        a, b = self.edge_a[e], self.edge_b[e]
        via_a = o + self._node_dist(a, toward)
        via_b = self.edge_len[e] - o + self._node_dist(b, toward)
        return (a, o) if via_a <= via_b else (b, self.edge_len[e] - o)

    def _distance(self, u: TreePos, v: TreePos) -> float:
        if u.is_node:
            return float(self._node_dist(u.node, v))
        if v.is_node:
            return float(self._node_dist(v.node, u))
        if u.edge == v.edge:
            return abs(u.offset - v.offset)
        e, o = u.edge, u.offset
        return float(min(o + self._node_dist(self.edge_a[e], v),
                         self.edge_len[e] - o + self._node_dist(self.edge_b[e], v)))

    def node_path(self, i: int, j: int) -> list[int]:
        """Node indices of the tree path from ``i`` to ``j`` (inclusive)."""
        path = [j]
        while path[-1] != i:
            path.append(int(self.pred[i, path[-1]]))
        return path[::-1]

    def _at(self, e: int, from_node: int, s: float) -> TreePos:
        """Point of edge ``e`` at distance ``s`` from its endpoint ``from_node``."""
        off = s if self.edge_a[e] == from_node else self.edge_len[e] - s
        return self._canon(e, off)

    def _combine(self, u: TreePos, v: TreePos, t: float) -> TreePos:
        # walk (1 - t) d(u, v) from u toward v
        if not u.is_node and not v.is_node and u.edge == v.edge:
            return self._canon(u.edge, u.offset + (1.0 - t) * (v.offset - u.offset))
        s = (1.0 - t) * self._distance(u, v)
        first, c_first = self._exit(u, v)
        last, c_last = self._exit(v, u)
        if s <= c_first:
            # still on u's own edge
            if u.is_node:
                return u
            e = u.edge
            off = u.offset - s if first == self.edge_a[e] else u.offset + s
            return self._canon(e, off)
        s -= c_first
        path = self.node_path(first, last)
        for i, j in zip(path, path[1:]):
            e = self.edge_of[(i, j)]
            ln = self.edge_len[e]
            if s <= ln:
                return self._at(e, i, s)
            s -= ln
        if v.is_node:
            return v
        return self._at(v.edge, last, min(s, c_last))

    # -- sampling -----------------------------------------------------------
    def sample(self, rng):
        if not self.edge_len:
            return Point(self.id, TreePos(node=0))
        u = rng.uniform(0.0, self.total_length)
        for e, ln in enumerate(self.edge_len):
            if u < ln or e == len(self.edge_len) - 1:
                return Point(self.id, self._canon(e, min(u, ln)))
            u -= ln

    def _walk(self, e: int, target: int, rem: float, dist: float, rng) -> TreePos:
        """Move ``dist`` along edge ``e`` toward ``target`` (``rem`` away),
        continuing through nodes on random branches; stops at leaves."""
        while dist > rem:
            dist -= rem
            nxt = [f for f in self.incident[target] if f != e]
            if not nxt:
                return TreePos(node=target)
            e = nxt[int(rng.integers(len(nxt)))]
            src = target
            target = self.edge_b[e] if self.edge_a[e] == src else self.edge_a[e]
            rem = self.edge_len[e]
        # dist from the far end 'target' is rem - dist
        src = self.edge_a[e] if self.edge_b[e] == target else self.edge_b[e]
        return self._at(e, src, self.edge_len[e] - (rem - dist))

    def _directions(self, v: TreePos) -> list[tuple[int, int, float]]:
        """(edge, target node, distance to target) for every way out of ``v``."""
        if v.is_node:
            out = []
            for e in self.incident[v.node]:
                tgt = self.edge_b[e] if self.edge_a[e] == v.node else self.edge_a[e]
                out.append((e, tgt, self.edge_len[e]))
            return out
        e = v.edge
        return [(e, self.edge_a[e], v.offset), (e, self.edge_b[e], self.edge_len[e] - v.offset)]

    def sample_near(self, center, radius, rng, on_sphere=False):
        dirs = self._directions(center.value)
        if not dirs:
            return center
        e, tgt, rem = dirs[int(rng.integers(len(dirs)))]
        rho = radius if on_sphere else radius * rng.uniform()
        return Point(self.id, self._walk(e, tgt, rem, rho, rng))

    def extend(self, x, through, length, rng):
        z = through.value
        d_xz = self._distance(x.value, z)
        dirs = self._directions(z)
        if d_xz > 0.0:
            # drop the direction that heads back toward x
            away = []
            for e, tgt, rem in dirs:
                if not x.value.is_node and x.value.edge == e:
                    continue
                if not (abs(rem + self._node_dist(tgt, x.value) - d_xz) <= 1e-12 * max(1.0, d_xz)):
                    away.append((e, tgt, rem))
            dirs = away
        if not dirs:
            return None
        e, tgt, rem = dirs[int(rng.integers(len(dirs)))]
        return Point(self.id, self._walk(e, tgt, rem, length, rng))

    def nudge(self, x, coord, delta):
        v = x.value
        if v.is_node:
            inc = self.incident[v.node]
            k = 0 if delta > 0 else 1
            if k >= len(inc):
                return None
            e = inc[k]
            return Point(self.id, self._at(e, v.node, min(abs(delta), self.edge_len[e])))
        off = min(max(v.offset + delta, 0.0), self.edge_len[v.edge])
        return Point(self.id, self._canon(v.edge, off))

    # -- serialization ------------------------------------------------------
    def to_json(self, x):
        v = x.value
        if v.is_node:
            return {"space": self.id, "tree": {"node": self.nodes[v.node]}}
        return {"space": self.id, "tree": {"edge": v.edge, "offset": v.offset}}

    def point_from_json(self, doc):
        body = doc.get("tree") if isinstance(doc, dict) else None
        if not isinstance(body, dict):
            raise InvalidPointError(f"not a tree point document: {doc!r}")
        if "node" in body:
            return self.node(body["node"])
        edge = body.get("edge")
        if isinstance(edge, (list, tuple)):
            return self.between(edge[0], edge[1], float(body["offset"]))
        return self.on_edge(int(edge), float(body["offset"]))


def coerce_point(space: GeodesicSpace, v) -> Point:
    """Accept a :class:`Point`, a point document or a bare payload: coordinates
    (Euclidean), a complex number or ``[re, im]`` (disk), a node id (tree)."""
    if isinstance(v, Point):
        space.check(v)
        return v
    if isinstance(v, dict):
        return space.point_from_json(v)
    if isinstance(space, Euclidean):
        return space.point(v)
    if isinstance(space, PoincareDisk):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise InvalidPointError(f"disk point needs [re, im], got {v!r}")
            v = complex(float(v[0]), float(v[1]))
        return space.point(complex(v))
    if isinstance(space, MetricTree):
        return space.node(v)
    raise InvalidPointError(f"cannot interpret {v!r} as a point of {space.id}")


def encode_value(v, space: GeodesicSpace | None = None):
    """JSON-friendly form of a witness entry."""
    if isinstance(v, Point):
        if space is not None and space.id == v.space:
            return space.to_json(v)
        val = v.value
        if isinstance(val, complex):
            return {"space": v.space, "disk": [val.real, val.imag]}
        if isinstance(val, TreePos):
            if val.is_node:
                return {"space": v.space, "tree": {"node_index": val.node}}
            return {"space": v.space, "tree": {"edge": val.edge, "offset": val.offset}}
        return {"space": v.space, "euclidean": list(val)}
    if isinstance(v, (list, tuple)):
        return [encode_value(u, space) for u in v]
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


# ---------------------------------------------------------------------------
# built-in trees and name lookup


def star3() -> MetricTree:
    """Star with center ``c`` and unit edges to leaves ``a``, ``b``, ``e``."""
    return MetricTree(["c", "a", "b", "e"], [("a", "c", 1.0), ("b", "c", 1.0), ("e", "c", 1.0)],
                      name="star3")


def path4() -> MetricTree:
    """Path ``n0 - n1 - n2 - n3`` of three unit edges."""
    return MetricTree(["n0", "n1", "n2", "n3"],
                      [("n0", "n1", 1.0), ("n1", "n2", 1.0), ("n2", "n3", 1.0)], name="path4")


_BUILTIN_TREES = {"star3": star3, "path4": path4}


def space_from_name(name: str) -> GeodesicSpace:
    """Resolve ``euclidean:N``, ``disk``, ``tree:star3``, ``tree:path4`` or
    ``tree:<path to JSON>``."""
    kind, _, arg = name.partition(":")
    if kind == "euclidean":
        try:
            return Euclidean(int(arg))
        except ValueError:
            raise ValueError(f"bad Euclidean dimension in {name!r}") from None
    if kind == "disk" and not arg:
        return PoincareDisk()
    if kind == "tree" and arg:
        if arg in _BUILTIN_TREES:
            return _BUILTIN_TREES[arg]()
        path = Path(arg)
        if not path.is_file():
            raise ValueError(f"unknown tree {arg!r} (not a builtin and no such file)")
        return MetricTree.load(path)
    raise ValueError(f"unknown space {name!r}")


# ---------------------------------------------------------------------------
# metric axioms


def audit_metric_axioms(space: GeodesicSpace, sample_count: int, seed: int = 0) -> ViolationReport:
    """Sample triples and report the worst residual of each metric axiom.

    Components (all should be >= 0): ``symmetry`` = -|d(x,y) - d(y,x)|,
    ``nonnegativity`` = d(x,y), ``identity`` = -d(x,x),
    ``triangle`` = d(x,y) + d(y,z) - d(x,z). ``worst_residual`` is the minimum
    over all of them.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    comps = {"symmetry": Tracker(), "nonnegativity": Tracker(),
             "identity": Tracker(), "triangle": Tracker()}
    for _ in range(sample_count):
        x, y, z = space.sample(rng), space.sample(rng), space.sample(rng)
        w = {"x": x, "y": y, "z": z}
        dxy, dyx = space.distance(x, y), space.distance(y, x)
        comps["symmetry"].add(-abs(dxy - dyx), w)
        comps["nonnegativity"].add(dxy, w)
        comps["identity"].add(-space.distance(x, x), w)
        comps["triangle"].add(dxy + space.distance(y, z) - space.distance(x, z), w)
    name, worst = min(comps.items(), key=lambda kv: kv[1].worst)
    report = worst.report("metric_axioms", space.id, space.default_tol)
    report.checked = sample_count
    report.extras = {k: tr.worst for k, tr in comps.items()}
    report.extras["worst_component"] = name
    return report
