import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cat0lab import (Euclidean, InvalidPointError, MetricTree, PoincareDisk, Point,
                     SpaceMismatchError, TreePos, audit_metric_axioms, coerce_point, path4,
                     space_from_name, star3)

STAR_NODES = ["c", "a", "b", "e"]
STAR_EDGES = [("a", "c", 1.0), ("b", "c", 1.0), ("e", "c", 1.0)]


# -- distance ---------------------------------------------------------------

def test_euclidean_distance_pythagoras():
    E = Euclidean(2)
    assert E.distance(E.point([0, 0]), E.point([3, 4])) == 5.0


def test_disk_distance_matches_quadrature():
    D = PoincareDisk()
    d = D.distance(D.point(0), D.point(0.5))
    assert d == pytest.approx(math.log(3), abs=1e-12)
    assert d == pytest.approx(oracles.disk_radial_length(0.5), abs=1e-10)


@given(st.complex_numbers(max_magnitude=0.95), st.complex_numbers(max_magnitude=0.95))
def test_disk_distance_matches_arccosh_form(z, w):
    D = PoincareDisk()
    expected = oracles.disk_distance_arccosh(z, w)
    assert D.distance(D.point(z), D.point(w)) == pytest.approx(expected, rel=1e-9, abs=1e-7)


def test_star_leaf_distance():
    T = star3()
    assert T.distance(T.node("a"), T.node("b")) == 2.0


def test_tree_distance_matches_subdivided_graph_oracle():
    T = star3()
    rng = np.random.default_rng(7)
    for _ in range(200):
        qs = []
        for _ in range(2):
            a, b, _ = STAR_EDGES[rng.integers(3)]
            off = float(rng.choice([0.0, 1.0, rng.uniform()]))
            qs.append((a, b, off))
        u, v = (T.between(a, b, off) for a, b, off in qs)
        want = oracles.subdivided_distance(STAR_NODES, STAR_EDGES, *qs)
        assert T.distance(u, v) == pytest.approx(want, abs=1e-12)


def test_path_tree_node_distances_equal_graph_shortest_paths():
    P = path4()
    g = oracles.tree_graph(P.nodes, [("n0", "n1", 1.0), ("n1", "n2", 1.0), ("n2", "n3", 1.0)])
    import networkx as nx
    for a, b in itertools.product(P.nodes, repeat=2):
        assert P.distance(P.node(a), P.node(b)) == nx.shortest_path_length(g, a, b, weight="weight")


def test_weighted_tree_against_oracle():
    nodes = list("rstuvw")
    edges = [("r", "s", 0.7), ("r", "t", 1.9), ("t", "u", 0.4), ("t", "v", 2.5), ("s", "w", 1.1)]
    T = MetricTree(nodes, edges, name="w6")
    rng = np.random.default_rng(3)
    for _ in range(100):
        qs = []
        for _ in range(2):
            a, b, ln = edges[rng.integers(len(edges))]
            qs.append((a, b, float(rng.uniform(0, ln))))
        u, v = (T.between(a, b, off) for a, b, off in qs)
        assert T.distance(u, v) == pytest.approx(oracles.subdivided_distance(nodes, edges, *qs),
                                                 abs=1e-12)


# -- combine / midpoint ------------------------------------------------------

def test_euclidean_combine_weights_first_argument():
    E = Euclidean(2)
    z = E.combine(E.point([0, 0]), E.point([2, 0]), 0.25)
    assert z.value == pytest.approx((1.5, 0.0), abs=1e-15)


def test_star_combine_lands_on_edge():
    T = star3()
    z = T.combine(T.node("a"), T.node("b"), 0.75)
    assert z == T.between("a", "c", 0.5)
    assert T.distance(z, T.node("a")) == pytest.approx(0.5, abs=1e-15)


def test_disk_combine_and_midpoint():
    D = PoincareDisk()
    z = D.combine(D.point(0), D.point(0.5), 0.5)
    assert z.value.real == pytest.approx(2 - math.sqrt(3), abs=1e-12)
    assert abs(z.value.imag) < 1e-15
    assert D.midpoint(D.point(0), D.point(0.5)).value == z.value


def test_midpoints_of_examples():
    E = Euclidean(2)
    assert E.midpoint(E.point([0, 0]), E.point([2, 0])).value == (1.0, 0.0)
    T = star3()
    assert T.midpoint(T.node("a"), T.node("b")) == T.node("c")


def test_endpoint_identities(any_space):
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y = any_space.sample(rng), any_space.sample(rng)
        assert any_space.combine(x, y, 1.0) == x
        assert any_space.combine(x, y, 0.0) == y


def test_geodesic_consistency(any_space):
    rng = np.random.default_rng(1)
    tol = 1e-7 if isinstance(any_space, PoincareDisk) else 1e-9
    for _ in range(300):
        x, y = any_space.sample(rng), any_space.sample(rng)
        s, t = rng.uniform(size=2)
        d = any_space.distance(x, y)
        got = any_space.distance(any_space.combine(x, y, s), any_space.combine(x, y, t))
        assert abs(got - abs(s - t) * d) <= tol


def test_midpoint_symmetry(any_space):
    rng = np.random.default_rng(2)
    for _ in range(100):
        x, y = any_space.sample(rng), any_space.sample(rng)
        m1, m2 = any_space.midpoint(x, y), any_space.midpoint(y, x)
        assert any_space.distance(m1, m2) <= 1e-9


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(0, 1))
def test_euclidean_combine_is_affine(a, b, t):
    E = Euclidean(3)
    z = E.combine(E.point(a), E.point(b), t)
    expected = t * np.asarray(a) + (1 - t) * np.asarray(b)
    assert np.allclose(z.value, expected, atol=1e-12, rtol=0)


def test_combine_rejects_bad_t():
    E = Euclidean(1)
    with pytest.raises(ValueError):
        E.combine(E.point(0), E.point(1), 1.5)


# -- metric axioms -----------------------------------------------------------

def test_metric_axioms_euclidean_exact():
    rep = audit_metric_axioms(Euclidean(3), 1000, seed=0)
    assert rep.passed
    assert abs(rep.extras["symmetry"]) <= 1e-12
    assert rep.extras["identity"] == 0.0
    assert rep.extras["triangle"] >= -1e-12


def test_metric_axioms_disk_triangle():
    rep = audit_metric_axioms(PoincareDisk(), 1000, seed=0)
    assert rep.extras["triangle"] >= -1e-9
    assert rep.passed


def test_metric_axioms_trees():
    for T in (star3(), path4()):
        assert audit_metric_axioms(T, 500, seed=4).passed


def test_metric_axioms_deterministic():
    a = audit_metric_axioms(PoincareDisk(), 200, seed=9)
    b = audit_metric_axioms(PoincareDisk(), 200, seed=9)
    assert a.to_dict() == b.to_dict()


# -- validation --------------------------------------------------------------

def test_disk_validation_boundary():
    D = PoincareDisk()
    assert D.validate_point(Point("disk", 0.999 + 0j))
    assert not D.validate_point(Point("disk", 1.0 + 0j))
    with pytest.raises(InvalidPointError):
        D.point(1.0)


def test_tree_offset_at_edge_length_collapses_to_node():
    T = star3()
    p = T.on_edge(0, 1.0)
    assert T.validate_point(p)
    assert p == T.node("c")
    assert T.on_edge(0, 0.0) == T.node("a")


def test_tree_invalid_offsets():
    T = star3()
    with pytest.raises(InvalidPointError):
        T.on_edge(0, 1.5)
    assert not T.validate_point(Point(T.id, TreePos(edge=0, offset=2.0)))
    assert not T.validate_point(Point(T.id, TreePos(node=17)))


def test_space_mismatch():
    E2, E3 = Euclidean(2), Euclidean(3)
    with pytest.raises(SpaceMismatchError):
        E2.distance(E2.point([0, 0]), E3.point([0, 0, 0]))
    assert not E2.validate_point(E3.point([0, 0, 0]))


@pytest.mark.parametrize("nodes,edges", [
    (["a", "b", "c"], [("a", "b", 1.0)]),                       # disconnected
    (["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)]),  # cycle
    (["a", "b"], [("a", "b", 0.0)]),                            # zero length
    (["a", "b"], [("a", "z", 1.0)]),                            # unknown node
    (["a", "b", "c"], [("a", "b", 1.0), ("b", "a", 2.0)]),      # duplicate edge
])
def test_malformed_trees_rejected(nodes, edges):
    with pytest.raises(ValueError):
        MetricTree(nodes, edges)


def test_euclidean_dimension_positive():
    with pytest.raises(ValueError):
        Euclidean(0)


# -- serialization -----------------------------------------------------------

def test_tree_load_from_json(tmp_path):
    doc = {"nodes": STAR_NODES,
           "edges": [{"a": a, "b": b, "len": ln} for a, b, ln in STAR_EDGES]}
    path = tmp_path / "star.json"
    path.write_text(json.dumps(doc))
    T = space_from_name(f"tree:{path}")
    assert T.distance(T.node("a"), T.node("e")) == 2.0
    assert MetricTree.load(T.to_doc()).D.tolist() == T.D.tolist()


def test_point_json_round_trip(any_space):
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = any_space.sample(rng)
        doc = json.loads(json.dumps(any_space.to_json(x)))
        assert any_space.point_from_json(doc) == x


def test_point_documents_follow_format():
    assert Euclidean(2).to_json(Euclidean(2).point([1, 2])) == {"space": "euclidean:2",
                                                                "euclidean": [1.0, 2.0]}
    D = PoincareDisk()
    assert D.to_json(D.point(0.5j))["disk"] == [0.0, 0.5]
    T = star3()
    assert T.to_json(T.between("a", "c", 0.25))["tree"] == {"edge": 0, "offset": 0.25}


def test_coerce_point_payloads():
    assert coerce_point(Euclidean(1), 4).value == (4.0,)
    assert coerce_point(PoincareDisk(), [0.1, 0.2]).value == 0.1 + 0.2j
    T = star3()
    assert coerce_point(T, "b") == T.node("b")


@pytest.mark.parametrize("name", ["euclidean:x", "sphere", "tree:nope", "disk:2"])
def test_unknown_space_names(name):
    with pytest.raises(ValueError):
        space_from_name(name)
