import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cat0lab import (INF, AuditSpec, Euclidean, MetricTree, ModulusProbe, PoincareDisk,
                     check_busemann, check_cat0, check_convex_structure, check_implication,
                     check_midpoint_pair_bound, check_p_convexity, estimate_uc_modulus,
                     is_eps_separated, star3)
from cat0lab.audit import (busemann_residual, cat0_residual, convex_structure_residual,
                           midpoint_pair_residual, normalize_kind, p_convexity_residual,
                           power_mean, reevaluate)

SQUARE = ([0, 0], [2, 0], [0, 2], [2, 2])


def _square():
    E = Euclidean(2)
    return E, [E.point(c) for c in SQUARE]


# -- hand-evaluated residuals -------------------------------------------------

def test_midpoint_pair_square_witness():
    E, (x, y, z, w) = _square()
    assert midpoint_pair_residual(E, x, y, z, w, 2.0) == pytest.approx(math.sqrt(6) - 2, abs=1e-12)


def test_busemann_square_is_equality():
    E, (x, y, z, w) = _square()
    assert busemann_residual(E, x, y, z, w, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_busemann_star_witness():
    T = star3()
    a, b, e = T.node("a"), T.node("b"), T.node("e")
    assert busemann_residual(T, a, b, b, e, 1.0) == pytest.approx(2.0, abs=1e-15)


def test_p_convexity_star_witness():
    T = star3()
    a, b, e = T.node("a"), T.node("b"), T.node("e")
    assert p_convexity_residual(T, a, b, e, 1.0) == pytest.approx(1.0, abs=1e-15)


def test_convex_structure_collinear_equality():
    E = Euclidean(1)
    assert convex_structure_residual(E, E.point(0), E.point(1), E.point(0), 0.3) == \
        pytest.approx(0.0, abs=1e-15)


def test_convex_structure_zero_when_geodesic_passes_through_x():
    # z on the branch a-c hanging off x = c: the path z -> y runs through x
    T = star3()
    x, y = T.node("c"), T.node("b")
    for off in (0.0, 0.3, 0.9):
        z = T.between("a", "c", off)
        for t in (0.1, 0.37, 0.8):
            assert convex_structure_residual(T, x, y, z, t) == pytest.approx(0.0, abs=1e-12)


def test_convex_structure_interior_point_of_segment():
    # z = W(x, y, s) strictly inside [x, y]: residual (t(1-s) + (1-t)s - |s-t|) d(x, y)
    T = star3()
    x, y = T.node("a"), T.node("b")
    for s in (0.2, 0.5):
        z = T.combine(x, y, s)
        for t in (0.1, 0.37):
            want = (t * (1 - s) + (1 - t) * s - abs(s - t)) * 2.0
            assert convex_structure_residual(T, x, y, z, t) == pytest.approx(want, abs=1e-12)


def test_disk_cat0_strict_off_geodesic():
    D = PoincareDisk()
    r = cat0_residual(D, D.point(0.5), D.point(-0.5), D.point(0.5j), 0.5)
    assert r > 1e-3


def test_cat0_endpoint_degeneracy(model_space):
    rng = np.random.default_rng(11)
    for _ in range(20):
        x, y, z = (model_space.sample(rng) for _ in range(3))
        for t in (0.0, 1.0):
            assert abs(cat0_residual(model_space, x, y, z, t)) <= 1e-9


def test_degenerate_pair_residual_zero(any_space):
    rng = np.random.default_rng(3)
    x, z = any_space.sample(rng), any_space.sample(rng)
    for p in (1.0, 2.0, INF):
        assert p_convexity_residual(any_space, x, x, z, p) == pytest.approx(0.0, abs=1e-12)
    assert busemann_residual(any_space, x, z, x, z, 2.0) == pytest.approx(0.0, abs=1e-12)


def test_coincident_pairs_midpoint_bound_nonnegative(any_space):
    rng = np.random.default_rng(4)
    x, y = any_space.sample(rng), any_space.sample(rng)
    assert midpoint_pair_residual(any_space, x, y, x, y, 2.0) >= 0.0


def test_power_mean_limits():
    assert power_mean(1.0, 3.0, 1.0) == 2.0
    assert power_mean(1.0, 3.0, INF) == 3.0
    assert power_mean(3.0, 4.0, 2.0) == pytest.approx(math.sqrt(12.5))


# -- audits over samples ------------------------------------------------------

@pytest.mark.parametrize("p", [1.0, 2.0, INF])
def test_euclidean_p_convexity(p):
    rep = check_p_convexity(Euclidean(2), AuditSpec(p=p, sample_count=10_000, seed=1))
    assert rep.passed and rep.worst_residual >= -1e-9


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_euclidean_busemann(p):
    rep = check_busemann(Euclidean(2), AuditSpec(p=p, sample_count=10_000, seed=2))
    assert rep.worst_residual >= -1e-9


def test_euclidean_cat0_is_identity_for_every_sample():
    E = Euclidean(3)
    rep = check_cat0(E, AuditSpec(sample_count=10_000, seed=3))
    assert rep.worst_residual >= -1e-9 and rep.max_residual <= 1e-9


def test_curved_and_branching_spaces_pass(model_space):
    spec = AuditSpec(p=2.0, sample_count=10_000, seed=5)
    for check in (check_cat0, check_p_convexity, check_busemann, check_convex_structure,
                  check_midpoint_pair_bound):
        rep = check(model_space, spec)
        assert rep.passed, (check.__name__, rep.worst_residual)


def test_busemann_min_pairing_is_tighter():
    D = PoincareDisk()
    spec = AuditSpec(p=2.0, sample_count=2000, seed=6)
    plain, tight = check_busemann(D, spec), check_busemann(D, spec, use_min=True)
    assert tight.passed
    assert tight.worst_residual <= plain.worst_residual + 1e-15


def test_witness_reproduces_worst_residual(model_space):
    spec = AuditSpec(p=2.0, sample_count=500, seed=8)
    for check in (check_cat0, check_p_convexity, check_busemann, check_convex_structure,
                  check_midpoint_pair_bound):
        rep = check(model_space, spec)
        assert reevaluate(model_space, rep) == pytest.approx(rep.worst_residual, abs=1e-12)


def test_p_convexity_reports_relaxed_chain():
    rep = check_p_convexity(PoincareDisk(), AuditSpec(p=2.0, sample_count=2000, seed=1))
    assert rep.extras["eq2_relaxed"] >= -1e-7
    assert rep.extras["eq2_outer"] >= -1e-7
    # the middle link (1/2)^(1/p)(a+b) <= (a+b)/2 only holds at p = 1
    assert rep.extras["eq2_middle"] < 0


def test_strict_p_convexity_in_euclidean_plane():
    rep = check_p_convexity(Euclidean(2), AuditSpec(p=2.0, sample_count=2000, strict=True))
    assert rep.extras["strict_failures"] == 0 and rep.passed


def test_strict_1_convexity_fails_on_tree():
    # trees are not strictly 1-convex: branch configurations give equality
    T = star3()
    rep = check_p_convexity(T, AuditSpec(p=1.0, sample_count=3000, strict=True, seed=2))
    assert rep.extras["strict_failures"] > 0
    assert not rep.passed


def test_midpoint_pair_rejects_infinite_p():
    with pytest.raises(ValueError):
        check_midpoint_pair_bound(Euclidean(2), AuditSpec(p=INF))


def test_audits_deterministic():
    spec = AuditSpec(sample_count=300, seed=42)
    assert check_cat0(PoincareDisk(), spec).to_dict() == check_cat0(PoincareDisk(), spec).to_dict()


@pytest.mark.parametrize("kw", [dict(p=0.5), dict(sample_count=0), dict(tol=-1.0)])
def test_audit_spec_validation(kw):
    with pytest.raises(ValueError):
        AuditSpec(**kw)


def test_default_tolerances():
    assert AuditSpec().tol_for(Euclidean(2)) == 1e-9
    assert AuditSpec().tol_for(star3()) == 1e-9
    assert AuditSpec().tol_for(PoincareDisk()) == 1e-7


# -- modulus of uniform convexity ---------------------------------------------

def test_uc_modulus_grid_oracle_agrees_with_closed_form():
    assert oracles.euclid_uc_grid(1.0) == pytest.approx(oracles.euclid_uc_closed_form(1.0),
                                                        abs=0.005)


def test_uc_modulus_euclidean_eps_one():
    est = estimate_uc_modulus(Euclidean(2), ModulusProbe(1.0, 1.0),
                              spec=AuditSpec(sample_count=20_000, seed=0))
    assert est.estimated_delta == pytest.approx(oracles.euclid_uc_grid(1.0), abs=0.02)
    assert est.estimated_delta == pytest.approx(1 - math.sqrt(3) / 2, abs=0.02)


def test_uc_modulus_diametral():
    est = estimate_uc_modulus(Euclidean(2), ModulusProbe(2.0, 1.0),
                              spec=AuditSpec(sample_count=20_000, seed=0))
    assert est.estimated_delta == pytest.approx(1.0, abs=0.02)


def test_uc_modulus_small_eps_near_zero():
    est = estimate_uc_modulus(Euclidean(2), ModulusProbe(0.02, 1.0),
                              spec=AuditSpec(sample_count=5_000, seed=0))
    assert est.estimated_delta <= 0.02


def test_uc_modulus_monotone_in_eps():
    spec = AuditSpec(sample_count=5_000, seed=1)
    deltas = [estimate_uc_modulus(Euclidean(2), ModulusProbe(e, 1.0), spec=spec).estimated_delta
              for e in (0.25, 0.5, 1.0, 1.5, 2.0)]
    for lo, hi in zip(deltas, deltas[1:]):
        assert lo <= hi + 0.02


def test_uc_modulus_tree_and_disk():
    spec = AuditSpec(sample_count=5_000, seed=2)
    tree = estimate_uc_modulus(star3(), ModulusProbe(1.0, 1.0), spec=spec)
    assert tree.estimated_delta == pytest.approx(0.5, abs=0.02)
    disk = estimate_uc_modulus(PoincareDisk(), ModulusProbe(1.0, 0.5), spec=spec)
    assert disk.estimated_delta is not None and 0.0 < disk.estimated_delta <= 1.0


def test_uc_modulus_inconclusive_when_nothing_admissible():
    # leaves of star3 are at most 2 apart, so eps = 2 with r = 1 needs
    # antipodal points through the center; a point-sized tree has none
    single = MetricTree(["o"], [], name="pt")
    est = estimate_uc_modulus(single, ModulusProbe(1.0, 1.0), spec=AuditSpec(sample_count=200))
    assert est.inconclusive


@pytest.mark.parametrize("eps,r", [(0.0, 1.0), (2.5, 1.0), (1.0, 0.0)])
def test_modulus_probe_validation(eps, r):
    with pytest.raises(ValueError):
        ModulusProbe(eps, r)


# -- implications ------------------------------------------------------------

def test_midpoint_implies_1_convex_euclidean():
    rep = check_implication(Euclidean(2), "midpoint⇒1-convex", AuditSpec(sample_count=2000))
    assert rep.passed and rep.extras["hypothesis_held"] == 2000


def test_busemann_midpoint_implies_p_convex_tree():
    rep = check_implication(star3(), "busemann∧midpoint⇒p-convex",
                            AuditSpec(p=2.0, sample_count=2000))
    assert rep.passed and rep.extras["hypothesis_held"] > 0


def test_uc_implies_uc_p():
    rep = check_implication(Euclidean(2), "uc=>uc-p", AuditSpec(p=2.0, sample_count=3000))
    assert rep.passed


def test_implication_one_point_space_vacuous():
    single = MetricTree(["o"], [], name="pt")
    rep = check_implication(single, "uc=>uc-p", AuditSpec(sample_count=100))
    assert rep.passed


def test_unknown_implication_kind():
    with pytest.raises(ValueError):
        normalize_kind("convex=>flat")


# -- separation -------------------------------------------------------------

def test_eps_separation_examples():
    E = Euclidean(1)
    assert is_eps_separated(E, [E.point(v) for v in (0, 1, 2)], 1.0)
    assert not is_eps_separated(E, [E.point(v) for v in (0, 0.5)], 1.0)
    T = star3()
    assert is_eps_separated(T, [T.node(v) for v in "abe"], 2.0)
    with pytest.raises(ValueError):
        is_eps_separated(E, [E.point(0)], 0.0)


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=8), st.floats(0.01, 5))
def test_eps_separation_matches_sorted_gaps(vals, eps):
    E = Euclidean(1)
    gaps = np.diff(sorted(vals))
    assert is_eps_separated(E, [E.point(v) for v in vals], eps) == bool(np.all(gaps >= eps))
