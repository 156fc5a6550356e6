import math

import numpy as np
import pytest

from cat0lab import (BallProjection, Contraction, Euclidean, Identity, PoincareDisk, QtConfig,
                     check_decay, check_iterated_bound, check_slice_bounds, check_two_map_bound,
                     compute_zt, qt_apply, star3)
from cat0lab.dynamics import batch_slices, batch_two_map


def _e1(*vals):
    E = Euclidean(1)
    return E, [E.point(v) for v in vals]


# -- Q_t ---------------------------------------------------------------------

def test_qt_apply_examples():
    E, (a, b) = _e1(0, 2)
    assert qt_apply(E, QtConfig(0.5, Identity(), Identity()), a, b).value == (1.0,)
    D = PoincareDisk()
    z = qt_apply(D, QtConfig(0.5, Identity(), Identity()), D.point(0), D.point(0.5))
    assert z.value.real == pytest.approx(2 - math.sqrt(3), abs=1e-12)


def test_qt_endpoint_collapse(model_space):
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = model_space.sample(rng), model_space.sample(rng)
        assert model_space.distance(qt_apply(model_space, QtConfig(1.0, Identity(), Identity()),
                                             a, b), a) <= 1e-12
        assert model_space.distance(qt_apply(model_space, QtConfig(0.0, Identity(), Identity()),
                                             a, b), b) <= 1e-12


def test_qt_config_rejects_bad_t():
    with pytest.raises(ValueError):
        QtConfig(1.2, Identity(), Identity())


# -- two-map bound ----------------------------------------------------------

def test_two_map_equality_case():
    E, (p, q, x, y) = _e1(0, 1, 0, 1)
    rec = check_two_map_bound(E, QtConfig(0.5, Identity(), Identity()), p, q, x, y)
    assert rec.lhs == pytest.approx(1.0, abs=1e-12)
    assert rec.rhs == pytest.approx(1.0, abs=1e-12)
    assert rec.residual == rec.rhs - rec.lhs


def test_two_map_coincident_inputs():
    E, (p, x) = _e1(0.3, -0.4)
    cfg = QtConfig(0.3, Contraction(E.point(0), 0.5), Contraction(E.point(1), 0.7))
    rec = check_two_map_bound(E, cfg, p, p, x, x)
    assert rec.lhs == 0.0 and rec.residual == rec.rhs >= 0.0


@pytest.mark.parametrize("K", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 1.0])
def test_two_map_bound_and_chain_hold(model_space, K, t):
    rng = np.random.default_rng(1)
    cfg = QtConfig(t, Contraction(model_space.sample(rng), K),
                   Contraction(model_space.sample(rng), K))
    tol = model_space.default_tol
    for rec in batch_two_map(model_space, cfg, 200, seed=2):
        assert rec.residual >= -tol
        assert set(rec.chain) == {"cat0_outer", "cat0_inner", "lipschitz"}
        assert all(v >= -tol for v in rec.chain.values())


def test_two_map_bound_with_projection_and_mixed_constants(model_space):
    cfg = QtConfig(0.4, BallProjection(model_space.origin(), 0.3),
                   Contraction(model_space.origin(), 0.2))
    assert all(r.ok(model_space.default_tol) for r in batch_two_map(model_space, cfg, 200, 3))


def test_iterated_bound_n1_matches_two_map():
    E, (p, q, x, y) = _e1(0.1, 0.9, -0.3, 0.6)
    cfg = QtConfig(0.3, Contraction(E.point(0), 0.5), Contraction(E.point(1), 0.8))
    a = check_two_map_bound(E, cfg, p, q, x, y)
    b = check_iterated_bound(E, cfg, p, q, x, y, 1)
    assert (a.lhs, a.rhs) == (b.lhs, b.rhs)


def test_iterated_bound_example():
    E, (p, q, x, y) = _e1(0, 1, 0, 1)
    c = Contraction(E.point(0), 0.5)
    rec = check_iterated_bound(E, QtConfig(0.5, c, c), p, q, x, y, 3)
    assert rec.residual >= 0.0


def test_iterated_bound_identities_constant_in_n():
    E, (p, q, x, y) = _e1(0.2, 0.5, -0.1, 0.8)
    cfg = QtConfig(0.6, Identity(), Identity())
    recs = [check_iterated_bound(E, cfg, p, q, x, y, n) for n in (1, 2, 5, 9)]
    assert len({(r.lhs, r.rhs) for r in recs}) == 1


def test_iterated_bound_random(model_space):
    rng = np.random.default_rng(5)
    cfg = QtConfig(0.35, Contraction(model_space.sample(rng), 0.8),
                   Contraction(model_space.sample(rng), 0.6))
    for _ in range(100):
        pts = [model_space.sample(rng) for _ in range(4)]
        assert check_iterated_bound(model_space, cfg, *pts, 4).ok(model_space.default_tol)


def test_iterated_bound_rejects_n0():
    E, (p,) = _e1(0)
    with pytest.raises(ValueError):
        check_iterated_bound(E, QtConfig(0.5, Identity(), Identity()), p, p, p, p, 0)


# -- decay ------------------------------------------------------------------

def test_decay_contractive_example():
    E, (p, q, x, y) = _e1(0, 1, 0, 1)
    c = Contraction(E.point(0), 0.5)
    rep = check_decay(E, QtConfig(0.5, c, c), p, q, x, y, 50)
    assert rep.mode == "contractive" and rep.passed
    assert rep.final_distance <= 1e-9
    assert rep.log_slope <= math.log(0.5) + 0.05


def test_decay_t0_is_pure_T_orbit():
    E, (p, q, x, y) = _e1(0.3, -0.7, 0, 1)
    T = Contraction(E.point(0), 0.5)
    rep = check_decay(E, QtConfig(0.0, Contraction(E.point(0), 0.9), T), p, q, x, y, 20)
    for n, d in enumerate(rep.distances, start=1):
        assert d <= 0.5 ** n * 1.0 + 1e-15


def test_decay_coincident_inputs_all_zero():
    E, (p, x) = _e1(0.3, 0.8)
    c = Contraction(E.point(0), 0.5)
    rep = check_decay(E, QtConfig(0.5, c, c), p, p, x, x, 10)
    assert rep.distances == [0.0] * 10


def test_decay_slope_bound_on_disk():
    D = PoincareDisk()
    rng = np.random.default_rng(8)
    S, T = Contraction(D.sample(rng), 0.6), Contraction(D.sample(rng), 0.4)
    pts = [D.sample(rng) for _ in range(4)]
    rep = check_decay(D, QtConfig(0.5, S, T), *pts, 80)
    assert rep.passed and rep.log_slope <= math.log(0.6) + 0.05


def test_decay_mixed_case_holds_at_half():
    E, (p, q, x, y) = _e1(0, 1, 0, 1)
    rep = check_decay(E, QtConfig(0.5, Contraction(E.point(0), 0.5), Identity()), p, q, x, y, 50)
    assert rep.mode == "mixed" and rep.passed


@pytest.mark.parametrize("t", [0.0, 0.25])
def test_decay_mixed_case_bound_violated_when_nonexpansive_weight_dominates(t):
    # S contracts to 0 while T = identity keeps d(T^n x, T^n y) = 1, so
    # d_n -> 1 - t, which exceeds min(t, 1 - t); the checker must flag it
    E, (p, q, x, y) = _e1(0, 1, 0, 1)
    rep = check_decay(E, QtConfig(t, Contraction(E.point(0), 0.5), Identity()), p, q, x, y, 50)
    assert rep.mode == "mixed" and rep.passed is False
    assert rep.tail_limsup == pytest.approx((1 - t) ** 2 - t ** 2, abs=1e-9)


def test_decay_inconclusive_without_hypotheses():
    E, (p,) = _e1(0)
    rep = check_decay(E, QtConfig(0.5, Identity(), Identity()), p, p, p, p, 5)
    assert rep.mode == "inconclusive" and rep.passed is None and rep.reason


# -- slices -----------------------------------------------------------------

def test_slice_example():
    E, (p, q, x, y) = _e1(0, 0, 0, 1)
    cfg = QtConfig(0.5, Identity(), Contraction(E.point(0), 0.5))
    recs = {r.label: r for r in check_slice_bounds(E, cfg, p, q, x, y, 2, 0)}
    r = recs["slice_T^n"]
    assert r.lhs == pytest.approx(0.125, abs=1e-15)
    assert r.rhs == pytest.approx(0.125, abs=1e-15)
    assert r.residual == pytest.approx(0.0, abs=1e-15)


def test_slice_t1_first_slice_zero():
    E, (p, q, x, y) = _e1(0.2, 0.4, -0.5, 0.9)
    cfg = QtConfig(1.0, Contraction(E.point(0), 0.5), Contraction(E.point(0), 0.5))
    first = check_slice_bounds(E, cfg, p, q, x, y, 2, 3)[0]
    assert first.lhs == 0.0 and first.rhs == 0.0


def test_slices_random(model_space):
    rng = np.random.default_rng(9)
    cfg = QtConfig(0.3, Contraction(model_space.sample(rng), 0.7),
                   Contraction(model_space.sample(rng), 0.5))
    for rec in batch_slices(model_space, cfg, 100, n=3, m=2, seed=4):
        assert rec.residual >= -model_space.default_tol


# -- z_t --------------------------------------------------------------------

def _affine_pair():
    E = Euclidean(1)
    return E, Contraction(E.point(4), 0.5), Contraction(E.point(0), 0.5)


@pytest.mark.parametrize("t,z", [(0.0, 0.0), (0.5, 2.0), (1.0, 4.0)])
def test_zt_closed_form(t, z):
    E, S, T = _affine_pair()
    res = compute_zt(E, QtConfig(t, S, T), E.point(0), E.point(0))
    assert res.point.value[0] == pytest.approx(z, abs=1e-9)
    assert res.endpoint_residual <= 1e-12


def test_zt_blend_invariants():
    E, S, T = _affine_pair()
    for t in np.arange(1, 10) / 10:
        res = compute_zt(E, QtConfig(float(t), S, T), E.point(1), E.point(-1))
        assert res.geodesic_residual <= 1e-9 and res.ratio_residual <= 1e-9


def test_zt_differs_from_fixed_point_of_blended_map():
    # u -> Q_t(p*, T u) = 2 + 0.25 u has fixed point 8/3, not z_t = 2
    E, S, T = _affine_pair()
    res = compute_zt(E, QtConfig(0.5, S, T), E.point(0), E.point(0))
    assert res.blend_fixed_point.value[0] == pytest.approx(8 / 3, abs=1e-9)
    assert res.blend_gap == pytest.approx(2 / 3, abs=1e-9)


def test_zt_on_tree_with_nonexpansive_S():
    Tr = star3()
    S = BallProjection(Tr.node("a"), 0.5)   # fixes a
    T = Contraction(Tr.node("b"), 0.5)
    res = compute_zt(Tr, QtConfig(0.25, S, T), Tr.node("a"), Tr.node("e"))
    assert res.geodesic_residual <= 1e-9 and res.ratio_residual <= 1e-9


def test_zt_requires_contractive_T():
    E, S, _ = _affine_pair()
    with pytest.raises(ValueError):
        compute_zt(E, QtConfig(0.5, S, Identity()), E.point(0), E.point(0))
