"""Certification layer: floor value, residuals, campaigns, tightness probes."""

import dataclasses
import random

import pytest

import proxiter as px
from conftest import make_permissive_system

E1_Q0 = px.Quadruple((3.0,), (-2.0,), (3.0,), (-2.0,))


def banach(map_fn, lipschitz, name="b"):
    region = px.interval(-1e9, 1e9, sample_lo=-100.0, sample_hi=100.0, name="R")
    return px.banach_system(map_fn, px.real_line(), region, lipschitz, name=name)


def test_s_value_example1():
    assert px.s_value(px.example1_system()) == 1.0


def test_s_value_banach_degenerate():
    assert px.s_value(banach(lambda x: (x[0] / 2.0,), 0.5)) == 0.0


def test_s_value_cyclic_reduction_matches_grid_oracle():
    # oracle: pairwise set distances from dense cross-samples over the segments
    ct = px.affine_cyclic_example()
    d = ct.space.metric
    samples = [px.sample_region(r, 300, seed=9) for r in ct.regions]
    for i in range(3):
        j = (i + 1) % 3
        oracle = min(d(a, b) for a in samples[i] for b in samples[j])
        assert oracle >= ct.dists[i] - 1e-9
        assert oracle <= ct.dists[i] + 0.05  # dense enough to approach the gap

    reduction = px.cyclic3_reduce(ct)
    assert px.s_value(reduction) == pytest.approx(sum(ct.dists), abs=1e-12)


def test_contraction_residual_equality_point():
    system = px.example1_system()
    q = px.Quadruple((0.0,), (-1.0,), (0.0,), (-1.0,))
    # direct evaluation: left side is 1, right side is 5/8 * 1 + 3/8 * 1
    lhs = abs(px.example1_T(0.0) - px.example1_Tb(-1.0))
    assert lhs == 1.0
    assert px.contraction_residual(system, q) == 0.0


def test_contraction_residual_nonnegative_on_e1():
    system = px.example1_system()
    assert px.contraction_residual(system, E1_Q0) >= 0.0


def test_contraction_residual_banach_is_displacement_slack():
    system = banach(lambda x: (0.9 * x[0],), 0.9)
    rng = random.Random(1)
    for _ in range(100):
        x, y = (rng.uniform(-50, 50),), (rng.uniform(-50, 50),)
        q = px.Quadruple(x, y, px.Atom("unit"), px.Atom("unit"))
        assert px.contraction_residual(system, q) >= -1e-12


def test_contraction_residual_rejects_off_relation():
    system = px.example1_system()
    with pytest.raises(px.InvalidInputError):
        px.contraction_residual(system, px.Quadruple((3.0,), (-2.0,), (4.0,), (-2.0,)))


def test_verify_contraction_certifies_e1():
    report = px.verify_contraction(px.example1_system(), 10000, seed=1)
    assert report.certified
    assert report.min_residual >= -1e-10
    assert report.p_invariant and report.infima_finite
    assert report.to_dict()["verdict"] == "certified-on-samples"


def test_verify_contraction_refutes_lowered_lambda():
    lowered = dataclasses.replace(px.example1_system(), lam=0.5)
    report = px.verify_contraction(lowered, 10000, seed=1)
    assert report.verdict == "refuted"
    assert report.witness is not None
    assert report.min_residual < -1e-10
    # the witness misses the lowered inequality but satisfies the relation
    assert lowered.in_p(report.witness)
    assert "witness" in report.to_dict()


def test_verify_contraction_banach_at_lipschitz():
    report = px.verify_contraction(banach(lambda x: (0.9 * x[0],), 0.9), 2000, seed=3)
    assert report.certified


def test_estimate_min_lambda_e1_matches_tightness_oracle():
    system = px.example1_system()
    # grid oracle: ratio (lhs - s) / (rho + f_a + f_b - s) peaks at 5/8;
    # equality is attained at (0, -2) and approached below dyadic boundaries
    s = 1.0

    def ratio(x, y):
        q = px.Quadruple((x,), (y,), (x,), (y,))
        lhs = (
            abs(px.example1_T(x) - px.example1_Tb(y))
            + px.example1_fa(px.example1_T(x))
            + px.example1_fb(px.example1_Tb(y))
        )
        denom = abs(x - y) + px.example1_fa(x) + px.example1_fb(y) - s
        return (lhs - s) / denom if denom > 1e-12 else 0.0

    xs = [i * 0.37 for i in range(271)] + [2 ** e * (1 - 1e-9) for e in range(-4, 7)]
    ys = [-1.0 - i * 0.61 for i in range(163)] + [-2.0]
    grid_sup = max(ratio(x, y) for x in xs for y in ys)
    assert 0.6 < grid_sup <= 5.0 / 8.0 + 1e-12

    estimate = px.estimate_min_lambda(system, 10000, seed=2)
    assert 0.5 < estimate <= 5.0 / 8.0 + 1e-6


def test_estimate_min_lambda_banach_slope():
    estimate = px.estimate_min_lambda(banach(lambda x: (0.3 * x[0],), 0.3), 10000, seed=4)
    assert estimate == pytest.approx(0.3, abs=1e-9)


def test_estimate_min_lambda_below_declared_on_certified_systems():
    # tightness probe never exceeds the declared constant on certified systems
    reduction = px.cyclic3_reduce(px.affine_cyclic_example())
    assert px.estimate_min_lambda(reduction, 4000, seed=6) <= reduction.lam + 1e-6
    prod = px.example1_product_system()
    assert px.estimate_min_lambda(prod, 4000, seed=6) <= prod.lam + 1e-6


def test_estimate_min_lambda_constant_maps():
    system = banach(lambda x: (5.0,), 0.0)
    assert px.estimate_min_lambda(system, 1000, seed=3) == 0.0


def test_estimate_min_lambda_all_degenerate():
    # singleton regions: every sampled quadruple sits exactly on the floor
    region = px.singleton_region(2.0)
    system = px.banach_system(lambda x: x, px.real_line(), region, 0.0, name="point")
    with pytest.raises(px.EstimationFailureError):
        px.estimate_min_lambda(system, 100, seed=0)


def test_check_p_invariance_e1_depth_20():
    ok, failure = px.check_p_invariance(px.example1_system(), E1_Q0, 20)
    assert ok and failure is None


def test_check_p_invariance_cyclic_reduction_depth_10():
    system = px.cyclic3_reduce(px.affine_cyclic_example())
    q0 = system.p.draw(random.Random(0), 1)[0]
    ok, failure = px.check_p_invariance(system, q0, 10)
    assert ok and failure is None


def test_check_p_invariance_restricted_relation_fails():
    base = px.example1_system()
    q0 = E1_Q0

    def only_initial(x, y, u, v):
        return (x, y, u, v) == tuple(q0)

    restricted = dataclasses.replace(
        base, p=px.RelationP(only_initial, lambda rng, n: [q0] * n)
    )
    ok, failure = px.check_p_invariance(restricted, q0, 1)
    assert not ok
    assert failure is not None and max(failure) == 1


def test_p_invariance_monotone_in_depth():
    system = px.example1_system()
    rng = random.Random(11)
    for q in system.p.draw(rng, 5):
        deep_ok, _ = px.check_p_invariance(system, q, 12)
        assert deep_ok
        for d in (1, 3, 7):
            ok, _ = px.check_p_invariance(system, q, d)
            assert ok


def test_factor_infimum_estimation_flagged():
    system = make_permissive_system()
    stripped = dataclasses.replace(
        system, f_a=px.ExternalFactor(system.f_a.fn, None)
    )
    value, flag = px.factor_infimum(stripped.f_a, stripped.c_universe, 2000, seed=5)
    assert flag == "estimated"
    assert value >= 0.0  # upper estimate of the true infimum 0
    with pytest.raises(px.NotCertifiedError):
        px.factor_infimum(stripped.f_a, stripped.c_universe, 0, seed=5)


def test_penalties_respect_exact_infima():
    rng = random.Random(21)
    for system in (px.example1_system(), px.cyclic3_reduce(px.affine_cyclic_example())):
        for c in system.c_universe.draw(rng, 2000):
            assert system.f_a.fn(c) >= system.f_a.inf_value - 1e-12
            assert system.f_b.fn(c) >= system.f_b.inf_value - 1e-12


def test_lambda_outside_unit_interval_rejected():
    system = px.example1_system()
    with pytest.raises(px.InvalidInputError):
        dataclasses.replace(system, lam=1.0)
