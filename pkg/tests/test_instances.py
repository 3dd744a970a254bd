"""Built-in instances: dyadic parity map, degenerate systems, products, cyclic triples."""

import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import proxiter as px


def test_alpha_parity_small_cases():
    assert px.alpha_parity(3.0) == 1  # floor(log2 3) = 1
    assert px.alpha_parity(0.0) == 0
    assert px.alpha_parity(0.5) == 1  # floor(log2 0.5) = -1, Euclidean mod
    assert px.alpha_parity(1.0) == 0
    assert px.alpha_parity(4.0) == 0
    with pytest.raises(px.InvalidInputError):
        px.alpha_parity(-1.0)


def test_alpha_parity_doubling_flips():
    rng = random.Random(99)
    for _ in range(100000):
        x = math.exp(rng.uniform(-30.0, 30.0))
        assert px.alpha_parity(2.0 * x) == 1 - px.alpha_parity(x)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False))
def test_alpha_parity_doubling_flips_property(x):
    assert px.alpha_parity(2.0 * x) == 1 - px.alpha_parity(x)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=1e-300, max_value=1e300, allow_nan=False))
def test_dyadic_remainder_at_most_half(x):
    assert x - px.pow2_floor(x) <= 0.5 * x


def test_floor_log2_exactness_near_powers():
    for e in range(-40, 41):
        p = 2.0 ** e
        assert px.floor_log2(p) == e
        assert px.floor_log2(p * (1 + 1e-15)) == e
        assert px.floor_log2(p * (1 - 1e-16)) == e - 1


def test_example1_T_values():
    assert px.example1_T(0.0) == 0.0
    assert px.example1_T(3.0) == 6.0
    assert px.example1_T(6.0) == 0.5
    assert px.example1_T(0.5) == 1.0
    assert px.example1_T(1.0) == 0.0
    with pytest.raises(px.InvalidInputError):
        px.example1_T(-2.0)


def test_example1_T_nonnegative():
    rng = random.Random(3)
    for _ in range(5000):
        assert px.example1_T(rng.uniform(0, 1000)) >= 0.0


def test_example1_Tb_stays_in_region():
    rng = random.Random(4)
    for _ in range(5000):
        y = rng.uniform(-1000, -1)
        assert px.example1_Tb(y) <= -1.0


def test_example1_system_certifies_at_declared_constant():
    report = px.verify_contraction(px.example1_system(), 10000, seed=1)
    assert report.certified


def test_example1_system_refuted_at_half():
    import dataclasses

    lowered = dataclasses.replace(px.example1_system(), lam=0.5)
    report = px.verify_contraction(lowered, 10000, seed=1)
    assert report.verdict == "refuted" and report.witness is not None


def test_banach_half_converges_from_any_start():
    system = px.banach_half_system()
    for x0 in (-77.0, 0.0, 13.5):
        q0 = px.Quadruple((x0,), (1.0,), px.Atom("unit"), px.Atom("unit"))
        _, report = px.run_paired(system, q0, 400, 1e-10)
        assert abs(report.limit[0]) <= 1e-8
    assert px.verify_contraction(system, 3000, seed=2).certified


def test_banach_affine_fixed_point():
    system = px.banach_affine_system()
    q0 = px.Quadruple((8.0,), (0.0,), px.Atom("unit"), px.Atom("unit"))
    _, report = px.run_paired(system, q0, 400, 1e-10)
    assert report.limit[0] == pytest.approx(4.0, abs=1e-8)


def test_banach_identity_refused_at_construction():
    region = px.interval(-1e9, 1e9, sample_lo=-100.0, sample_hi=100.0, name="R")
    with pytest.raises(px.RefutedError):
        px.banach_system(lambda x: x, px.real_line(), region, 0.99)


def test_product_system_constants():
    prod = px.example1_product_system()
    assert prod.lam == 5.0 / 8.0
    assert prod.pair.dist_ab == 2.0
    assert px.s_value(prod) == 2.0


def test_product_system_certifies():
    assert px.verify_contraction(px.example1_product_system(), 10000, seed=7).certified


def test_product_system_componentwise_convergence():
    prod = px.example1_product_system()
    q0 = px.Quadruple(
        (3.0, 5.0),
        (-2.0, -3.0),
        px.CPair((3.0,), (5.0,)),
        px.CPair((-2.0,), (-3.0,)),
    )
    _, report = px.run_paired(prod, q0, 500, 1e-9)
    assert report.limit == (0.0, 0.0)
    assert report.proximity_residual <= 1e-6


def test_product_of_degenerate_systems_certifies():
    prod = px.product_system(px.banach_half_system(), px.banach_half_system())
    assert px.verify_contraction(prod, 2000, seed=8).certified


def test_product_rejects_non_pair_external_elements():
    prod = px.example1_product_system()
    with pytest.raises(px.InvalidInputError):
        prod.t_a((3.0, 5.0), (3.0, 5.0))


def test_singleton_triple_equality_case():
    ct = px.singleton_cyclic_example()
    worst, _ = px.certify_cyclic(ct, 100, seed=0)
    assert worst == 0.0  # constant distances make the inequality an equality
    assert ct.dists == (10.0, 10.0, 20.0)


def test_affine_triple_summed_contraction_sampled():
    ct = px.affine_cyclic_example()
    worst, _ = px.certify_cyclic(ct, 20000, seed=1)
    assert worst >= -1e-10


def test_affine_triple_pairwise_distances():
    ct = px.affine_cyclic_example()
    d = ct.space.metric
    samples = [px.sample_region(r, 400, seed=11) for r in ct.regions]
    for i in range(3):
        j = (i + 1) % 3
        cross_min = min(d(a, b) for a in samples[i] for b in samples[j])
        assert cross_min >= ct.dists[i] - 1e-9


def test_cyclic_reduction_certifies():
    system = px.cyclic3_reduce(px.affine_cyclic_example())
    report = px.verify_contraction(system, 4000, seed=5)
    assert report.certified
    assert system.lam == 0.5 ** 3


def test_cyclic_reduction_refuses_broken_triple():
    # shrink the declared constant below the true one: the gate must trip
    ct = px.affine_cyclic_example()
    broken = px.CyclicTriple(ct.space, ct.regions, ct.t, 0.05, ct.dists)
    with pytest.raises(px.RefutedError):
        px.cyclic3_reduce(broken, samples=4000, seed=2)


def test_cyclic3_solve_singleton_exact():
    result = px.cyclic3_solve(px.singleton_cyclic_example(), max_steps=100, tol=1e-9)
    assert result.z == ((10.0,), (20.0,), (30.0,))
    assert result.gap_residuals == (0.0, 0.0, 0.0)
    assert result.cycle_residuals == (0.0, 0.0, 0.0)


def test_cyclic3_solve_affine_matches_closed_form():
    # closed form: the cubed map contracts each segment parameter by 1/8
    # toward zero, so the limits are the three inner endpoints
    ct = px.affine_cyclic_example()
    r = 1.0 / math.sqrt(3.0)
    vertices = [
        (r * math.cos(math.pi / 2 + j * 2 * math.pi / 3),
         r * math.sin(math.pi / 2 + j * 2 * math.pi / 3))
        for j in range(3)
    ]
    result = px.cyclic3_solve(ct, max_steps=400, tol=1e-9)
    assert result is not None
    for z, v in zip(result.z, vertices):
        assert ct.space.metric(z, v) <= 1e-8
    assert max(result.gap_residuals) <= 1e-8
    assert max(result.cycle_residuals) <= 1e-8


def test_cyclic3_solve_start_independent():
    ct = px.affine_cyclic_example()
    r1 = px.cyclic3_solve(ct, max_steps=400, tol=1e-9, seed=0)
    starts = [px.sample_region(reg, 1, seed=77)[0] for reg in ct.regions]
    r2 = px.cyclic3_solve(ct, starts=starts, max_steps=400, tol=1e-9, seed=1)
    for a, b in zip(r1.z, r2.z):
        assert ct.space.metric(a, b) <= 1e-8


def test_cyclic3_solve_undecided_on_tiny_budget():
    ct = px.affine_cyclic_example()
    assert px.cyclic3_solve(ct, max_steps=3, tol=1e-12) is None


def test_rotate_cyclic_relabels_distances():
    ct = px.affine_cyclic_example()
    rot = px.rotate_cyclic(ct, 1)
    assert rot.regions[0] is ct.regions[1]
    assert rot.dists == (ct.dists[1], ct.dists[2], ct.dists[0])


def test_registry_names():
    names = {row[0] for row in px.list_instances()}
    assert {
        "e1",
        "banach-half",
        "banach-affine",
        "e1-product",
        "cyclic3-singleton",
        "cyclic3-affine",
        "e1-pair",
        "open-interval-pair",
        "circle-origin-pair",
    } <= names
    assert px.ALIASES["banach"] == "banach-half"


def test_load_instance_json(tmp_path):
    spec = {
        "name": "half-move",
        "space": {"kind": "real"},
        "regions": {
            "a": {"lo": -1e9, "hi": 1e9, "sample_lo": -50, "sample_hi": 50},
        },
        "maps": {
            "t_a": {"name": "affine", "slope": 0.5, "offset": 2.0},
            "t_b": {"name": "affine", "slope": 0.5, "offset": 2.0},
        },
        "lambda": 0.5,
        "dist": 0.0,
        "infima": {"a": 0.0, "b": 0.0},
        "x0": 10.0,
        "y0": 0.0,
    }
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(spec))
    entry = px.load_instance_json(str(path))
    system = entry.build()
    assert px.verify_contraction(system, 2000, seed=0).certified
    q0 = entry.quadruple(system, entry.default_x0, entry.default_y0)
    _, report = px.run_paired(system, q0, 300, 1e-10)
    assert report.limit[0] == pytest.approx(4.0, abs=1e-8)  # x = x/2 + 2
