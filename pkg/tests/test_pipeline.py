import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from equicover.cover import Cover, dimension
from equicover.errors import CapError, InputError, PreconditionError, ResolutionError
from equicover.generators import cycle_group, rotation_group
from equicover.group import Action, PermGroup
from equicover.metric import ball, cycle_space, diameter, dist_to_complement
from equicover.pipeline import (
    boundary_counts,
    cover_of_z,
    hypothesis_check,
    proposition_32_partial,
    proposition_33,
    shrink,
    shrink_element,
)
from equicover.sets import SampledSet, whole
from equicover.suites import random_p33_instance


def z6_two_balls():
    Z = cycle_space(6)
    return Z, Cover(Z, [ball(Z, "0", 1).sampled(), ball(Z, "2", 1).sampled()])


def test_hypothesis_check_witness():
    Z, u = z6_two_balls()
    ok, witness = hypothesis_check(u, 1)
    assert not ok and witness == ["U0", "U1"]
    assert hypothesis_check(u, 2) == (True, None)  # k >= |𝒰|


def test_hypothesis_check_disjoint_boundaries():
    Z = cycle_space(12)
    u = Cover(Z, [ball(Z, "0", 1).sampled(), ball(Z, "6", 1).sampled()])
    assert hypothesis_check(u, 1) == (True, None)
    with pytest.raises(InputError):
        hypothesis_check(u, -1)


def test_cover_of_z_z6_whole():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 2), Z)
    res = cover_of_z(Z, A, Cover(Z, [whole(Z)]), 0, F(5, 2))
    assert res.checks["covers"] and res.checks["equivariant"]
    assert all(diameter(Z, w) <= 2 for w in res.cover.elements)
    assert res.checks["partial_meets_le_k"]


def test_cover_of_z_counts_match_boundary_counts():
    Z = cycle_space(12)
    A = Action(rotation_group(12, 2), Z)
    u = Cover(Z, [(ball(Z, "0", 2) | ball(Z, "6", 2)).sampled(), (ball(Z, "3", 2) | ball(Z, "9", 2)).sampled()])
    res = cover_of_z(Z, A, u, 2, F(5, 2))
    bc = boundary_counts(u)
    # every point lies in some closure, and the A_z count equals the boundary count
    assert res.a_counts == bc
    assert bc[2] == 1 and bc[3] == 0


def test_cover_of_z_trivial_group():
    Z = cycle_space(8)
    A = Action(PermGroup.trivial(8), Z)
    u = Cover(Z, [ball(Z, "0", 2).sampled()])
    res = cover_of_z(Z, A, u, 1, 3)
    assert res.checks["diameter_lt_delta"] and res.checks["dim_le_n"]


def test_cover_of_z_errors():
    Z, u = z6_two_balls()
    A = Action(PermGroup.trivial(6), Z)
    with pytest.raises(PreconditionError):
        cover_of_z(Z, A, u, 1, 3)  # boundaries share the point 1
    with pytest.raises(InputError):
        cover_of_z(Z, A, u, 2, 0)
    coarse = cycle_space(6, rho=2)
    with pytest.raises(ResolutionError):
        cover_of_z(coarse, Action(PermGroup.trivial(6), coarse), Cover(coarse, [whole(coarse)]), 0, 3)
    # not F-equivariant
    B = Action(rotation_group(6, 2), Z)
    with pytest.raises(PreconditionError):
        cover_of_z(Z, B, Cover(Z, [ball(Z, "0", 1).sampled()]), 3, 3)


def test_shrink_whole_space_unchanged():
    Z = cycle_space(6)
    c = Cover(Z, [whole(Z)])
    out, params, keep = shrink(c, 12)
    assert params.m == 1 and out.elements[0] == whole(Z) and keep == [0]


def test_shrink_drops_single_point_element():
    Z = cycle_space(6)
    c = Cover(Z, [whole(Z), SampledSet(Z, 1, 1)])
    out, params, keep = shrink(c, 12)
    assert params.m == 1 and keep == [0]


def test_shrink_triple_balls():
    Z = cycle_space(6)
    c = Cover(Z, [ball(Z, str(i), 2).sampled() for i in (0, 2, 4)])
    out, params, _ = shrink(c, 12)
    assert out.is_cover
    for v, src in zip(out.elements, c.elements):
        assert v.closure & ~src.interior == 0


def test_shrink_reports_deficit():
    Z = cycle_space(6)
    c = Cover(Z, [ball(Z, str(i), 1).sampled() for i in range(6)])
    with pytest.raises(CapError) as exc:
        shrink(c, 1)
    assert exc.value.witness == ["0", "1", "2", "3", "4", "5"]


@given(st.integers(0, 12), st.integers(1, 12))
def test_shrink_element_level_sets(center, m):
    Z = cycle_space(13)
    v = ball(Z, str(center), 4).sampled()
    s = shrink_element(v, F(1, m))
    for z in range(Z.n):
        d = dist_to_complement(Z, v, Z.points[z])
        assert bool(s.interior >> z & 1) == (d > F(1, m))
        assert bool(s.closure >> z & 1) == (d >= F(1, m))


def _all_pass(res):
    return all(p["passed"] for p in res.certificate.values())


def test_p33_z6_c3():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 3), Z)
    res = proposition_33(Z, A, Cover(Z, [whole(Z)]), 0, 1, F(5, 2))
    assert _all_pass(res)
    assert len(res.grades) == 2


def test_p33_z12_c2_two_ball_unions():
    Z = cycle_space(12)
    A = Action(rotation_group(12, 2), Z)
    u = Cover(Z, [(ball(Z, "0", 2) | ball(Z, "6", 2)).sampled(), (ball(Z, "3", 2) | ball(Z, "9", 2)).sampled()])
    res = proposition_33(Z, A, u, 2, 1, F(5, 2))
    assert _all_pass(res)
    # provenance: every element names the simplex it was pulled back from
    for j, prov in enumerate(res.provenance):
        assert all(len(p["sigma"]) == j + 1 for p in prov)


def test_p33_hypothesis_failure_is_tagged():
    Z, u = z6_two_balls()
    A = Action(PermGroup.trivial(6), Z)
    with pytest.raises(PreconditionError) as exc:
        proposition_33(Z, A, u, 1, 1, 3)
    assert exc.value.stage == "hypothesis" and exc.value.witness == ["U0", "U1"]


def test_p33_trivial_group():
    Z = cycle_space(8)
    u = Cover(Z, [ball(Z, "0", 2).sampled(), ball(Z, "4", 2).sampled()])
    # both boundaries are {2, 6}, so the hypothesis needs k = 2
    res = proposition_33(Z, Action(PermGroup.trivial(8), Z), u, 2, 1, 3)
    assert _all_pass(res)


@settings(max_examples=25)
@given(st.integers(0, 10**9))
def test_p33_random_admissible(seed):
    Z, A, u, k, delta, _ = random_p33_instance(random.Random(seed))
    res = proposition_33(Z, A, u, k, 1, delta)
    assert _all_pass(res)
    for row in res.certificate["iv_self_intersections"]["per_grade"]:
        assert row["max_count"] <= 2 ** (row["grade"] + 1) - 1


def test_p32_z6_fixture():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 2), Z)
    alpha = [ball(Z, "0", F(3, 2)).sampled()]
    res = proposition_32_partial(Z, A, Cover(Z, [whole(Z)]), alpha, 1)
    assert res.delta >= 1
    assert res.report["conclusion_1"]["passed"] and res.report["dim_v_f_le_n"]
    assert res.report["conclusion_2_empirical"]["claimed"] is False


def test_p32_empty_alpha():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 2), Z)
    res = proposition_32_partial(Z, A, Cover(Z, [whole(Z)]), [SampledSet(Z, 0, 0)], 1)
    assert res.beta[0].is_empty and res.report["conclusion_1"]["passed"]


def test_p32_delta_is_below_separation():
    Z = cycle_space(12, rho=F(1, 2))  # delta/3 must stay above rho
    A = Action(rotation_group(12, 2), Z)
    u = Cover(Z, [(ball(Z, "0", 3) | ball(Z, "6", 3)).sampled()])
    alpha = [(ball(Z, "0", 1) | ball(Z, "6", 1)).sampled()]
    # int U misses only 3 and 9; cl α = {11,0,1,5,6,7} is at distance 2 from them
    res = proposition_32_partial(Z, A, u, alpha, 1, m_cap=64)
    assert res.delta == F(127, 64) and res.report["delta_separates"]


def test_p32_preconditions():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 2), Z)
    u = Cover(Z, [ball(Z, "0", 1).sampled(), ball(Z, "3", 1).sampled()])
    with pytest.raises(PreconditionError):
        proposition_32_partial(Z, A, u, [ball(Z, "0", 1).sampled(), SampledSet(Z, 0, 0)], 1)
    with pytest.raises(InputError):
        proposition_32_partial(Z, A, u, [SampledSet(Z, 0, 0)], 1)


@pytest.mark.parametrize("name", ["C2", "C4", "D2", "C6", "D3", "C12", "D6", "D12"])
def test_p32_dimension_does_not_grow_with_group(name):
    Z = cycle_space(12)
    A = Action(cycle_group(12, name), Z)
    res = proposition_32_partial(Z, A, Cover(Z, [whole(Z)]), [ball(Z, "0", F(3, 2)).sampled()], 1)
    assert res.report["dim_v_f"] <= 1
