from fractions import Fraction as F

import pytest

from equicover.cover import (
    Cover,
    dimension,
    gcover_check,
    intersecting_not_contained,
    is_refinement,
    smallness_check,
)
from equicover.errors import InputError
from equicover.generators import rotation_group
from equicover.group import Action, PermGroup
from equicover.metric import ball, cycle_space
from equicover.poset import FinitePoset
from equicover.sets import whole


def double_p4():
    pts = [x + i for i in "12" for x in "abcd"]
    rel = [(x + i, y + i) for i in "12" for x in "ab" for y in "cd"]
    return FinitePoset.from_relations(pts, rel)


def test_two_components_form_a_gcover():
    P = double_p4()
    swap = Action(PermGroup(8, [[4, 5, 6, 7, 0, 1, 2, 3]]), P)
    comps = Cover(P, [P.open_region(["a1", "b1", "c1", "d1"]), P.open_region(["a2", "b2", "c2", "d2"])])
    rep = gcover_check(comps, swap)
    assert rep.is_equivariant and rep.is_gcover and rep.witnesses == []
    assert dimension(comps) == 0


def test_equivariant_but_overlapping_is_not_gcover():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 3), Z)  # rotation by 2
    balls = Cover(Z, [ball(Z, str(i), 2).sampled() for i in (0, 2, 4)])
    rep = gcover_check(balls, A)
    assert rep.is_equivariant and not rep.is_gcover
    assert rep.witnesses[0]["kind"] == "overlapping_translate"


def test_missing_translate_is_reported():
    Z = cycle_space(6)
    A = Action(rotation_group(6, 2), Z)
    one = Cover(Z, [ball(Z, "0", 1).sampled()])
    rep = gcover_check(one, A)
    assert not rep.is_equivariant
    assert {"kind": "not_equivariant", "g": 1, "U": "U0"} in rep.witnesses


def test_dimension_is_max_multiplicity_minus_one():
    Z = cycle_space(6)
    c = Cover(Z, [ball(Z, str(i), F(3, 2)).sampled() for i in range(6)])
    assert c.multiplicities() == [3] * 6
    assert dimension(c) == 2


def test_refinement_witness_is_least_index():
    Z = cycle_space(6)
    big = Cover(Z, [whole(Z), whole(Z)])
    small = Cover(Z, [ball(Z, "0", 1).sampled()])
    ok, wit = is_refinement(small, big)
    assert ok and wit == [0]
    ok, wit = is_refinement(big, small)
    assert not ok and wit == [None, None]


def test_labels_must_be_unique():
    Z = cycle_space(3)
    with pytest.raises(InputError):
        Cover(Z, [whole(Z), whole(Z)], ["A", "A"])


def test_smallness():
    Z = cycle_space(12)
    u = Cover(Z, [(ball(Z, "0", 2) | ball(Z, "6", 2)).sampled()])
    w = Cover(Z, [ball(Z, "3", 1).sampled(), ball(Z, "0", 1).sampled()])
    assert intersecting_not_contained(w.elements[0], u) == []  # {3} is outside cl U
    # {2} misses int U but lies on its boundary, which counts as meeting
    assert intersecting_not_contained(ball(Z, "2", 1).sampled(), u) == [0]
    rep = smallness_check(w, 3, u, 0)
    assert rep.passed and rep.max_diameter == 2
    w2 = Cover(Z, [ball(Z, "2", F(3, 2)).sampled()])  # {1, 2, 3} meets U, not inside
    rep = smallness_check(w2, 2, u, 0)
    assert not rep.passed and rep.count_violators and rep.diameter_violators
    with pytest.raises(InputError):
        smallness_check(w, 0, u, 0)


def test_p4_overlapping_pair_is_equivariant_not_gcover():
    P = FinitePoset.from_relations("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    swap = Action(PermGroup(4, [[1, 0, 3, 2]]), P)
    pair = Cover(P, [P.open_region(["a", "c", "d"]), P.open_region(["b", "c", "d"])])
    rep = gcover_check(pair, swap)
    assert rep.is_equivariant and not rep.is_gcover
    assert gcover_check(Cover(P, [whole(P)]), swap).is_gcover


def test_smallness_unit_balls_z6():
    Z = cycle_space(6)
    unit = Cover(Z, [ball(Z, str(i), 1).sampled() for i in range(6)])
    u = Cover(Z, [whole(Z)])
    assert smallness_check(unit, F(5, 2), u, 0).passed
    rep = smallness_check(unit, 2, u, 0)
    assert not rep.passed and len(rep.diameter_violators) == 6
    two = Cover(Z, [ball(Z, "0", 1).sampled(), ball(Z, "3", 1).sampled()])
    assert smallness_check(unit, 3, two, len(two)).passed
