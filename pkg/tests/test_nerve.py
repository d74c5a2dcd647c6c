import random
from fractions import Fraction as F
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from equicover.caps import Caps
from equicover.cover import Cover
from equicover.errors import CapError
from equicover.generators import random_ball_cover, random_complex, random_metric_gcover, rotation_group
from equicover.group import Action
from equicover.metric import ball, cycle_space
from equicover.nerve import (
    SimplicialComplex,
    barycentric_subdivision,
    canonical_cover,
    canonical_cover_check,
    carrier_chain,
    in_closed_star,
    in_open_star,
    is_coface_closed,
    nerve,
    nerve_map,
    pull_back_canonical,
    simplex,
    to_dot,
)
from equicover.sets import translate


def stirling2(n, k):
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table[n][k]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_subdivision_f_vector_of_simplex(n):
    # f_j(bΔⁿ) = (j+1)! S(n+2, j+2): ordered set partitions count the chains
    sub = barycentric_subdivision(simplex(range(n + 1)))
    expected = [factorial(j + 1) * stirling2(n + 2, j + 2) for j in range(n + 1)]
    assert sub.complex.f_vector() == expected


def test_complex_closure_and_order():
    K = SimplicialComplex([["a", "b", "c"], ["c", "d"]])
    assert K.f_vector() == [4, 4, 1]
    assert K.vertices == ("a", "b", "c", "d")
    assert frozenset("ab") in K and frozenset("ad") not in K


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_cover_of_simplices(n):
    rep = canonical_cover_check(simplex(range(n + 1)))
    assert rep["passed"] and rep["counts_exact"]
    for row in rep["counts"]:
        j = len(row["sigma"]) - 1
        assert row["count"] == 2 ** (j + 1) - 1


def test_stars_are_open_and_same_grade_disjoint():
    cc = canonical_cover(simplex("abc"))
    sub = cc.subdivision
    for grade in cc.grades:
        for s, st_ in grade:
            assert is_coface_closed(sub, st_.chains)
            for t, other in grade:
                if s != t:
                    assert not (st_ & other)


def _count_oracle(K, sigma):
    """Stars of dim <= dim σ meeting st(σ̂): exactly the faces of σ (chains need comparability)."""
    j = len(sigma) - 1
    return sum(1 for t in K.simplices if len(t) - 1 <= j and (t <= sigma or sigma <= t))


@settings(max_examples=100)
@given(st.integers(0, 10**9))
def test_random_complexes(seed):
    K = random_complex(random.Random(seed))
    rep = canonical_cover_check(K)
    assert rep["passed"] and rep["counts_exact"]
    for row in rep["counts"]:
        assert row["count"] == _count_oracle(K, frozenset(row["sigma"]))


def test_caps_on_complexes():
    with pytest.raises(CapError):
        canonical_cover_check(simplex(range(6)), Caps(complex_dim=4))


def triple_balls():
    Z = cycle_space(6)
    return Z, Cover(Z, [ball(Z, str(i), 2).sampled() for i in (0, 2, 4)], ["T0", "T2", "T4"])


def test_nerve_of_triple_balls_is_hollow_triangle():
    _, c = triple_balls()
    N = nerve(c)
    assert N.f_vector() == [3, 3]


def test_nerve_map_values():
    Z, c = triple_balls()
    assert nerve_map(c, "0").coords == (1, 0, 0)
    assert nerve_map(c, "1").coords == (F(1, 2), F(1, 2), 0)
    p = nerve_map(c, "1")
    assert carrier_chain(p) == (frozenset({0, 1}),)
    assert in_open_star(p, frozenset({0, 1})) and not in_open_star(p, frozenset({0}))
    assert in_closed_star(p, frozenset({0})) and in_closed_star(p, frozenset({1}))


@settings(max_examples=50)
@given(st.integers(0, 10**9))
def test_nerve_map_properties(seed):
    rng = random.Random(seed)
    Z = cycle_space(rng.choice([6, 12]))
    c = random_ball_cover(rng, Z)
    for z in range(Z.n):
        p = nerve_map(c, Z.points[z])
        assert sum(p.coords) == 1
        assert p.support == frozenset(i for i, w in enumerate(c.elements) if w.interior >> z & 1)
        chain = carrier_chain(p)
        assert all(a < b for a, b in zip(chain, chain[1:]))
        assert chain[-1] == p.support


@settings(max_examples=50)
@given(st.integers(0, 10**9))
def test_pull_back_on_random_covers(seed):
    rng = random.Random(seed)
    Z = cycle_space(rng.choice([6, 12]))
    c = random_ball_cover(rng, Z, count=rng.randint(2, 5))
    pb = pull_back_canonical(c)
    assert all(v for k, v in pb.checks.items() if k != "refinement_witness")
    assert all(w is not None for w in pb.checks["refinement_witness"])
    for j, grade in enumerate(pb.grades):
        for sigma, v in grade:
            assert len(sigma) == j + 1
            # witness vertex lies in the defining simplex and its element contains V
            assert all(v.interior & ~c.elements[i].interior == 0 for i in sigma)


@settings(max_examples=30)
@given(st.integers(0, 10**9))
def test_pull_back_of_equivariant_cover_is_equivariant(seed):
    rng = random.Random(seed)
    Z = cycle_space(12)
    A = Action(rotation_group(12, rng.choice([2, 3, 4])), Z)
    c = random_metric_gcover(rng, A)
    pb = pull_back_canonical(c)
    for grade in pb.grades:
        keys = {v.key for _, v in grade}
        for g in A.group.elements:
            assert {translate(g, v).key for _, v in grade} == keys


def test_dot_export():
    dot = to_dot(barycentric_subdivision(simplex("ab")).complex, "bK")
    assert dot.startswith("graph bK {") and dot.count("--") == 2
