"""Seeded random instances: invariant posets, cycle actions, G-covers, complexes."""

from __future__ import annotations

import random
from fractions import Fraction

from ._bits import bits
from .cover import Cover, gcover_check
from .errors import EquicoverError
from .group import Action, PermGroup
from .metric import FiniteMetricSpace, cycle_space
from .nerve import SimplicialComplex
from .poset import FinitePoset
from .sets import SampledSet, translate, whole


def rotation_group(n: int, order: int) -> PermGroup:
    """Cyclic group of the given order rotating Z_n (order must divide n)."""
    if order < 1 or n % order:
        raise ValueError(f"order {order} does not divide {n}")
    step = n // order
    return PermGroup(n, [[(i + step) % n for i in range(n)]])


def dihedral_group(n: int, rotations: int) -> PermGroup:
    """Rotations of order ``rotations`` together with the reflection i -> -i; order 2*rotations."""
    if rotations < 1 or n % rotations:
        raise ValueError(f"{rotations} does not divide {n}")
    step = n // rotations
    return PermGroup(n, [[(i + step) % n for i in range(n)], [(-i) % n for i in range(n)]])


def cycle_group(n: int, name: str) -> PermGroup:
    """C<k> or D<k> acting on Z_n by rotations (and a reflection)."""
    kind, k = name[0].upper(), int(name[1:])
    if kind == "C":
        return rotation_group(n, k)
    if kind == "D":
        return dihedral_group(n, k)
    raise ValueError(f"unknown group name {name!r}")


# -- posets -----------------------------------------------------------------


def _orbit_closed_relations(n: int, group: PermGroup, pairs) -> set:
    out = set()
    for a, b in pairs:
        for g in group.elements:
            out.add((g[a], g[b]))
    return out


def invariant_poset(rng: random.Random, group: PermGroup, density: float = 0.3,
                    tries: int = 50) -> FinitePoset:
    """A random poset on range(degree) on which every element of ``group`` is an automorphism."""
    n = group.degree
    points = [f"p{i}" for i in range(n)]
    for _ in range(tries):
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < density / 2]
        rel = _orbit_closed_relations(n, group, pairs)
        try:
            poset = FinitePoset.from_relations(points, [(points[a], points[b]) for a, b in rel])
        except EquicoverError:
            continue
        return poset
    return FinitePoset.from_relations(points, [])


def random_poset(rng: random.Random, n: int, density: float = 0.3) -> FinitePoset:
    points = [f"p{i}" for i in range(n)]
    order = list(range(n))
    rng.shuffle(order)
    pairs = [
        (points[order[i]], points[order[j]])
        for i in range(n) for j in range(i + 1, n) if rng.random() < density
    ]
    return FinitePoset.from_relations(points, pairs)


def poset_groups(n: int) -> dict[str, PermGroup]:
    """C2, C3, C2xC2, S3, S4 acting on n points by permuting the first block(s)."""
    def perm(cycles):
        p = list(range(n))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                p[x] = cyc[(i + 1) % len(cyc)]
        return p

    out = {}
    if n >= 2:
        out["C2"] = PermGroup(n, [perm([(0, 1)])])
    if n >= 3:
        out["C3"] = PermGroup(n, [perm([(0, 1, 2)])])
        out["S3"] = PermGroup(n, [perm([(0, 1, 2)]), perm([(0, 1)])])
    if n >= 4:
        out["C2xC2"] = PermGroup(n, [perm([(0, 1), (2, 3)]), perm([(0, 2), (1, 3)])])
        out["S4"] = PermGroup(n, [perm([(0, 1, 2, 3)]), perm([(0, 1)])])
    return out


# -- G-covers -----------------------------------------------------------------


def _orbit(action: Action, s: SampledSet) -> list[SampledSet]:
    seen = {}
    for g in action.group.elements:
        t = translate(g, s)
        seen.setdefault(t.key, t)
    return list(seen.values())


def _disjoint_or_equal(orbit: list[SampledSet]) -> bool:
    for i, a in enumerate(orbit):
        for b in orbit[i + 1:]:
            if a.interior & b.interior:
                return False
    return True


def _finish_gcover(action: Action, elems: dict, candidates_for) -> Cover:
    space = action.space
    covered = 0
    for s in elems.values():
        covered |= s.interior
    for x in range(space.n):
        if covered >> x & 1:
            continue
        for cand in candidates_for(x):
            orb = _orbit(action, cand)
            if _disjoint_or_equal(orb):
                break
        else:
            orb = [whole(space)]
        for t in orb:
            elems.setdefault(t.key, t)
            covered |= t.interior
    items = sorted(elems.values(), key=lambda s: s.key)
    cover = Cover(space, items)
    assert gcover_check(cover, action).is_gcover
    return cover


def random_poset_gcover(rng: random.Random, action: Action, attempts: int = 4) -> Cover:
    """Orbits of random open sets, kept when disjoint-or-equal; gaps filled by minimal opens."""
    space: FinitePoset = action.space
    elems: dict = {}
    for _ in range(attempts):
        seeds = [x for x in range(space.n) if rng.random() < 0.3] or [rng.randrange(space.n)]
        mask = 0
        for x in seeds:
            mask |= space.up[x]
        cand = space.open_region(mask)
        orb = _orbit(action, cand)
        if _disjoint_or_equal(orb):
            for t in orb:
                elems.setdefault(t.key, t)
    return _finish_gcover(action, elems, lambda x: [space.open_region(space.up[x])])


def _ball(space: FiniteMetricSpace, c: int, r: Fraction) -> SampledSet:
    return SampledSet(space, *space.ball_masks(c, r))


def random_metric_gcover(rng: random.Random, action: Action, attempts: int = 4) -> Cover:
    """Orbits of random balls, kept when disjoint-or-equal; gaps filled by smaller balls."""
    space: FiniteMetricSpace = action.space
    values = sorted({v for v in space.distance_values() if v >= space.rho} | {space.rho})
    elems: dict = {}
    for _ in range(attempts):
        cand = _ball(space, rng.randrange(space.n), rng.choice(values))
        orb = _orbit(action, cand)
        if _disjoint_or_equal(orb):
            for t in orb:
                elems.setdefault(t.key, t)
    return _finish_gcover(
        action, elems, lambda x: [_ball(space, x, r) for r in reversed(values)]
    )


def random_ball_cover(rng: random.Random, space: FiniteMetricSpace, count: int = 4) -> Cover:
    """Random balls (not equivariant), topped up with radius-rho balls until covering."""
    values = sorted({v for v in space.distance_values() if v >= space.rho} | {space.rho})
    elems: dict = {}
    for _ in range(count):
        b = _ball(space, rng.randrange(space.n), rng.choice(values))
        elems.setdefault(b.key, b)
    covered = 0
    for s in elems.values():
        covered |= s.interior
    for x in range(space.n):
        if not covered >> x & 1:
            b = _ball(space, x, space.rho)
            elems.setdefault(b.key, b)
            covered |= b.interior
    return Cover(space, sorted(elems.values(), key=lambda s: s.key))


def random_equivariant_collection(rng: random.Random, action: Action, count: int = 2) -> Cover:
    """Union of orbits of random balls: an F-equivariant collection (not necessarily a cover)."""
    space: FiniteMetricSpace = action.space
    values = sorted({v for v in space.distance_values() if v >= space.rho})
    elems: dict = {}
    for _ in range(count):
        b = _ball(space, rng.randrange(space.n), rng.choice(values))
        for t in _orbit(action, b):
            elems.setdefault(t.key, t)
    return Cover(space, sorted(elems.values(), key=lambda s: s.key))


def max_boundary_count(cover: Cover) -> int:
    counts = [0] * cover.space.n
    for e in cover.elements:
        for z in bits(e.boundary):
            counts[z] += 1
    return max(counts, default=0)


# -- complexes ----------------------------------------------------------------


def random_complex(rng: random.Random, max_vertices: int = 6, max_dim: int = 3,
                   count: int | None = None) -> SimplicialComplex:
    nv = rng.randint(1, max_vertices)
    verts = [f"v{i}" for i in range(nv)]
    count = rng.randint(1, 4) if count is None else count
    simplices = [[v] for v in verts]
    for _ in range(count):
        size = rng.randint(1, min(max_dim + 1, nv))
        simplices.append(rng.sample(verts, size))
    return SimplicialComplex(simplices)


def random_instance(rng: random.Random, kind: str, max_points: int = 12):
    """(space, action, G-cover) for the refinement suites; kind is 'poset' or 'metric'."""
    if kind == "poset":
        n = rng.randint(4, max_points)
        groups = poset_groups(n)
        name = rng.choice(sorted(groups))
        group = groups[name]
        space = invariant_poset(rng, group)
        action = Action(group, space)
        return space, action, random_poset_gcover(rng, action), name
    options = [(n, g) for n in (4, 6, 8, 12) if n <= max_points
               for g in ("C2", "C3", "D2", "D3") if n % int(g[1:]) == 0]
    n, name = rng.choice(options)
    space = cycle_space(n, rho=rng.choice([1, 2]) if n >= 8 else 1)
    group = cycle_group(n, name)
    action = Action(group, space)
    label = {"D2": "C2xC2", "D3": "S3"}.get(name, name)
    return space, action, random_metric_gcover(rng, action), label
