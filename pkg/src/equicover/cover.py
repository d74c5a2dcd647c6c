"""Covers as values: multiplicity, refinement, G-cover predicates, smallness."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._bits import bits, is_subset
from .errors import InputError
from .metric import FiniteMetricSpace, diameter
from .rational import format_rational
from .sets import SampledSet, Space, translate


class Cover:
    """An indexed family of sets of one space.

    Families whose interiors do not cover the space are allowed (``is_cover``
    is then False) because several constructions take a mere collection.
    """

    def __init__(self, space: Space, elements: Iterable[SampledSet], labels: Sequence[str] | None = None):
        self.space = space
        self.elements = tuple(elements)
        for e in self.elements:
            if e.space is not space:
                raise InputError("cover element belongs to a different space")
        if labels is None:
            labels = [f"U{i}" for i in range(len(self.elements))]
        self.labels = tuple(str(l) for l in labels)
        if len(self.labels) != len(self.elements):
            raise InputError("one label per element is required")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("cover labels must be unique")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def union_interior(self) -> int:
        out = 0
        for e in self.elements:
            out |= e.interior
        return out

    @property
    def is_cover(self) -> bool:
        return self.union_interior == self.space.full_mask

    def keys(self) -> set:
        return {e.key for e in self.elements}

    def multiplicities(self) -> list[int]:
        counts = [0] * self.space.n
        for e in self.elements:
            for i in bits(e.interior):
                counts[i] += 1
        return counts

    def deduplicated(self) -> "Cover":
        seen = {}
        for e, l in zip(self.elements, self.labels):
            seen.setdefault(e.key, (e, l))
        return Cover(self.space, [e for e, _ in seen.values()], [l for _, l in seen.values()])

    def translate(self, g) -> "Cover":
        return Cover(self.space, [translate(g, e) for e in self.elements], self.labels)

    def __repr__(self):
        return f"Cover({len(self.elements)} elements, is_cover={self.is_cover})"


def dimension(cover: Cover) -> int:
    """(largest number of elements whose interior contains one point) - 1."""
    if cover.space.n == 0:
        raise InputError("dimension of a cover of the empty space")
    return max(cover.multiplicities()) - 1


def is_refinement(fine: Cover, coarse: Cover) -> tuple[bool, list[int | None]]:
    """Each fine element must sit inside some coarse element (interiors).

    The witness list gives the least containing index per fine element, or None.
    """
    if fine.space is not coarse.space:
        raise InputError("covers of different spaces")
    witness: list[int | None] = []
    for f in fine.elements:
        hit = None
        for j, c in enumerate(coarse.elements):
            if is_subset(f.interior, c.interior):
                hit = j
                break
        witness.append(hit)
    return all(w is not None for w in witness), witness


@dataclass
class GCoverReport:
    is_equivariant: bool
    is_gcover: bool
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "is_equivariant": self.is_equivariant,
            "is_gcover": self.is_gcover,
            "witnesses": self.witnesses,
        }


def gcover_check(cover: Cover, action) -> GCoverReport:
    """Equivariance (g·U is an element, by set equality) and the disjoint-or-equal law."""
    if action.space is not cover.space:
        raise InputError("action and cover live on different spaces")
    keys = cover.keys()
    equivariant = True
    law = True
    witnesses = []
    for gi, g in enumerate(action.group.elements):
        for ui, u in enumerate(cover.elements):
            gu = translate(g, u)
            if gu.key not in keys:
                equivariant = False
                witnesses.append({"kind": "not_equivariant", "g": gi, "U": cover.labels[ui]})
            if gu.interior & u.interior and gu.key != u.key:
                law = False
                witnesses.append({"kind": "overlapping_translate", "g": gi, "U": cover.labels[ui]})
    return GCoverReport(equivariant, equivariant and law, witnesses)


def intersecting_not_contained(w: SampledSet, u_cover: Cover) -> list[int]:
    """Indices of U that meet W but do not contain it.

    "Meets" is judged against the closure of U, so a U whose boundary passes
    through W counts even when the sampled interiors miss each other; this is
    the conservative reading and makes the count at a boundary point z of U
    match the number of U with z in their boundary.
    """
    return [
        i
        for i, u in enumerate(u_cover.elements)
        if u.closure & w.interior and not is_subset(w.interior, u.interior)
    ]


@dataclass
class SmallnessReport:
    passed: bool
    delta: Fraction
    k: int
    max_diameter: Fraction
    max_count: int
    diameter_violators: list = field(default_factory=list)
    count_violators: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "delta": format_rational(self.delta),
            "k": self.k,
            "max_diameter": format_rational(self.max_diameter),
            "max_count": self.max_count,
            "diameter_violators": self.diameter_violators,
            "count_violators": self.count_violators,
        }


def smallness_check(cover: Cover, delta, u_cover: Cover, k: int) -> SmallnessReport:
    """Check diam(W) < delta and |{U : W ⊄ U, U ∩ W ≠ ∅}| <= k for every element W."""
    from .rational import parse_rational

    delta = parse_rational(delta)
    if delta <= 0:
        raise InputError("delta must be positive")
    space = cover.space
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("smallness_check needs a metric space")
    max_d = Fraction(0)
    max_c = 0
    dv, cv = [], []
    for label, w in zip(cover.labels, cover.elements):
        dw = diameter(space, w)
        max_d = max(max_d, dw)
        if not dw < delta:
            dv.append({"W": label, "diameter": format_rational(dw)})
        hits = intersecting_not_contained(w, u_cover)
        max_c = max(max_c, len(hits))
        if len(hits) > k:
            cv.append({"W": label, "U": [u_cover.labels[i] for i in hits]})
    return SmallnessReport(not dv and not cv, delta, k, max_d, max_c, dv, cv)
