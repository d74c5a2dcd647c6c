"""Finite T0 Alexandrov spaces presented as partial orders.

Opens are the up-sets of the order, so the smallest open set containing ``x``
is the principal up-set of ``x`` and closures are down-sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from ._bits import bits, is_subset, mask_of
from .caps import Caps
from .errors import CapError, InputError
from .sets import SampledSet, Space

DEFAULT_SIZE_CAP = 14


class FinitePoset(Space):
    """A finite partial order. ``leq[i][j]`` is true iff ``points[i] <= points[j]``."""

    def __init__(self, points: Iterable, leq):
        self._init_points(points)
        n = len(self.points)
        rows = tuple(tuple(bool(v) for v in row) for row in leq)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InputError("leq must be an n x n boolean matrix")
        for i in range(n):
            if not rows[i][i]:
                raise InputError(f"leq is not reflexive at {self.points[i]!r}")
            for j in range(n):
                if i != j and rows[i][j] and rows[j][i]:
                    raise InputError(
                        f"leq is not antisymmetric: {self.points[i]!r}, {self.points[j]!r}"
                    )
                if rows[i][j]:
                    for k in range(n):
                        if rows[j][k] and not rows[i][k]:
                            raise InputError(
                                "leq is not transitive: "
                                f"{self.points[i]!r} <= {self.points[j]!r} <= {self.points[k]!r}"
                            )
        self.leq = rows
        self.up = tuple(mask_of(j for j in range(n) if rows[i][j]) for i in range(n))
        self.down = tuple(mask_of(j for j in range(n) if rows[j][i]) for i in range(n))

    @classmethod
    def from_relations(cls, points: Iterable, pairs: Iterable) -> "FinitePoset":
        """Build from generating pairs ``(a, b)`` meaning a <= b; closes reflexively/transitively."""
        pts = [str(p) for p in points]
        idx = {p: i for i, p in enumerate(pts)}
        n = len(pts)
        rel = [[i == j for j in range(n)] for i in range(n)]
        for a, b in pairs:
            try:
                rel[idx[str(a)]][idx[str(b)]] = True
            except KeyError as exc:
                raise InputError(f"unknown point id in leq: {exc.args[0]!r}") from None
        for k in range(n):
            for i in range(n):
                if rel[i][k]:
                    for j in range(n):
                        if rel[k][j]:
                            rel[i][j] = True
        for i in range(n):
            for j in range(i + 1, n):
                if rel[i][j] and rel[j][i]:
                    raise InputError(f"order relation has a cycle through {pts[i]!r} and {pts[j]!r}")
        return cls(pts, rel)

    def relations(self) -> list[tuple[str, str]]:
        """Strict covering-free listing of all pairs a < b."""
        return [
            (self.points[i], self.points[j])
            for i in range(self.n)
            for j in range(self.n)
            if i != j and self.leq[i][j]
        ]

    def point_set(self, points: Iterable) -> "PointSet":
        return PointSet(self, self.mask(points))

    def up_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.up[i]
        return out

    def down_closure(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.down[i]
        return out

    def is_open_mask(self, mask: int) -> bool:
        return self.up_closure(mask) == mask

    def interior_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            if is_subset(self.up[i], mask):
                out |= 1 << i
        return out

    def _open_closure(self, interior: int) -> int:
        return self.down_closure(interior)

    def open_region(self, points) -> SampledSet:
        """The cover-element form of an open set: exact interior and closure."""
        mask = points.mask if isinstance(points, PointSet) else (
            points if isinstance(points, int) else self.mask(points)
        )
        if not self.is_open_mask(mask):
            raise InputError(f"not an open (up-closed) set: {list(self.ids(mask))}")
        return SampledSet(self, mask, self.down_closure(mask))

    def minimal_points(self) -> int:
        return mask_of(i for i in range(self.n) if self.down[i] == 1 << i)

    def linear_extension(self) -> list[int]:
        return sorted(range(self.n), key=lambda i: (self.down[i].bit_count(), i))

    def __repr__(self):
        return f"FinitePoset({list(self.points)}, {self.relations()})"


@dataclass(frozen=True)
class PointSet:
    space: FinitePoset
    mask: int

    def __post_init__(self):
        if self.mask & ~self.space.full_mask:
            raise InputError("point set outside of the space")

    @property
    def members(self) -> tuple[str, ...]:
        return self.space.ids(self.mask)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return self.mask.bit_count()

    def __contains__(self, point) -> bool:
        return bool(self.mask >> self.space.index(point) & 1)

    def __le__(self, other: "PointSet") -> bool:
        return is_subset(self.mask, other.mask)

    def __eq__(self, other):
        if isinstance(other, PointSet):
            return self.space is other.space and self.mask == other.mask
        if isinstance(other, (set, frozenset)):
            return set(self.members) == {str(p) for p in other}
        return NotImplemented

    def __hash__(self):
        return hash((id(self.space), self.mask))

    def __repr__(self):
        return f"{type(self).__name__}({set(self.members) or '{}'})"


class OpenSet(PointSet):
    def __post_init__(self):
        super().__post_init__()
        if not self.space.is_open_mask(self.mask):
            raise InputError(f"not up-closed: {list(self.members)}")


def _as_mask(space: FinitePoset, s) -> int:
    if isinstance(s, PointSet):
        if s.space is not space:
            raise InputError("point set belongs to a different space")
        return s.mask
    return space.mask(s)


def minimal_open(space: FinitePoset, x) -> OpenSet:
    return OpenSet(space, space.up[space.index(x)])


def closure(space: FinitePoset, s) -> PointSet:
    return PointSet(space, space.down_closure(_as_mask(space, s)))


def interior(space: FinitePoset, s) -> OpenSet:
    return OpenSet(space, space.interior_mask(_as_mask(space, s)))


def boundary(space: FinitePoset, s) -> PointSet:
    m = _as_mask(space, s)
    return PointSet(space, space.down_closure(m) & ~space.interior_mask(m))


def complement(space: FinitePoset, s) -> PointSet:
    return PointSet(space, space.full_mask & ~_as_mask(space, s))


def iter_open_masks(space: FinitePoset) -> Iterator[int]:
    """All up-sets, in increasing order of the generated bitmask search."""
    order = space.linear_extension()[::-1]  # maximal points first

    def rec(pos: int, mask: int):
        if pos == len(order):
            yield mask
            return
        i = order[pos]
        yield from rec(pos + 1, mask)
        # i may join only if everything above it is already in
        if is_subset(space.up[i] & ~(1 << i), mask):
            yield from rec(pos + 1, mask | 1 << i)

    yield from rec(0, 0)


def opens(space: FinitePoset) -> list[OpenSet]:
    return [OpenSet(space, m) for m in sorted(iter_open_masks(space))]


def covering_dimension(space: FinitePoset, size_cap: int | None = None) -> int:
    """Covering dimension by exhaustive search.

    Every open cover is refined by the cover by minimal opens, so the dimension
    equals the least order of a refinement of that basis cover; the search runs
    over such refinements with branch-and-bound on multiplicity.
    """
    from ._search import min_multiplicity_family

    cap = Caps.from_env().poset_points if size_cap is None else size_cap
    if space.n > cap:
        raise CapError(f"instance too large: {space.n} points > cap {cap}")
    if space.n == 0:
        return -1
    # containers are the minimal opens U_y; the atom for q inside U_y is U_q (y <= q)
    atoms = [
        [(y, space.up[q], space.down_closure(space.up[q])) for y in bits(space.down[q])]
        for q in range(space.n)
    ]
    best_dim, _ = min_multiplicity_family(space.n, atoms)
    return best_dim
