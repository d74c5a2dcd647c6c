"""Subsets of finite spaces carrying an interior and a closure membership table.

Every cover element in the package is a :class:`SampledSet`. For a poset the
two tables are the exact topological interior and closure; for a finite metric
space they come from strict / non-strict inequalities (the sampled topology).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ._bits import bits, is_subset, mask_of
from .errors import InputError


class Space:
    """Shared point bookkeeping for posets and metric spaces."""

    points: tuple[str, ...]

    def _init_points(self, points: Iterable) -> None:
        pts = tuple(str(p) for p in points)
        if len(set(pts)) != len(pts):
            raise InputError("point ids must be unique")
        self.points = pts
        self._index = {p: i for i, p in enumerate(pts)}

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, point) -> int:
        if isinstance(point, int) and not isinstance(point, bool) and str(point) not in self._index:
            if 0 <= point < len(self.points):
                return point
        try:
            return self._index[str(point)]
        except KeyError:
            raise InputError(f"unknown point id {point!r}") from None

    def mask(self, points: Iterable) -> int:
        return mask_of(self.index(p) for p in points)

    def ids(self, mask: int) -> tuple[str, ...]:
        return tuple(self.points[i] for i in bits(mask))

    def _open_closure(self, interior: int) -> int | None:
        """Exact closure of an open set given by ``interior``, if the space knows it."""
        return None


@dataclass(frozen=True)
class SampledSet:
    space: Space
    interior: int
    closure: int

    def __post_init__(self):
        if not is_subset(self.interior, self.closure):
            raise InputError("interior must be contained in closure")

    # extensional identity: same space object, same tables
    def __eq__(self, other):
        if not isinstance(other, SampledSet):
            return NotImplemented
        return self.space is other.space and self.key == other.key

    def __hash__(self):
        return hash((id(self.space), self.interior, self.closure))

    @property
    def key(self) -> tuple[int, int]:
        return (self.interior, self.closure)

    @property
    def boundary(self) -> int:
        return self.closure & ~self.interior

    @property
    def is_empty(self) -> bool:
        return self.interior == 0

    def interior_members(self) -> tuple[str, ...]:
        return self.space.ids(self.interior)

    def closure_members(self) -> tuple[str, ...]:
        return self.space.ids(self.closure)

    def boundary_members(self) -> tuple[str, ...]:
        return self.space.ids(self.boundary)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def __invert__(self):
        return complement(self)

    def __sub__(self, other):
        return diff(self, other)

    def __repr__(self):
        return f"SampledSet(int={list(self.interior_members())}, cl={list(self.closure_members())})"


def _check(a: SampledSet, b: SampledSet) -> None:
    if a.space is not b.space:
        raise InputError("sets live in different spaces")


def _is_open_repr(s: SampledSet) -> bool:
    exact = s.space._open_closure(s.interior)
    return exact is not None and exact == s.closure


def _refresh(space: Space, interior: int, closure: int, *operands: SampledSet) -> SampledSet:
    # on posets an intersection/union of opens is open and its closure is computable
    if all(_is_open_repr(o) for o in operands):
        closure = space._open_closure(interior)
    return SampledSet(space, interior, closure)


def intersect(a: SampledSet, b: SampledSet) -> SampledSet:
    """Interior is exact; closure is stored as cl A ∩ cl B (a superset of cl(A ∩ B))."""
    _check(a, b)
    return _refresh(a.space, a.interior & b.interior, a.closure & b.closure, a, b)


def union(a: SampledSet, b: SampledSet) -> SampledSet:
    """Closure is exact; interior is stored as int A ∪ int B (a subset of int(A ∪ B))."""
    _check(a, b)
    return _refresh(a.space, a.interior | b.interior, a.closure | b.closure, a, b)


def complement(a: SampledSet) -> SampledSet:
    full = a.space.full_mask
    return SampledSet(a.space, full & ~a.closure, full & ~a.interior)


def diff(a: SampledSet, b: SampledSet) -> SampledSet:
    _check(a, b)
    return intersect(a, complement(b))


def whole(space: Space) -> SampledSet:
    return SampledSet(space, space.full_mask, space.full_mask)


def empty(space: Space) -> SampledSet:
    return SampledSet(space, 0, 0)


def translate(perm: tuple[int, ...], s: SampledSet) -> SampledSet:
    from ._bits import permute_mask

    return SampledSet(s.space, permute_mask(perm, s.interior), permute_mask(perm, s.closure))
