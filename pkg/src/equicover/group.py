"""Finite permutation groups acting on posets and metric spaces, and their quotients."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from ._bits import bits, mask_of, permute_mask
from .caps import Caps
from .errors import CapError, InputError, InvalidActionError, QuotientNotT0Error
from .metric import FiniteMetricSpace
from .poset import FinitePoset, covering_dimension, iter_open_masks
from .sets import SampledSet, Space, translate

Perm = tuple[int, ...]


def compose(g: Perm, h: Perm) -> Perm:
    """(g h)(x) = g(h(x))."""
    return tuple(g[x] for x in h)


def inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, gi in enumerate(g):
        out[gi] = i
    return tuple(out)


class PermGroup:
    """Permutation group given by generators; all elements are listed by closure.

    ``elements[0]`` is the identity; the rest follow breadth-first order from the
    generators, so the listing is deterministic.
    """

    def __init__(self, degree: int, generators: Iterable[Iterable[int]], cap: int | None = None):
        self.degree = int(degree)
        gens = []
        for g in generators:
            g = tuple(int(x) for x in g)
            if sorted(g) != list(range(self.degree)):
                raise InputError(f"not a permutation of 0..{self.degree - 1}: {list(g)}")
            gens.append(g)
        self.generators = tuple(gens)
        cap = Caps.from_env().group_elements if cap is None else cap
        identity = tuple(range(self.degree))
        elements = [identity]
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for h in frontier:
                for g in self.generators:
                    gh = compose(g, h)
                    if gh not in seen:
                        seen.add(gh)
                        elements.append(gh)
                        nxt.append(gh)
                        if len(elements) > cap:
                            raise CapError(f"group has more than {cap} elements")
            frontier = nxt
        self.elements = tuple(elements)
        self._index = {g: i for i, g in enumerate(self.elements)}

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree, [])

    @property
    def identity(self) -> Perm:
        return self.elements[0]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def index(self, g: Perm) -> int:
        return self._index[tuple(g)]

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"


class Action:
    """A permutation group acting on a space; permutation entries index ``space.points``."""

    def __init__(self, group: PermGroup, space: Space):
        if group.degree != space.n:
            raise InputError(
                f"group degree {group.degree} does not match the {space.n} points of the space"
            )
        self.group = group
        self.space = space
        for g in group.elements:
            bad = _structure_violation(space, g)
            if bad is not None:
                kind = "isometry" if isinstance(space, FiniteMetricSpace) else "order-automorphism"
                raise InvalidActionError(
                    f"element {list(g)} is not an {kind}: violating pair "
                    f"({space.points[bad[0]]}, {space.points[bad[1]]})",
                    witness={"element": list(g), "pair": [space.points[bad[0]], space.points[bad[1]]]},
                )

    @property
    def elements(self) -> tuple[Perm, ...]:
        return self.group.elements

    @property
    def is_metric(self) -> bool:
        return isinstance(self.space, FiniteMetricSpace)

    def act(self, g: Perm, point):
        return self.space.points[g[self.space.index(point)]]

    def act_mask(self, g: Perm, mask: int) -> int:
        return permute_mask(g, mask)

    def act_set(self, g: Perm, s: SampledSet) -> SampledSet:
        return translate(g, s)

    def orbit_mask(self, i: int) -> int:
        return mask_of(g[i] for g in self.group.elements)

    def __repr__(self):
        return f"Action({self.group!r} on {self.space!r})"


def _structure_violation(space: Space, g: Perm):
    n = space.n
    if isinstance(space, FiniteMetricSpace):
        d = space.dist
        for i in range(n):
            for j in range(n):
                if d[g[i]][g[j]] != d[i][j]:
                    return (i, j)
        return None
    if isinstance(space, FinitePoset):
        leq = space.leq
        for i in range(n):
            for j in range(n):
                if leq[g[i]][g[j]] != leq[i][j]:
                    return (i, j)
        return None
    raise InputError(f"unsupported space type {type(space).__name__}")


def orbit_masks(action: Action) -> list[int]:
    """Orbits as bitmasks, ordered by least member."""
    out = []
    covered = 0
    for i in range(action.space.n):
        if covered >> i & 1:
            continue
        m = action.orbit_mask(i)
        covered |= m
        out.append(m)
    return out


def orbits(action: Action) -> list[tuple[str, ...]]:
    return [action.space.ids(m) for m in orbit_masks(action)]


@dataclass
class QuotientSpace:
    action: Action
    orbit_masks: list[int]
    space: Space
    projection: tuple[int, ...]

    @property
    def source(self) -> Space:
        return self.action.space

    def project_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.projection[i]
        return out

    def preimage_mask(self, mask: int) -> int:
        out = 0
        for o in bits(mask):
            out |= self.orbit_masks[o]
        return out

    def project(self, s: SampledSet) -> SampledSet:
        """Image of a set. Closures map to closures since the projection is closed."""
        return SampledSet(self.space, self.project_mask(s.interior), self.project_mask(s.closure))

    def preimage(self, v: SampledSet) -> SampledSet:
        return SampledSet(self.source, self.preimage_mask(v.interior), self.preimage_mask(v.closure))

    def fiber_sizes(self) -> list[int]:
        return [m.bit_count() for m in self.orbit_masks]


def _orbit_ids(source: Space, masks: list[int]) -> list[str]:
    return [f"[{source.points[(m & -m).bit_length() - 1]}]" for m in masks]


def quotient_metric(action: Action) -> QuotientSpace:
    """Orbit space with d([z],[z']) = min over representatives of d(gz, g'z')."""
    space = action.space
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("quotient_metric needs a metric space")
    masks = orbit_masks(action)
    dist = []
    for a in masks:
        row = []
        for b in masks:
            row.append(min(space.dist[x][y] for x in bits(a) for y in bits(b)))
        dist.append(row)
    # FiniteMetricSpace re-verifies every metric axiom
    qspace = FiniteMetricSpace(_orbit_ids(space, masks), dist, space.rho)
    return QuotientSpace(action, masks, qspace, _projection(space.n, masks))


def _projection(n: int, masks: list[int]) -> tuple[int, ...]:
    proj = [0] * n
    for o, m in enumerate(masks):
        for i in bits(m):
            proj[i] = o
    return tuple(proj)


def quotient_poset(action: Action) -> QuotientSpace:
    """Orbit space ordered by [x] <= [y] iff x <= g y for some g (transitively closed)."""
    space = action.space
    if not isinstance(space, FinitePoset):
        raise InputError("quotient_poset needs a poset")
    masks = orbit_masks(action)
    proj = _projection(space.n, masks)
    k = len(masks)
    rel = [[False] * k for _ in range(k)]
    for x in range(space.n):
        for y in bits(space.up[x]):
            rel[proj[x]][proj[y]] = True
    for m in range(k):
        for a in range(k):
            if rel[a][m]:
                for b in range(k):
                    if rel[m][b]:
                        rel[a][b] = True
    ids = _orbit_ids(space, masks)
    for a in range(k):
        for b in range(a + 1, k):
            if rel[a][b] and rel[b][a]:
                raise QuotientNotT0Error(
                    f"quotient not T0: orbits {ids[a]} and {ids[b]} are identified",
                    witness=[ids[a], ids[b]],
                )
    return QuotientSpace(action, masks, FinitePoset(ids, rel), proj)


def quotient(action: Action) -> QuotientSpace:
    if isinstance(action.space, FiniteMetricSpace):
        return quotient_metric(action)
    return quotient_poset(action)


@dataclass
class ProjectionCertificate:
    passed: bool
    surjective: bool
    max_fiber: int
    fibers_divide_order: bool
    continuous: bool
    open: bool
    distance_nonincreasing: bool | None = None
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "surjective": self.surjective,
            "max_fiber": self.max_fiber,
            "fibers_divide_order": self.fibers_divide_order,
            "continuous": self.continuous,
            "open": self.open,
            "distance_nonincreasing": self.distance_nonincreasing,
            "witnesses": self.witnesses,
        }


def check_projection(q: QuotientSpace) -> ProjectionCertificate:
    """Certify the projection: surjective, fibers divide |F|, continuous and open.

    For posets it suffices to test minimal opens on both sides, since preimages
    and images commute with unions and every open is a union of minimal opens.
    """
    order = q.action.group.order
    fibers = q.fiber_sizes()
    witnesses = []
    surjective = len(set(q.projection)) == q.space.n
    divides = all(order % f == 0 for f in fibers)
    if not divides:
        witnesses.append({"fiber_sizes": fibers, "group_order": order})
    continuous = is_open = True
    nonincreasing = None
    src, tgt = q.source, q.space
    if isinstance(src, FinitePoset):
        for o in range(tgt.n):
            pre = q.preimage_mask(tgt.up[o])
            if not src.is_open_mask(pre):
                continuous = False
                witnesses.append({"preimage_not_open": list(tgt.ids(tgt.up[o]))})
        for x in range(src.n):
            img = q.project_mask(src.up[x])
            if not tgt.is_open_mask(img):
                is_open = False
                witnesses.append({"image_not_open": list(src.ids(src.up[x]))})
    else:
        # the sampled topology of a finite metric space is discrete: both hold trivially
        nonincreasing = all(
            tgt.dist[q.projection[a]][q.projection[b]] <= src.dist[a][b]
            for a in range(src.n)
            for b in range(src.n)
        )
    passed = surjective and divides and continuous and is_open and nonincreasing is not False
    return ProjectionCertificate(
        passed, surjective, max(fibers, default=0), divides, continuous, is_open, nonincreasing, witnesses
    )


def check_projection_by_enumeration(q: QuotientSpace) -> tuple[bool, bool]:
    """Continuity and openness by enumerating every open of both posets (small inputs only)."""
    src, tgt = q.source, q.space
    continuous = all(src.is_open_mask(q.preimage_mask(m)) for m in iter_open_masks(tgt))
    is_open = all(tgt.is_open_mask(q.project_mask(m)) for m in iter_open_masks(src))
    return continuous, is_open


@dataclass
class DimensionReport:
    dim_space: int
    dim_quotient: int
    equal: bool
    group_order: int

    def as_dict(self) -> dict:
        return {
            "dim_space": self.dim_space,
            "dim_quotient": self.dim_quotient,
            "equal": self.equal,
            "group_order": self.group_order,
        }


def dimension_equality_check(action: Action, size_cap: int | None = None) -> DimensionReport:
    """Compare dim(Z) with dim(F\\Z) on a poset. Inequality is reported, not raised."""
    q = quotient_poset(action)
    cap = Caps.from_env().poset_points if size_cap is None else size_cap
    dz = covering_dimension(action.space, cap)
    dq = covering_dimension(q.space, cap)
    return DimensionReport(dz, dq, dz == dq, action.group.order)
