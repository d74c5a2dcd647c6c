"""Finite metric spaces with exact rational distances.

Sets built from balls use strict inequalities for interior membership and
non-strict ones for closure membership. A resolution floor ``rho`` bounds
ball radii from below; without it every cover of a finite sample could be
refined to singletons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ._bits import bits, mask_of
from .errors import InputError, ResolutionError
from .rational import INF, parse_rational
from .sets import SampledSet, Space, complement, diff, intersect, union

__all__ = [
    "FiniteMetricSpace",
    "BallUnionSet",
    "SampledSet",
    "ball",
    "intersect",
    "union",
    "complement",
    "diff",
    "diameter",
    "dist_to_complement",
    "cycle_space",
]


class FiniteMetricSpace(Space):
    def __init__(self, points: Iterable, dist, rho):
        self._init_points(points)
        n = len(self.points)
        rows = tuple(tuple(parse_rational(v) for v in row) for row in dist)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InputError("dist must be an n x n matrix")
        self.rho = parse_rational(rho)
        if self.rho <= 0:
            raise InputError("rho must be positive")
        for i in range(n):
            if rows[i][i] != 0:
                raise InputError(f"d({self.points[i]},{self.points[i]}) != 0")
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise InputError(f"dist not symmetric at ({self.points[i]},{self.points[j]})")
                if i != j and rows[i][j] <= 0:
                    raise InputError(f"d({self.points[i]},{self.points[j]}) must be positive")
        for i in range(n):
            for j in range(n):
                dij = rows[i][j]
                for k in range(n):
                    if rows[i][k] > dij + rows[j][k]:
                        raise InputError(
                            "triangle inequality fails for "
                            f"({self.points[i]},{self.points[j]},{self.points[k]})"
                        )
        self.dist = rows

    def d(self, x, y) -> Fraction:
        return self.dist[self.index(x)][self.index(y)]

    def distance_values(self) -> list[Fraction]:
        return sorted({v for row in self.dist for v in row})

    def ball_masks(self, center: int, radius: Fraction) -> tuple[int, int]:
        row = self.dist[center]
        inner = mask_of(j for j, v in enumerate(row) if v < radius)
        outer = mask_of(j for j, v in enumerate(row) if v <= radius)
        return inner, outer

    def sampled(self, interior: Iterable = (), closure: Iterable | None = None) -> SampledSet:
        i = self.mask(interior)
        c = i if closure is None else self.mask(closure)
        return SampledSet(self, i, c)

    def __repr__(self):
        return f"FiniteMetricSpace({len(self.points)} points, rho={self.rho})"


@dataclass(frozen=True)
class BallUnionSet:
    """A finite union of balls, each given as (center index, radius)."""

    space: FiniteMetricSpace
    balls: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        for c, r in self.balls:
            if r < self.space.rho:
                raise ResolutionError(
                    f"radius {r} is below the resolution floor {self.space.rho}",
                    witness=(self.space.points[c], str(r)),
                )

    @property
    def interior(self) -> int:
        out = 0
        for c, r in self.balls:
            out |= self.space.ball_masks(c, r)[0]
        return out

    @property
    def closure(self) -> int:
        out = 0
        for c, r in self.balls:
            out |= self.space.ball_masks(c, r)[1]
        return out

    @property
    def boundary(self) -> int:
        return self.closure & ~self.interior

    def sampled(self) -> SampledSet:
        return SampledSet(self.space, self.interior, self.closure)

    def __or__(self, other: "BallUnionSet") -> "BallUnionSet":
        if other.space is not self.space:
            raise InputError("sets live in different spaces")
        return BallUnionSet(self.space, tuple(dict.fromkeys(self.balls + other.balls)))


def ball(space: FiniteMetricSpace, center, radius) -> BallUnionSet:
    return BallUnionSet(space, ((space.index(center), parse_rational(radius)),))


def _as_sampled(s) -> SampledSet:
    return s.sampled() if isinstance(s, BallUnionSet) else s


def diameter(space: FiniteMetricSpace, s) -> Fraction:
    """Largest distance between closure members; 0 for the empty set."""
    s = _as_sampled(s)
    members = list(bits(s.closure))
    best = Fraction(0)
    for a in members:
        row = space.dist[a]
        for b in members:
            if row[b] > best:
                best = row[b]
    return best


def dist_to_complement(space: FiniteMetricSpace, w, z):
    """min d(z, p) over p outside the interior of ``w``; ``INF`` if ``w`` is everything."""
    w = _as_sampled(w)
    zi = space.index(z)
    outside = space.full_mask & ~w.interior
    if not outside:
        return INF
    row = space.dist[zi]
    return min(row[p] for p in bits(outside))


def cycle_space(n: int, rho=1, scale=1) -> FiniteMetricSpace:
    """The n-cycle with arc-length metric d(i, j) = scale * min(|i-j|, n-|i-j|)."""
    scale = parse_rational(scale)
    dist = [[scale * min(abs(i - j), n - abs(i - j)) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace([str(i) for i in range(n)], dist, rho)
