"""Exact rational parsing/formatting and the tagged infinity sentinel."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering

from .errors import InputError


def parse_rational(value) -> Fraction:
    """Parse ``3``, ``"3"``, ``"3/2"`` or a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational (use an int or a 'p/q' string): {value!r}")


def format_rational(q) -> str:
    if q is INF:
        return "inf"
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@total_ordering
class _Infinity:
    """Greater than every rational. Used where a distance to an empty set is asked for."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("equicover.INF")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self


INF = _Infinity()


def largest_grid_below(bound: Fraction, max_denominator: int) -> Fraction | None:
    """Largest positive p/q < bound with q <= max_denominator, or None."""
    best = None
    for q in range(1, max_denominator + 1):
        p = -(-bound.numerator * q // bound.denominator) - 1  # ceil(bound*q) - 1
        if p <= 0:
            continue
        cand = Fraction(p, q)
        if best is None or cand > best:
            best = cand
    return best
