"""Exact values that carry their own truncation honesty.

Finite-depth computations cannot always pin a quantity down.  Instead of
silently returning ``0`` (or a sentinel integer) they return one of the
markers defined here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class Infinity(enum.Enum):
    """The value ``+inf`` for valuations and prime multiplicities."""

    INF = "inf"

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = Infinity.INF


@dataclass(frozen=True)
class AtLeast:
    """A level that is only known to be ``>= level`` at the working depth."""

    level: int

    def __str__(self) -> str:
        return f">={self.level}"


@dataclass(frozen=True)
class Interval:
    """A closed rational interval ``[lower, upper]`` known to hold a value."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    def __contains__(self, value) -> bool:
        return self.lower <= value <= self.upper

    def __str__(self) -> str:
        if self.lower == 0:
            return f"<={self.upper}"
        return f"[{self.lower}, {self.upper}]"


Value = Union[Fraction, Interval]


def lower(v: Value) -> Fraction:
    return v.lower if isinstance(v, Interval) else v


def upper(v: Value) -> Fraction:
    return v.upper if isinstance(v, Interval) else v


def collapse(lo: Fraction, hi: Fraction) -> Value:
    return lo if lo == hi else Interval(lo, hi)


def vmax(*values: Value) -> Value:
    """Maximum of exact values and intervals, as tight as the inputs allow."""
    return collapse(max(lower(v) for v in values), max(upper(v) for v in values))


def vmin(*values: Value) -> Value:
    return collapse(min(lower(v) for v in values), min(upper(v) for v in values))
