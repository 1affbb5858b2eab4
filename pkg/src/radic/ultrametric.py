"""Ball geometry of ultrametrics on finite-depth products of finite sets.

A point of ``X_1 x ... x X_L`` is a tuple of coordinates; two points are at
distance ``t_n`` where ``n`` is the length of their common prefix.  Balls are
stored intrinsically as ``(level, cell)``: in an ultrametric every point of a
ball is a center, so the cell is the only honest description.

The same machinery serves the r-adic tower, where a level-``n`` cell is a
residue mod ``R_n`` rather than a tuple.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .markers import Interval, Value
from .modulus import CappedSequence, ModulusSequence


class LengthMismatch(ValueError):
    pass


class SpaceMismatch(ValueError):
    pass


class NotABijection(ValueError):
    pass


@dataclass(frozen=True)
class ProductSpace:
    """``prod_{j=1}^L X_j`` with ``|X_j| = factor_sizes[j-1]`` and weights ``t_0 > ... > t_L``."""

    factor_sizes: tuple[int, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.factor_sizes)
        weights = tuple(Fraction(w) for w in self.weights)
        if any(s < 2 for s in sizes):
            raise ValueError("every factor needs at least two elements")
        if len(weights) != len(sizes) + 1:
            raise ValueError(f"need {len(sizes) + 1} weights t_0..t_L, got {len(weights)}")
        if weights[-1] <= 0 or any(a <= b for a, b in zip(weights, weights[1:])):
            raise ValueError("weights must be positive and strictly decreasing")
        object.__setattr__(self, "factor_sizes", sizes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def geometric(cls, factor_sizes: Sequence[int], ratio: Fraction = Fraction(1, 2)) -> ProductSpace:
        return cls(tuple(factor_sizes), tuple(Fraction(ratio) ** j for j in range(len(factor_sizes) + 1)))

    @property
    def depth(self) -> int:
        return len(self.factor_sizes)

    def points(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(s) for s in self.factor_sizes))

    def size(self) -> int:
        return math.prod(self.factor_sizes)


def common_prefix(x: Sequence[int], y: Sequence[int]) -> int:
    n = 0
    for a, b in zip(x, y):
        if a != b:
            break
        n += 1
    return n


def product_metric(space: ProductSpace, x: Sequence[int], y: Sequence[int]) -> Value:
    """``t_{n(x,y)}``; points agreeing through depth ``L`` give the interval ``[0, t_L]``."""
    if len(x) != space.depth or len(y) != space.depth:
        raise LengthMismatch(f"expected tuples of length {space.depth}")
    n = common_prefix(x, y)
    if n == space.depth:
        return Interval(Fraction(0), space.weights[-1])
    return space.weights[n]


Space = Union[ProductSpace, ModulusSequence, CappedSequence]


@dataclass(frozen=True)
class UltraBall:
    """The closed ball of points whose first ``level`` coordinates are ``cell``.

    Over a modulus sequence the cell is a residue mod ``R_level``; over a
    :class:`ProductSpace` it is the tuple of the first ``level`` coordinates.
    """

    level: int
    cell: Union[int, tuple[int, ...]]
    space: Space = field(compare=True)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if isinstance(self.space, ProductSpace):
            cell = tuple(self.cell)
            if self.level > self.space.depth or len(cell) != self.level:
                raise ValueError(f"cell {cell} does not fit level {self.level}")
            if any(not 0 <= c < s for c, s in zip(cell, self.space.factor_sizes)):
                raise ValueError(f"cell {cell} out of range")
            object.__setattr__(self, "cell", cell)
        else:
            if not 0 <= self.cell < self.space.R(self.level):
                raise ValueError(f"cell {self.cell} not a residue mod R_{self.level}")

    def truncate(self, level: int) -> Union[int, tuple[int, ...]]:
        """The cell of the (unique) level-``level`` ball containing this one."""
        if level > self.level:
            raise ValueError("can only truncate to a shallower level")
        if isinstance(self.space, ProductSpace):
            return self.cell[:level]
        return self.cell % self.space.R(level)

    def contains_point(self, point) -> bool:
        if isinstance(self.space, ProductSpace):
            return tuple(point[: self.level]) == self.cell
        return point % self.space.R(self.level) == self.cell


class Relation(enum.Enum):
    DISJOINT = "disjoint"
    FIRST_CONTAINS_SECOND = "first_contains_second"
    SECOND_CONTAINS_FIRST = "second_contains_first"
    EQUAL = "equal"


def _contains(outer: UltraBall, inner: UltraBall) -> bool:
    return outer.level <= inner.level and inner.truncate(outer.level) == outer.cell


def ball_relation(b1: UltraBall, b2: UltraBall) -> Relation:
    if b1.space != b2.space:
        raise SpaceMismatch("balls live in different spaces")
    if b1 == b2:
        return Relation.EQUAL
    if _contains(b1, b2):
        return Relation.FIRST_CONTAINS_SECOND
    if _contains(b2, b1):
        return Relation.SECOND_CONTAINS_FIRST
    return Relation.DISJOINT


def maximal_disjoint_cover(balls: Sequence[UltraBall]) -> list[UltraBall]:
    """Inclusion-maximal members of ``balls``, deduplicated, shallowest first.

    Two ultrametric balls are nested or disjoint, so the maximal ones are
    pairwise disjoint and cover the same set as the whole collection.
    """
    if not balls:
        raise ValueError("need at least one ball")
    space = balls[0].space
    if any(b.space != space for b in balls):
        raise SpaceMismatch("balls live in different spaces")
    kept: list[UltraBall] = []
    kept_cells: set[tuple[int, object]] = set()
    for b in sorted(set(balls), key=lambda b: (b.level, b.cell)):
        if any((m, b.truncate(m)) in kept_cells for m in range(b.level + 1)):
            continue
        kept.append(b)
        kept_cells.add((b.level, b.cell))
    return kept


@dataclass
class PermutationReport:
    permutation: tuple[int, ...]
    bijective: bool
    tuples_checked: int
    exhaustive: bool
    metric_change: tuple[tuple[int, ...], tuple[int, ...], Value, Value] | None
    note: str = ""


def permute_point(permutation: Sequence[int], x: Sequence[int]) -> tuple[int, ...]:
    """``x -> (x_{pi(1)}, ..., x_{pi(L)})`` with ``permutation[j-1] = pi(j)``."""
    return tuple(x[p - 1] for p in permutation)


def permuted_space(space: ProductSpace, permutation: Sequence[int]) -> ProductSpace:
    return ProductSpace(permute_point(permutation, space.factor_sizes), space.weights)


def permuted_compare(
    space: ProductSpace,
    permutation: Sequence[int],
    samples: Iterable[tuple[Sequence[int], Sequence[int]]] = (),
    exhaustive_limit: int = 1 << 16,
) -> PermutationReport:
    """Compare ``X`` with the reindexed product ``X^pi``.

    Bijectivity is witnessed by a roundtrip on every tuple when the space
    has at most ``exhaustive_limit`` points, otherwise on the sample pairs.
    A metric change witness is looked for among the samples and, failing
    that, among the pairs ``(0, e_k)`` that differ in a single coordinate.
    """
    L = space.depth
    permutation = tuple(permutation)
    if sorted(permutation) != list(range(1, L + 1)):
        raise NotABijection(f"{permutation} is not a permutation of 1..{L}")
    inverse = [0] * L
    for j, p in enumerate(permutation, start=1):
        inverse[p - 1] = j
    target = permuted_space(space, permutation)
    samples = [(tuple(x), tuple(y)) for x, y in samples]

    def back(z):
        return permute_point(inverse, z)

    exhaustive = space.size() <= exhaustive_limit
    pool = space.points() if exhaustive else (p for pair in samples for p in pair)
    seen = set()
    checked = 0
    bijective = True
    for x in pool:
        z = permute_point(permutation, x)
        if back(z) != x or z in seen or any(not 0 <= c < s for c, s in zip(z, target.factor_sizes)):
            bijective = False
        seen.add(z)
        checked += 1
    if exhaustive and len(seen) != target.size():
        bijective = False

    if permutation == tuple(range(1, L + 1)):
        return PermutationReport(permutation, bijective, checked, exhaustive, None,
                                 "identity reindexing: no witness possible")

    def unit(k):
        return tuple(1 if j == k else 0 for j in range(L))

    candidates = samples + [(tuple([0] * L), unit(k)) for k in range(L)]
    for x, y in candidates:
        before = product_metric(space, x, y)
        after = product_metric(target, permute_point(permutation, x), permute_point(permutation, y))
        if before != after:
            return PermutationReport(permutation, bijective, checked, exhaustive, (x, y, before, after))
    return PermutationReport(permutation, bijective, checked, exhaustive, None,
                             "no pair with a changed distance found")
