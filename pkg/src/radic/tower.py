"""The r-adic integers ``Z_r`` as depth-truncated coherent sequences.

A coherent tuple ``(x_1, ..., x_L)`` with ``x_l`` in ``Z/R_l`` is determined by
its last entry, so a :class:`RadicInteger` stores the single residue
``x_L mod R_L``.  Depth is part of the value: arithmetic between different
depths is refused rather than silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .markers import AtLeast, Interval, Value
from .modulus import AnySequence, SequenceMismatch
from .ultrametric import UltraBall


class DepthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RadicInteger:
    seq: AnySequence
    depth: int
    residue: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not 0 <= self.residue < self.seq.R(self.depth):
            raise ValueError(f"residue {self.residue} not in [0, R_{self.depth})")

    @property
    def modulus(self) -> int:
        return self.seq.R(self.depth)

    def levels(self) -> tuple[int, ...]:
        """The coherent tuple ``(x_1, ..., x_L)``."""
        return tuple(self.residue % self.seq.R(l) for l in range(1, self.depth + 1))

    def _check(self, other: RadicInteger) -> None:
        if self.seq != other.seq:
            raise SequenceMismatch("operands use different modulus sequences")
        if self.depth != other.depth:
            raise DepthMismatch(f"depth {self.depth} vs {other.depth}")

    def __add__(self, other: RadicInteger) -> RadicInteger:
        return add(self, other)

    def __sub__(self, other: RadicInteger) -> RadicInteger:
        return add(self, neg(other))

    def __mul__(self, other: RadicInteger) -> RadicInteger:
        return mul(self, other)

    def __neg__(self) -> RadicInteger:
        return neg(self)

    def to_json(self) -> dict:
        return {"seq": self.seq.to_json(), "depth": self.depth, "residue": str(self.residue)}


def from_levels(seq: AnySequence, levels: tuple[int, ...]) -> RadicInteger:
    """Rebuild from a coherent tuple, rejecting incoherent input."""
    L = len(levels)
    for l in range(1, L):
        if levels[l] % seq.R(l) != levels[l - 1]:
            raise ValueError(f"tuple is not coherent at level {l}")
    return RadicInteger(seq, L, levels[-1])


def embed_int(seq: AnySequence, a: int, L: int) -> RadicInteger:
    """The image of the integer ``a`` under ``Z -> Z_r``, truncated at depth ``L``."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return RadicInteger(seq, L, a % seq.R(L))


def add(x: RadicInteger, y: RadicInteger) -> RadicInteger:
    x._check(y)
    return RadicInteger(x.seq, x.depth, (x.residue + y.residue) % x.modulus)


def mul(x: RadicInteger, y: RadicInteger) -> RadicInteger:
    x._check(y)
    return RadicInteger(x.seq, x.depth, (x.residue * y.residue) % x.modulus)


def neg(x: RadicInteger) -> RadicInteger:
    return RadicInteger(x.seq, x.depth, -x.residue % x.modulus)


def first_disagreement(x: RadicInteger, y: RadicInteger) -> int | AtLeast:
    """Smallest ``l`` with ``x_l != y_l``, or ``AtLeast(L + 1)``."""
    x._check(y)
    for l in range(1, x.depth + 1):
        R = x.seq.R(l)
        if x.residue % R != y.residue % R:
            return l
    return AtLeast(x.depth + 1)


def rho(x: RadicInteger, y: RadicInteger) -> Value:
    """The ultrametric ``1/R_{l(x,y) - 1}``; ``[0, 1/R_L]`` when indistinguishable."""
    l = first_disagreement(x, y)
    if isinstance(l, AtLeast):
        return Interval(Fraction(0), Fraction(1, x.modulus))
    return Fraction(1, x.seq.R(l - 1))


def in_subgroup(x: RadicInteger, n: int) -> bool:
    """Membership in ``Y_n``, the kernel of ``x -> x_n``."""
    if n > x.depth:
        raise DepthMismatch(f"Y_{n} is not visible at depth {x.depth}")
    return x.residue % x.seq.R(n) == 0


def subgroup_members(seq: AnySequence, n: int, L: int) -> Iterator[RadicInteger]:
    if not 0 <= n <= L:
        raise DepthMismatch(f"need 0 <= n <= L, got n={n}, L={L}")
    for res in range(0, seq.R(L), seq.R(n)):
        yield RadicInteger(seq, L, res)


def subgroup_cosets(seq: AnySequence, n: int, L: int) -> list[UltraBall]:
    """The ``R_n`` cosets of ``Y_n`` in ``Y_0``, as level-``n`` balls."""
    if not 0 <= n <= L:
        raise DepthMismatch(f"need 0 <= n <= L, got n={n}, L={L}")
    return [UltraBall(n, c, seq) for c in range(seq.R(n))]


def first_disagreement_array(seq: AnySequence, L: int, xs, ys) -> np.ndarray:
    """Vectorised :func:`first_disagreement` on residue arrays; ``L + 1`` marks agreement."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    # agreement mod R_l forces agreement at every shallower level, so
    # l(x, y) - 1 is the number of levels at which x and y agree
    out = np.ones(np.broadcast(xs, ys).shape, dtype=np.int16 if L < 32000 else np.int64)
    for l in range(1, L + 1):
        R = seq.R(l)
        out += (xs % R) == (ys % R)
    return out
