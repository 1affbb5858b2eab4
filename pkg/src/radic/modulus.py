"""Modulus sequences r = (r_j), partial products R_l and the r-adic size of integers.

Eventually periodic sequences are stored as ``prefix + cycle*`` so that
suprema over all levels stay decidable.  Sequences that are only known up to
a finite depth go through :class:`CappedSequence`.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from .markers import INF, AtLeast, Infinity


class CapExceeded(ValueError):
    """Raised when a finite cap is too small to resolve a quantity."""


class SequenceMismatch(ValueError):
    pass


def _primitive_period(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for p in range(1, n + 1):
        if n % p == 0 and cycle[:p] * (n // p) == cycle:
            return cycle[:p]
    return cycle


def partial_products_of(entries: Sequence[int]) -> list[int]:
    out = [1]
    for v in entries:
        out.append(out[-1] * v)
    return out


@dataclass(frozen=True)
class ModulusSequence:
    """An eventually periodic sequence ``r_1, r_2, ...`` of integers ``>= 2``.

    The stored form is canonical (shortest prefix, primitive cycle), so two
    instances compare equal exactly when they describe the same sequence.
    """

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        prefix = tuple(int(v) for v in self.prefix)
        cycle = tuple(int(v) for v in self.cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        if any(v < 2 for v in prefix + cycle):
            raise ValueError(f"entries must be >= 2, got {prefix + cycle}")
        cycle = _primitive_period(cycle)
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "_products", [1])

    @classmethod
    def constant(cls, r: int) -> ModulusSequence:
        return cls((), (r,))

    @classmethod
    def periodic(cls, *cycle: int) -> ModulusSequence:
        return cls((), cycle)

    @property
    def cap(self) -> None:
        return None

    @property
    def is_constant(self) -> bool:
        return not self.prefix and len(self.cycle) == 1

    @property
    def bound(self) -> int:
        """Largest entry; eventually periodic sequences are always bounded."""
        return max(self.prefix + self.cycle)

    def r(self, j: int) -> int:
        if j < 1:
            raise IndexError(f"r_j is defined for j >= 1, got {j}")
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        return self.cycle[(j - len(self.prefix) - 1) % len(self.cycle)]

    def R(self, l: int) -> int:
        if l < 0:
            raise IndexError(f"R_l is defined for l >= 0, got {l}")
        products = self._products
        if l < len(products):
            return products[l]
        if l < 4096:
            # build a longer copy and swap it in, so concurrent readers never see a torn list
            grown = list(products)
            while len(grown) <= l:
                grown.append(grown[-1] * self.r(len(grown)))
            object.__setattr__(self, "_products", grown)
            return grown[l]
        k = len(self.prefix)
        if l <= k:
            return math.prod(self.prefix[:l])
        q, rem = divmod(l - k, len(self.cycle))
        return math.prod(self.prefix) * math.prod(self.cycle) ** q * math.prod(self.cycle[:rem])

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}

    def __str__(self) -> str:
        cyc = ",".join(map(str, self.cycle))
        cyc = f"({cyc})^inf" if len(self.cycle) > 1 else f"{cyc}^inf"
        if self.prefix:
            return ",".join(map(str, self.prefix)) + "|" + cyc
        return cyc


@dataclass(frozen=True)
class CappedSequence:
    """An arbitrary modulus sequence known only for ``j <= cap``."""

    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(v) for v in self.entries)
        if any(v < 2 for v in entries):
            raise ValueError(f"entries must be >= 2, got {entries}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_products", partial_products_of(entries))

    @classmethod
    def from_function(cls, fn: Callable[[int], int], cap: int) -> CappedSequence:
        return cls(tuple(fn(j) for j in range(1, cap + 1)))

    @property
    def cap(self) -> int:
        return len(self.entries)

    @property
    def is_constant(self) -> bool:
        return len(set(self.entries)) <= 1

    @property
    def bound(self) -> int:
        return max(self.entries)

    def r(self, j: int) -> int:
        if j < 1:
            raise IndexError(f"r_j is defined for j >= 1, got {j}")
        if j > self.cap:
            raise CapExceeded(f"r_{j} requested beyond cap {self.cap}")
        return self.entries[j - 1]

    def R(self, l: int) -> int:
        if l < 0:
            raise IndexError(f"R_l is defined for l >= 0, got {l}")
        if l > self.cap:
            raise CapExceeded(f"R_{l} requested beyond cap {self.cap}")
        return self._products[l]

    def to_json(self) -> dict:
        return {"entries": list(self.entries)}

    def __str__(self) -> str:
        return "capped(" + ",".join(map(str, self.entries)) + ")"


AnySequence = Union[ModulusSequence, CappedSequence]


_SHORTHAND = re.compile(r"^\s*(?:(?P<prefix>[\d,\s]+)\|)?\s*\(?(?P<cycle>[\d,\s]+)\)?\s*\^\s*(?:inf|∞)\s*$")


def parse_sequence(text: str) -> AnySequence:
    """Parse ``"p^inf"``, ``"(2,3)^inf"``, ``"4|3^inf"`` or a JSON object.

    ``"∞"`` is accepted in place of ``inf``.
    """
    text = text.strip()
    if text.startswith("{"):
        return sequence_from_json(json.loads(text))
    m = _SHORTHAND.match(text)
    if not m:
        raise ValueError(f"cannot parse modulus sequence {text!r}")

    def ints(s):
        return tuple(int(v) for v in s.replace(" ", "").split(",") if v)

    prefix = ints(m.group("prefix")) if m.group("prefix") else ()
    return ModulusSequence(prefix, ints(m.group("cycle")))


def sequence_from_json(obj: dict) -> AnySequence:
    if "entries" in obj:
        return CappedSequence(tuple(obj["entries"]))
    return ModulusSequence(tuple(obj.get("prefix", ())), tuple(obj["cycle"]))


def partial_products(seq: AnySequence, L: int) -> list[int]:
    """Return ``[R_0, R_1, ..., R_L]``."""
    if L < 0:
        raise ValueError("L must be >= 0")
    out = [1]
    for j in range(1, L + 1):
        out.append(out[-1] * seq.r(j))
    return out


def valuation(seq: AnySequence, a: int, cap: int) -> int | AtLeast | Infinity:
    """Largest ``l <= cap`` with ``R_l | a``.

    Returns ``AtLeast(cap)`` when even ``R_cap`` divides ``a`` and ``INF``
    for ``a == 0``.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if a == 0:
        return INF
    a = abs(a)
    for l in range(1, cap + 1):
        q, rem = divmod(a, seq.r(l))
        if rem:
            return l - 1
        a = q
    return AtLeast(cap)


def radic_abs(seq: AnySequence, a: int, cap: int) -> Fraction:
    """The r-adic absolute value ``|a|_r = 1/R_{n(a)}``."""
    v = valuation(seq, a, cap)
    if v is INF:
        return Fraction(0)
    if isinstance(v, AtLeast):
        raise CapExceeded(f"R_{cap} divides {a}; raise the cap")
    return Fraction(1, seq.R(v))


def radic_metric(seq: AnySequence, a: int, b: int, cap: int) -> Fraction:
    return radic_abs(seq, a - b, cap)


def valuation_array(seq: AnySequence, values: Sequence[int] | np.ndarray, cap: int) -> np.ndarray:
    """Vectorised :func:`valuation` for machine-size integers.

    Zero entries map to ``-1`` and entries divisible by ``R_cap`` to ``cap``;
    callers decide what those mean.
    """
    a = np.abs(np.asarray(values, dtype=np.int64))
    out = np.full(a.shape, cap, dtype=np.int64)
    alive = a != 0
    out[~alive] = -1
    for l in range(1, cap + 1):
        rem = a % seq.r(l)
        stop = alive & (rem != 0)
        out[stop] = l - 1
        alive &= ~stop
        a = np.where(alive, a // seq.r(l), a)
    return out
