"""Characters of the solenoid pulled back from the circles ``R/R_l``.

The character ``(l, n)`` sends a point ``y`` to ``exp(2 pi i n y_l / R_l)``.
The same character is reachable from every deeper level (multiply ``n`` by
the intervening ``r_j``), so pairs are kept in the canonical form where no
such factor can be removed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .modulus import AnySequence, SequenceMismatch
from .solenoid import SolenoidPoint


class LevelExceedsDepth(ValueError):
    pass


@dataclass(frozen=True)
class Character:
    seq: AnySequence
    level: int
    n: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")

    def to_json(self) -> dict:
        return {"level": self.level, "n": str(self.n)}


def canonicalize(seq: AnySequence, l: int, n: int) -> Character:
    if l < 0:
        raise ValueError("level must be >= 0")
    if n == 0:
        return Character(seq, 0, 0)
    while l >= 1 and n % seq.r(l) == 0:
        n //= seq.r(l)
        l -= 1
    return Character(seq, l, n)


def trivial(seq: AnySequence) -> Character:
    return Character(seq, 0, 0)


def lift(chi: Character, k: int) -> int:
    """Frequency of ``chi`` when written at level ``k >= chi.level``."""
    if k < chi.level:
        raise ValueError(f"cannot lift level {chi.level} down to {k}")
    return chi.n * (chi.seq.R(k) // chi.seq.R(chi.level))


@dataclass(frozen=True)
class CharValue:
    """A unit complex number with its exact angle in turns (``[0, 1)``)."""

    angle: Fraction
    cos: float
    sin: float

    @property
    def complex(self) -> complex:
        return complex(self.cos, self.sin)


def _unit(angle: Fraction) -> CharValue:
    angle = angle % 1
    return CharValue(angle, math.cos(2 * math.pi * angle), math.sin(2 * math.pi * angle))


def char_angle(chi: Character, pnt: SolenoidPoint) -> Fraction:
    if chi.seq != pnt.seq:
        raise SequenceMismatch("character and point use different sequences")
    if chi.level > pnt.depth:
        raise LevelExceedsDepth(f"character level {chi.level} exceeds depth {pnt.depth}")
    return (chi.n * pnt.project(chi.level) / chi.seq.R(chi.level)) % 1


def char_eval(chi: Character, pnt: SolenoidPoint) -> CharValue:
    return _unit(char_angle(chi, pnt))


def char_mul(chi1: Character, chi2: Character) -> Character:
    if chi1.seq != chi2.seq:
        raise SequenceMismatch("characters use different sequences")
    k = max(chi1.level, chi2.level)
    return canonicalize(chi1.seq, k, lift(chi1, k) + lift(chi2, k))


def char_inv(chi: Character) -> Character:
    return canonicalize(chi.seq, chi.level, -chi.n)


def constancy_level(chi: Character) -> int:
    """Smallest ``m`` with ``chi`` constant on ``Y_m``.

    On ``Y_m`` the level-``l`` coordinate runs over the multiples of ``R_m``
    (mod ``R_l``), so constancy means ``R_l | n R_m``.
    """
    Rl = chi.seq.R(chi.level)
    m = 0
    while (chi.n * chi.seq.R(m)) % Rl:
        m += 1
    return m
