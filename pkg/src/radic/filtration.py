"""Conditional expectations and maximal functions for the level filtration.

A step function at depth ``L`` is a list of ``R_L`` exact values indexed by
residue; the level-``n`` cell of residue ``c`` is ``{c' : c' = c mod R_n}``,
so averaging over a cell is averaging over a stride-``R_n`` slice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .modulus import AnySequence, SequenceMismatch
from .tower import DepthMismatch
from .ultrametric import UltraBall, maximal_disjoint_cover


class NegativeInput(ValueError):
    pass


@dataclass(frozen=True)
class StepFunction:
    seq: AnySequence
    depth: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if len(values) != self.seq.R(self.depth):
            raise ValueError(f"need {self.seq.R(self.depth)} values, got {len(values)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, seq: AnySequence, depth: int, c) -> StepFunction:
        return cls(seq, depth, (Fraction(c),) * seq.R(depth))

    @property
    def size(self) -> int:
        return len(self.values)

    def _check(self, other: StepFunction) -> None:
        if self.seq != other.seq:
            raise SequenceMismatch("step functions use different sequences")
        if self.depth != other.depth:
            raise DepthMismatch(f"depth {self.depth} vs {other.depth}")

    def __add__(self, other: StepFunction) -> StepFunction:
        self._check(other)
        return StepFunction(self.seq, self.depth, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: StepFunction) -> StepFunction:
        self._check(other)
        return StepFunction(self.seq, self.depth, tuple(a - b for a, b in zip(self.values, other.values)))

    def integral(self) -> Fraction:
        return exact_sum(self.values) / self.size

    def norm1(self) -> Fraction:
        return exact_sum(abs(v) for v in self.values) / self.size

    def norm_inf(self) -> Fraction:
        return max(abs(v) for v in self.values)

    def inner(self, other: StepFunction) -> Fraction:
        self._check(other)
        return exact_sum(a * b for a, b in zip(self.values, other.values)) / self.size

    def to_json(self) -> dict:
        return {"seq": self.seq.to_json(), "depth": self.depth, "values": [str(v) for v in self.values]}


def exact_sum(values) -> Fraction:
    """Sum of rationals over a common denominator (much cheaper than repeated ``+``)."""
    values = list(values)
    den = math.lcm(*(v.denominator for v in values)) if values else 1
    return Fraction(sum(v.numerator * (den // v.denominator) for v in values), den)


def cell_averages(f: StepFunction, n: int) -> list[Fraction]:
    """Average of ``f`` over each level-``n`` cell, indexed by residue mod ``R_n``."""
    if not 0 <= n <= f.depth:
        raise DepthMismatch(f"level {n} not in [0, {f.depth}]")
    Rn = f.seq.R(n)
    per_cell = f.size // Rn
    return [exact_sum(f.values[c::Rn]) / per_cell for c in range(Rn)]


def cond_expect(f: StepFunction, n: int) -> StepFunction:
    avg = cell_averages(f, n)
    Rn = len(avg)
    return StepFunction(f.seq, f.depth, tuple(avg[c % Rn] for c in range(f.size)))


def martingale_diffs(f: StepFunction) -> list[StepFunction]:
    """``[E_0 f, E_1 f - E_0 f, ..., f - E_{L-1} f]``."""
    levels = [cond_expect(f, n) for n in range(f.depth + 1)]
    return [levels[0]] + [b - a for a, b in zip(levels, levels[1:])]


def maximal_function(f: StepFunction) -> StepFunction:
    """``Mf(x) = max_n`` of the level-``n`` cell average at ``x``, over ``0 <= n <= L``."""
    if any(v < 0 for v in f.values):
        raise NegativeInput("maximal function needs f >= 0")
    return _maximal_from(f, [cell_averages(f, n) for n in range(f.depth + 1)])


def _maximal_from(f: StepFunction, averages: list[list[Fraction]]) -> StepFunction:
    return StepFunction(f.seq, f.depth, tuple(
        max(avg[c % len(avg)] for avg in averages) for c in range(f.size)))


@dataclass
class Weak11Report:
    level_set: list[UltraBall]
    level_set_measure: Fraction
    direct_measure: Fraction
    bound: Fraction
    passed: bool


def weak_11_check(f: StepFunction, lam) -> Weak11Report:
    """``mu_0{Mf > lam} <= ||f||_1 / lam`` via the stopping cells.

    Each point of the level set sits in a shallowest cell whose average
    exceeds ``lam``; the maximal such cells are disjoint, and each has
    measure at most ``(integral of f over it) / lam``.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if any(v < 0 for v in f.values):
        raise NegativeInput("weak (1,1) check needs f >= 0")
    averages = [cell_averages(f, n) for n in range(f.depth + 1)]
    stopping = []
    for n, avg in enumerate(averages):
        stopping.extend(UltraBall(n, c, f.seq) for c, v in enumerate(avg) if v > lam)
    cover = maximal_disjoint_cover(stopping) if stopping else []
    measure = sum((Fraction(1, f.seq.R(b.level)) for b in cover), Fraction(0))
    Mf = _maximal_from(f, averages)
    direct = Fraction(sum(1 for v in Mf.values if v > lam), f.size)
    bound = f.norm1() / lam
    return Weak11Report(cover, measure, direct, bound, measure == direct and measure <= bound)


@dataclass(frozen=True)
class YGridFunction:
    """Samples of a function on ``Y`` at the coordinates ``t = k/m``, ``0 <= k < m R_L``.

    The grid is the level-``L`` cylinder grid: ``C_n``-measurable functions
    are exactly those whose samples depend only on ``k mod m R_n``.
    """

    seq: AnySequence
    depth: int
    resolution: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.resolution * self.seq.R(self.depth),):
            raise ValueError("need resolution * R_L samples")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, seq: AnySequence, depth: int, resolution: int, fn) -> YGridFunction:
        t = np.arange(resolution * seq.R(depth)) / resolution
        return cls(seq, depth, resolution, fn(t))


def grid_cond_expect(f: YGridFunction, n: int) -> np.ndarray:
    if not 0 <= n <= f.depth:
        raise DepthMismatch(f"level {n} not in [0, {f.depth}]")
    period = f.resolution * f.seq.R(n)
    fibres = f.values.reshape(-1, period)
    return np.tile(fibres.mean(axis=0), fibres.shape[0])


@dataclass(frozen=True)
class ApproxLevel:
    level: int
    cond_expect_error: float
    best_error: float


def level_approx_Y(f: YGridFunction) -> list[ApproxLevel]:
    """Per level ``n``: ``sup |f - E_n f|`` and the best sup-distance to ``C_n``.

    The best ``C_n``-measurable approximation takes the midrange of each
    fibre, so its error is half the largest fibre oscillation; that one is
    non-increasing in ``n``.  ``sup |f - E_n f|`` need not be.
    """
    out = []
    for n in range(f.depth + 1):
        period = f.resolution * f.seq.R(n)
        fibres = f.values.reshape(-1, period)
        ce = float(np.max(np.abs(f.values - grid_cond_expect(f, n))))
        best = float(np.max(fibres.max(axis=0) - fibres.min(axis=0)) / 2)
        out.append(ApproxLevel(n, ce, best))
    return out
