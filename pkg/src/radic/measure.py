"""Haar measure on ``Y_0`` and ``Y`` through cylinder sets, plus the covering
and regularity computations that go with it.

Only finite unions of cells (``Y_0``) or of arcs pulled back from a circle
``R/R_n`` (``Y``) are measured, always exactly.  Arc lengths are the ones
inherited from the real line, so ``R/R_n`` has total length ``R_n`` and
``mu(p_n^{-1}(E)) = |E| / R_n`` gives ``mu(Y) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .markers import lower
from .modulus import AnySequence
from .tower import RadicInteger, rho


class ArcsOverlap(ValueError):
    pass


@dataclass(frozen=True)
class CellSet:
    """A union of level-``n`` cells of ``Y_0``, given by residues mod ``R_n``."""

    seq: AnySequence
    level: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        res = frozenset(int(c) for c in self.residues)
        R = self.seq.R(self.level)
        bad = [c for c in res if not 0 <= c < R]
        if bad:
            raise ValueError(f"residues {sorted(bad)} not in [0, {R})")
        object.__setattr__(self, "residues", res)

    @classmethod
    def full(cls, seq: AnySequence, level: int) -> CellSet:
        return cls(seq, level, frozenset(range(seq.R(level))))

    def to_json(self) -> dict:
        return {"level": self.level, "residues": sorted(self.residues)}


@dataclass(frozen=True)
class ArcSet:
    """A union of half-open arcs ``[s, e)`` in ``R/R_n``, normalized.

    Normal form: arcs split at the wrap point, sorted, pairwise disjoint
    and with touching arcs merged.  Overlaps are rejected rather than merged,
    since a measure computed on overlapping input would double count.
    """

    seq: AnySequence
    level: int
    arcs: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        R = self.seq.R(self.level)
        pieces = []
        for s, e in self.arcs:
            s, e = Fraction(s), Fraction(e)
            length = e - s
            if length < 0 or length > R:
                raise ValueError(f"arc [{s}, {e}) has length outside [0, {R}]")
            if length == 0:
                continue
            s0 = s % R
            if s0 + length <= R:
                pieces.append((s0, s0 + length))
            else:
                pieces.append((s0, Fraction(R)))
                pieces.append((Fraction(0), s0 + length - R))
        pieces.sort()
        merged: list[tuple[Fraction, Fraction]] = []
        for s, e in pieces:
            if merged and s < merged[-1][1]:
                raise ArcsOverlap(f"arc [{s}, {e}) overlaps [{merged[-1][0]}, {merged[-1][1]})")
            if merged and s == merged[-1][1]:
                merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        object.__setattr__(self, "arcs", tuple(merged))

    @classmethod
    def full(cls, seq: AnySequence, level: int) -> ArcSet:
        return cls(seq, level, ((Fraction(0), Fraction(seq.R(level))),))

    def length(self) -> Fraction:
        return sum((e - s for s, e in self.arcs), Fraction(0))

    def to_json(self) -> dict:
        return {"level": self.level, "arcs": [[str(s), str(e)] for s, e in self.arcs]}


def haar_Y0(cells: CellSet) -> Fraction:
    return Fraction(len(cells.residues), cells.seq.R(cells.level))


def ball_measure_Y0(seq: AnySequence, n: int) -> Fraction:
    """Measure of any closed ``rho``-ball of radius ``1/R_n``: a translate of ``Y_n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Fraction(1, seq.R(n))


def haar_Y_cylinder(arcs: ArcSet) -> Fraction:
    return arcs.length() / arcs.seq.R(arcs.level)


def translate(cells: CellSet, shift: int) -> CellSet:
    R = cells.seq.R(cells.level)
    return CellSet(cells.seq, cells.level, frozenset((c + shift) % R for c in cells.residues))


def refine(cells: CellSet) -> CellSet:
    """The same set written with the ``r_{n+1}`` children of each cell."""
    n = cells.level
    R = cells.seq.R(n)
    kids = frozenset(c + i * R for c in cells.residues for i in range(cells.seq.r(n + 1)))
    return CellSet(cells.seq, n + 1, kids)


def refine_arcs(arcs: ArcSet) -> ArcSet:
    """Rewrite ``p_n^{-1}(E)`` as ``p_{n+1}^{-1}(E')``: each arc has ``r_{n+1}`` lifts."""
    n = arcs.level
    R = arcs.seq.R(n)
    lifts = tuple((s + i * R, e + i * R) for s, e in arcs.arcs for i in range(arcs.seq.r(n + 1)))
    return ArcSet(arcs.seq, n + 1, lifts)


@dataclass(frozen=True)
class CoverEstimate:
    cells: int
    diameter: Fraction
    sum_of_diameters: Fraction


def cell_diameter(seq: AnySequence, k: int, cell: int) -> Fraction:
    """``rho``-diameter of a level-``k`` cell, found from its level-``k+1`` children."""
    kids = [RadicInteger(seq, k + 1, cell + i * seq.R(k)) for i in range(seq.r(k + 1))]
    return max(lower(rho(x, y)) for x in kids for y in kids)


def hausdorff_cover_estimate(seq: AnySequence, n: int, k: int) -> CoverEstimate:
    """Cover ``Y_n`` by its depth-``k`` cells and add up their diameters."""
    if k < n:
        raise ValueError(f"need k >= n, got k={k}, n={n}")
    cells = list(range(0, seq.R(k), seq.R(n)))
    diams = [cell_diameter(seq, k, c) for c in cells]
    return CoverEstimate(len(cells), max(diams), sum(diams, Fraction(0)))


@dataclass(frozen=True)
class LevelRatios:
    level: int
    ball_measure: Fraction
    radius: Fraction
    regularity_ratio: Fraction
    doubling_ratio: Fraction | None


@dataclass
class AhlforsReport:
    per_level: list[LevelRatios]
    threshold: int | None
    ratio_min: Fraction | None = None
    ratio_max: Fraction | None = None
    non_doubling: bool = False


def ahlfors_probe(seq: AnySequence, max_level: int, threshold: int | None = None) -> AhlforsReport:
    """Regularity ``mu_0(B)/radius`` and doubling ``mu_0(B(x, 1/R_{n-1}))/mu_0(B(x, 1/R_n))``.

    Doubling ratios come from counting the level-``n`` cells inside a
    level-``n-1`` cell.  ``non_doubling`` is raised when a ratio exceeds
    ``threshold``.
    """
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    rows = []
    for n in range(max_level + 1):
        mass = ball_measure_Y0(seq, n)
        radius = Fraction(1, seq.R(n))
        doubling = None
        if n >= 1:
            # level-n cells of Y_{n-1}: residues mod R_n that vanish mod R_{n-1}
            inside = len(range(0, seq.R(n), seq.R(n - 1)))
            doubling = Fraction(inside)
        rows.append(LevelRatios(n, mass, radius, mass / radius, doubling))
    ratios = [row.doubling_ratio for row in rows if row.doubling_ratio is not None]
    report = AhlforsReport(rows, threshold, min(ratios), max(ratios))
    report.non_doubling = threshold is not None and report.ratio_max > threshold
    return report


def ahlfors_Y_sample(seq: AnySequence, depth: int, radii: Sequence[float], samples: int,
                     rng: np.random.Generator) -> list[tuple[float, float]]:
    """Monte Carlo ``mu(B_d(0, s)) / s^2`` for the weighted metric ``d`` on ``Y``.

    Haar measure at depth ``L`` is Lebesgue measure on ``[0, R_L)`` rescaled,
    so uniform draws of the coordinate sample it exactly.  Returns
    ``(s, ratio)`` pairs; for bounded ``r_j`` the ratios stay in a fixed band.
    """
    RL = seq.R(depth)
    t = rng.random(samples) * RL
    dist = np.zeros(samples)
    for l in range(depth + 1):
        R = seq.R(l)
        weight = 1.0 if l == 0 else 1.0 / seq.R(l - 1)
        theta = np.mod(t, R) / R
        dist = np.maximum(dist, weight * 2.0 * np.abs(np.sin(np.pi * theta)))
    return [(float(s), float(np.mean(dist <= s)) / float(s) ** 2) for s in radii]
