"""The solenoid ``Y`` at finite depth and the metrics living on it.

A depth-``L`` point is a single rational ``t`` in ``[0, R_L)``; its level-``l``
coordinate in ``R/R_l`` is ``t mod R_l``, so coherence holds by construction.
Everything here is exact except the circle chords, which are evaluated in
double precision with an explicit error budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .markers import Value, lower, vmax, vmin
from .modulus import AnySequence, SequenceMismatch
from .tower import DepthMismatch, RadicInteger, rho

# Absolute error of one chord 2|sin(pi*theta)|: float(theta) is correctly rounded,
# and sin/mul each add under one ulp on values <= 2.
FP_ERROR = 1e-14


@dataclass(frozen=True)
class MetricWeights:
    """A rule ``l -> t_l`` for the weighted product metric ``d``."""

    name: str
    rule: Callable[[AnySequence, int], Fraction] = field(compare=False)

    def t(self, seq: AnySequence, l: int) -> Fraction:
        return self.rule(seq, l)


def _quotient_rule(seq: AnySequence, l: int) -> Fraction:
    return Fraction(1) if l == 0 else Fraction(1, seq.R(l - 1))


def _power_rule(seq: AnySequence, l: int) -> Fraction:
    if not seq.is_constant:
        raise ValueError("power weights r^-l need a constant sequence")
    return Fraction(1, seq.r(1) ** l)


# t_0 = 1, t_l = 1/R_{l-1}: makes d <= 2 rho on Y_0.
QUOTIENT_WEIGHTS = MetricWeights("quotient", _quotient_rule)
# t_l = r^-l, only for constant sequences.
POWER_WEIGHTS = MetricWeights("power", _power_rule)


@dataclass(frozen=True)
class ApproxDistance:
    """A float distance with certified error terms.

    The true distance lies in
    ``[value - fp_error, max(value + fp_error, truncation_bound)]``.
    """

    value: float
    fp_error: float
    truncation_bound: Fraction

    @property
    def lo(self) -> float:
        return self.value - self.fp_error

    @property
    def hi(self) -> float:
        return max(self.value + self.fp_error, float(self.truncation_bound))

    def to_json(self) -> dict:
        return {"value": self.value, "fp_error": self.fp_error,
                "truncation_bound": str(self.truncation_bound)}


@dataclass(frozen=True)
class SolenoidPoint:
    seq: AnySequence
    depth: int
    t: Fraction

    def __post_init__(self):
        t = Fraction(self.t)
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if not 0 <= t < self.seq.R(self.depth):
            raise ValueError(f"coordinate {t} not in [0, R_{self.depth})")
        object.__setattr__(self, "t", t)

    @property
    def modulus(self) -> int:
        return self.seq.R(self.depth)

    def project(self, n: int) -> Fraction:
        """The level-``n`` coordinate in ``R/R_n``, as a rational in ``[0, R_n)``."""
        if not 0 <= n <= self.depth:
            raise DepthMismatch(f"level {n} not visible at depth {self.depth}")
        return self.t % self.seq.R(n)

    def coordinates(self) -> tuple[Fraction, ...]:
        return tuple(self.project(n) for n in range(self.depth + 1))

    def _check(self, other: SolenoidPoint) -> None:
        if self.seq != other.seq:
            raise SequenceMismatch("points use different modulus sequences")
        if self.depth != other.depth:
            raise DepthMismatch(f"depth {self.depth} vs {other.depth}")

    def __add__(self, other: SolenoidPoint) -> SolenoidPoint:
        self._check(other)
        return SolenoidPoint(self.seq, self.depth, (self.t + other.t) % self.modulus)

    def __neg__(self) -> SolenoidPoint:
        return SolenoidPoint(self.seq, self.depth, -self.t % self.modulus)

    def __sub__(self, other: SolenoidPoint) -> SolenoidPoint:
        return self + (-other)

    def to_json(self) -> dict:
        return {"seq": self.seq.to_json(), "depth": self.depth, "t": str(self.t)}


def point(seq: AnySequence, L: int, t) -> SolenoidPoint:
    """The depth-``L`` image of ``q(t)``; ``t`` is reduced into ``[0, R_L)``."""
    return SolenoidPoint(seq, L, Fraction(t) % seq.R(L))


def project(pnt: SolenoidPoint, n: int) -> Fraction:
    return pnt.project(n)


def _chord(theta: Fraction) -> float:
    """``2 |sin(pi theta)|`` for exact ``theta``, folded into ``[0, 1/2]``."""
    return _chord_ratio(theta.numerator, theta.denominator)


def _chord_ratio(p: int, m: int) -> float:
    """``_chord(p/m)`` on integers; ``int / int`` is correctly rounded."""
    rem = p % m
    return 2.0 * math.sin(math.pi * (min(rem, m - rem) / m))


def circle_dist(seq: AnySequence, l: int, u, v) -> ApproxDistance:
    """Chord distance ``|phi_l(u) - phi_l(v)|`` on ``R/R_l``."""
    theta = (Fraction(u) - Fraction(v)) / seq.R(l)
    return ApproxDistance(_chord(theta), FP_ERROR, Fraction(0))


def map_A(a, x: RadicInteger) -> SolenoidPoint:
    """``A(a, x) = q(a) + x``."""
    return SolenoidPoint(x.seq, x.depth, (Fraction(a) + x.residue) % x.modulus)


def canonical_pair(pnt: SolenoidPoint) -> tuple[Fraction, RadicInteger]:
    """The preimage ``(a, x)`` of ``pnt`` under ``A`` with ``a`` in ``[0, 1)``."""
    if pnt.depth < 1:
        raise DepthMismatch("Y_0 needs depth >= 1")
    whole = math.floor(pnt.t)
    return pnt.t - whole, RadicInteger(pnt.seq, pnt.depth, whole % pnt.modulus)


def metric_d(u: SolenoidPoint, v: SolenoidPoint, weights: MetricWeights = QUOTIENT_WEIGHTS) -> ApproxDistance:
    """``max_{0 <= l <= L} t_l d_l(u_l, v_l)`` with the tail bounded by ``2 t_{L+1}``."""
    u._check(v)
    if u.t == v.t:
        return ApproxDistance(0.0, 0.0, Fraction(0))
    seq, L = u.seq, u.depth
    diff = u.t - v.t
    best = 0.0
    for l in range(L + 1):
        best = max(best, float(weights.t(seq, l)) * _chord_ratio(diff.numerator, diff.denominator * seq.R(l)))
    return ApproxDistance(best, FP_ERROR, 2 * weights.t(seq, L + 1))


Pair = tuple[Fraction, RadicInteger]


def metric_D(p1: Pair, p2: Pair) -> Value:
    """``max(|a - b|, rho(x, y))`` on ``R x Y_0``."""
    (a, x), (b, y) = p1, p2
    return vmax(abs(Fraction(a) - Fraction(b)), rho(x, y))


def metric_Delta(u: SolenoidPoint, v: SolenoidPoint) -> Value:
    """The quotient metric: least ``D`` over all ``A``-preimages of ``u`` and ``v``.

    With ``u = A(a, x)`` fixed, the preimages of ``v = A(b, y)`` are
    ``(b + j, y - j)`` for integers ``j``.  Since the answer is at most 1,
    only shifts with ``|a - b - j| <= 1`` can win.
    """
    u._check(v)
    a, x = canonical_pair(u)
    b, y = canonical_pair(v)
    base = math.floor(a - b)
    best = None
    for j in range(base - 1, base + 3):
        shifted = RadicInteger(y.seq, y.depth, (y.residue - j) % y.modulus)
        cand = metric_D((a, x), (b + j, shifted))
        best = cand if best is None else vmin(best, cand)
    return best


@dataclass
class Witness:
    check: str
    a: Fraction
    x: int
    b: Fraction
    y: int
    lhs: float
    rhs: float


class WitnessFound(AssertionError):
    def __init__(self, witness: Witness):
        super().__init__(f"{witness.check} violated at {witness}")
        self.witness = witness


@dataclass
class LipschitzReport:
    samples: int = 0
    max_upper_ratio: float = 0.0
    upper_constant: float = 2 * math.pi
    lower_samples: int = 0
    min_lower_ratio: float = math.inf
    lower_constant: float = 4.0
    c2: float | None = None
    max_c2_ratio: float = 0.0
    violations: list[Witness] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def check(self) -> LipschitzReport:
        if self.violations:
            raise WitnessFound(self.violations[0])
        return self


def chord_constant(seq: AnySequence, L: int) -> float:
    """``min_{l <= L} |exp(2 pi i / r_l) - 1|``, the lower comparison constant on ``Y_0``."""
    return 2.0 * math.sin(math.pi / max(seq.r(l) for l in range(1, L + 1)))


def lipschitz_c2(seq: AnySequence, L: int) -> float:
    """A constant with ``D <= c2 d(A(.), A(.))`` whenever ``|a - b| <= 1/2``.

    Assembled from ``d >= 4 |a - b|`` (so ``c1 = 2/pi``) and
    ``c0 rho <= (1 + 1/c1) d`` with ``c0`` from :func:`chord_constant`.
    """
    c1 = 2.0 / math.pi
    return max((1.0 + 1.0 / c1) / chord_constant(seq, L), 1.0 / (2 * math.pi * c1))


def verify_lipschitz_A(samples: Iterable[tuple[Pair, Pair]], tol: float = 1e-9) -> LipschitzReport:
    """Check the bi-Lipschitz estimates for ``A`` on every sample pair.

    Upper bound ``d <= 2 pi D`` on all pairs; lower bound ``d >= 4 |a - b|``
    and ``D <= c2 d`` on pairs with ``|a - b| <= 1/2``.  Residues are taken as
    the integers they name, so ``x == y`` contributes ``rho = 0``.
    """
    report = LipschitzReport()
    half = Fraction(1, 2)
    for (a, x), (b, y) in samples:
        a, b = Fraction(a), Fraction(b)
        if report.c2 is None:
            report.c2 = lipschitz_c2(x.seq, x.depth)
        report.samples += 1
        d = metric_d(map_A(a, x), map_A(b, y)).value
        D = float(lower(metric_D((a, x), (b, y))))
        gap = float(abs(a - b))

        def fail(check, lhs, rhs):
            report.violations.append(Witness(check, a, x.residue, b, y.residue, lhs, rhs))

        if D > 0:
            report.max_upper_ratio = max(report.max_upper_ratio, d / D)
        if d > report.upper_constant * D + tol:
            fail("d <= 2pi D", d, report.upper_constant * D)
        if abs(a - b) <= half:
            report.lower_samples += 1
            if gap > 0:
                report.min_lower_ratio = min(report.min_lower_ratio, d / gap)
            if d < report.lower_constant * gap - tol:
                fail("d >= 4|a-b|", d, report.lower_constant * gap)
            if d > 0:
                report.max_c2_ratio = max(report.max_c2_ratio, D / d)
            if D > report.c2 * d + tol:
                fail("D <= c2 d", D, report.c2 * d)
    return report
