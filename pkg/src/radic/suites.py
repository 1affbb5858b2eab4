"""Seeded verification suites, one per module invariant block.

Every suite draws from its own PCG64 stream seeded by ``(seed, suite index)``
so suites can run in any order, or in parallel, without changing results.
Sampling: residues are uniform mod ``R_L`` (or shifted by a random multiple
of a random ``R_k`` to reach every disagreement level); reals ``a, b`` are
uniform rationals with denominators up to 64.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import characters as ch
from . import equivalence as eq
from . import filtration as fl
from . import measure as ms
from .markers import AtLeast, lower, upper
from .modulus import AnySequence, ModulusSequence
from .serialize import encode
from .solenoid import (
    map_A, metric_D, metric_Delta, metric_d, point, verify_lipschitz_A,
)
from .tower import RadicInteger, first_disagreement, first_disagreement_array, rho

SUITES = ("ultrametric", "lipschitz", "measure", "characters", "equivalence", "filtration")
TOL = 1e-9


@dataclass
class VerifyReport:
    suite: str
    samples: int = 0
    violations: list[dict] = field(default_factory=list)
    worst_ratio: float = 0.0
    constant: str = "1"
    runtime_ms: float | None = None

    @property
    def passed(self) -> bool:
        return not self.violations

    def violate(self, check: str, **witness) -> None:
        self.violations.append({"check": check, **{k: encode(v) for k, v in witness.items()}})

    def to_json(self) -> dict:
        out = {"suite": self.suite, "samples": self.samples, "passed": self.passed,
               "violations": self.violations, "worst_ratio": self.worst_ratio,
               "constant": self.constant}
        if self.runtime_ms is not None:
            out["runtime_ms"] = self.runtime_ms
        return out


def make_rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, SUITES.index(suite)])))


def rand_below(rng: np.random.Generator, n: int) -> int:
    if n < 1 << 62:
        return int(rng.integers(0, n))
    return int.from_bytes(rng.bytes(n.bit_length() // 8 + 8), "little") % n


def rand_near(rng: np.random.Generator, seq: AnySequence, L: int, x: int) -> int:
    """A residue agreeing with ``x`` through a random level."""
    k = int(rng.integers(0, L + 1))
    return (x + seq.R(k) * rand_below(rng, seq.R(L))) % seq.R(L)


def rand_real(rng: np.random.Generator, span: int = 2) -> Fraction:
    den = int(rng.integers(1, 65))
    return Fraction(int(rng.integers(-span * den, span * den)), den)


# ---------------------------------------------------------------- ultrametric

def check_ultrametric(seq: AnySequence, depth: int, triples: np.ndarray, report: VerifyReport,
                      scalar: int = 500) -> None:
    """Strong triangle inequality for ``rho`` on residue triples.

    Since ``rho = 1/R_{l-1}`` decreases in ``l``, the inequality reads
    ``l(x,z) >= min(l(x,y), l(y,z))`` on integer levels; the first ``scalar``
    triples are rechecked through the exact rational API.
    """
    xs, ys, zs = triples.T
    lxy = first_disagreement_array(seq, depth, xs, ys)
    lyz = first_disagreement_array(seq, depth, ys, zs)
    lxz = first_disagreement_array(seq, depth, xs, zs)
    bad = np.nonzero(lxz < np.minimum(lxy, lyz))[0]
    for i in bad[:10]:
        report.violate("rho(x,z) <= max(rho(x,y), rho(y,z))", x=int(xs[i]), y=int(ys[i]), z=int(zs[i]))
    for x, y, z in triples[:scalar].tolist():
        X, Y, Z = (RadicInteger(seq, depth, v) for v in (x, y, z))
        lhs, rhs = upper(rho(X, Z)), max(upper(rho(X, Y)), upper(rho(Y, Z)))
        report.worst_ratio = max(report.worst_ratio, float(lhs / rhs))
        if lhs > rhs:
            report.violate("rho(x,z) <= max(rho(x,y), rho(y,z))", x=x, y=y, z=z)
        w = (x + z) % X.modulus
        if rho(RadicInteger(seq, depth, w), RadicInteger(seq, depth, (y + z) % X.modulus)) != rho(X, Y):
            report.violate("rho(x+z, y+z) = rho(x,y)", x=x, y=y, z=z)
    report.samples += len(triples)


def suite_ultrametric(seq, samples, rng, depth=12) -> VerifyReport:
    report = VerifyReport("ultrametric")
    RL = seq.R(depth)
    xs = [rand_below(rng, RL) for _ in range(samples)]
    ys = [rand_near(rng, seq, depth, x) for x in xs]
    zs = [rand_near(rng, seq, depth, y) for y in ys]
    check_ultrametric(seq, depth, np.array([xs, ys, zs], dtype=object).T.astype(np.int64), report)
    return report


# ----------------------------------------------------------------- lipschitz

def check_Y0_comparison(seq, depth, pairs, report: VerifyReport) -> None:
    """``c(l) rho <= d <= 2 rho`` on ``Y_0`` with ``c(l) = |exp(2 pi i / r_l) - 1|``."""
    for x, y in pairs:
        X, Y = RadicInteger(seq, depth, x), RadicInteger(seq, depth, y)
        d = metric_d(point(seq, depth, x), point(seq, depth, y)).value
        r = float(lower(rho(X, Y)))
        if d > 2 * r + TOL:
            report.violate("d <= 2 rho", x=x, y=y, d=d, rho=r)
        l = first_disagreement(X, Y)
        if not isinstance(l, AtLeast):
            c = 2 * math.sin(math.pi / seq.r(l))
            if d < c * r - TOL:
                report.violate("d >= |exp(2 pi i/r_l) - 1| rho", x=x, y=y, d=d, rho=r)
        report.samples += 1


def check_quotient(seq, depth, samples, report: VerifyReport) -> None:
    """``Delta <= D``, ``D <= 2 Delta`` for ``|a-b| <= 1/2``, ``Delta <= 1``, ``Delta = rho`` on ``Y_0``."""
    half = Fraction(1, 2)
    for (a, x), (b, y) in samples:
        u, v = map_A(a, x), map_A(b, y)
        delta = metric_Delta(u, v)
        D = metric_D((a, x), (b, y))
        if lower(delta) > lower(D):
            report.violate("Delta <= D", a=a, x=x.residue, b=b, y=y.residue)
        if abs(a - b) <= half and lower(D) > 2 * lower(delta):
            report.violate("D <= 2 Delta", a=a, x=x.residue, b=b, y=y.residue)
        if upper(delta) > 1:
            report.violate("Delta <= 1", a=a, x=x.residue, b=b, y=y.residue)
        if a.denominator == 1 and b.denominator == 1:
            xi, yi = map_A(0, x), map_A(0, y)
            if metric_Delta(xi, yi) != rho(x, y):
                report.violate("Delta = rho on Y_0", x=x.residue, y=y.residue)
        report.samples += 1


def lipschitz_samples(seq, depth, n, rng):
    RL = seq.R(depth)
    out = []
    for _ in range(n):
        x = rand_below(rng, RL)
        y = x if rng.random() < 0.25 else rand_near(rng, seq, depth, x)
        a = rand_real(rng)
        b = a + rand_real(rng, 1) if rng.random() < 0.75 else rand_real(rng)
        if rng.random() < 0.1:
            a, b = Fraction(math.floor(a)), Fraction(math.floor(b))
        out.append(((a, RadicInteger(seq, depth, x)), (b, RadicInteger(seq, depth, y))))
    return out


def suite_lipschitz(seq, samples, rng, depth=8) -> VerifyReport:
    report = VerifyReport("lipschitz", constant="2π")
    pairs = lipschitz_samples(seq, depth, samples, rng)
    lip = verify_lipschitz_A(pairs, TOL)
    report.samples += lip.samples
    report.worst_ratio = lip.max_upper_ratio
    for w in lip.violations:
        report.violate(w.check, a=w.a, x=w.x, b=w.b, y=w.y, lhs=w.lhs, rhs=w.rhs)

    zero = RadicInteger(seq, depth, 0)
    tight = metric_d(map_A(0, zero), map_A(Fraction(1, 2), zero)).value
    if abs(tight - 2) > TOL:
        report.violate("d = 2 at a=0, b=1/2", d=tight)
    step = Fraction(1, 10_000)
    limit = metric_d(map_A(0, zero), map_A(step, zero)).value / float(step)
    if abs(limit - 2 * math.pi) > 1e-3 or limit > 2 * math.pi:
        report.violate("d/|a-b| -> 2 pi from below", ratio=limit)

    check_Y0_comparison(seq, depth, [(p[0][1].residue, p[1][1].residue) for p in pairs], report)
    check_quotient(seq, depth, pairs, report)
    return report


# ------------------------------------------------------------------- measure

def suite_measure(seq, samples, rng, depth=12) -> VerifyReport:
    report = VerifyReport("measure")
    worst = Fraction(0)
    for n in range(depth + 1):
        mass = ms.haar_Y0(ms.CellSet(seq, n, frozenset({0})))
        worst = max(worst, mass * seq.R(n))
        if mass * seq.R(n) != 1 or mass != ms.ball_measure_Y0(seq, n):
            report.violate("mu_0(Y_n) = 1/R_n", n=n, measure=mass)
        for k in range(n, n + 5):
            est = ms.hausdorff_cover_estimate(seq, n, k)
            if est.sum_of_diameters != Fraction(1, seq.R(n)):
                report.violate("H^1 cover sum = 1/R_n", n=n, k=k, total=est.sum_of_diameters)
        report.samples += 1
    probe = ms.ahlfors_probe(seq, depth)
    for row in probe.per_level:
        if row.regularity_ratio != 1:
            report.violate("mu_0(B)/radius = 1", n=row.level)
        if row.level and row.doubling_ratio != seq.r(row.level):
            report.violate("doubling ratio = r_n", n=row.level, ratio=row.doubling_ratio)
    level = max(l for l in range(depth + 1) if seq.R(l) <= 256)
    for _ in range(min(samples, 200)):
        cells = ms.CellSet(seq, level, frozenset(c for c in range(seq.R(level)) if rng.random() < 0.5))
        m = ms.haar_Y0(cells)
        if ms.haar_Y0(ms.refine(cells)) != m:
            report.violate("refinement preserves mu_0", cells=cells)
        if ms.haar_Y0(ms.translate(cells, rand_below(rng, seq.R(level)))) != m:
            report.violate("translation preserves mu_0", cells=cells)
        start = rand_real(rng, seq.R(level))
        arcs = ms.ArcSet(seq, level, ((start, start + Fraction(rand_below(rng, 64 * seq.R(level)) + 1, 64)),))
        if ms.haar_Y_cylinder(ms.refine_arcs(arcs)) != ms.haar_Y_cylinder(arcs):
            report.violate("refinement preserves mu", arcs=arcs)
        report.samples += 1
    report.worst_ratio = float(worst)
    return report


# ---------------------------------------------------------------- characters

def character_signature(chi: ch.Character, depth: int, probes) -> tuple[Fraction, ...]:
    return tuple(ch.char_angle(chi, p) for p in probes)


def check_canonical_uniqueness(seq, max_level: int, max_freq: int, report: VerifyReport) -> None:
    """Canonical forms agree exactly when evaluations agree on a separating grid.

    Two characters written at level ``L`` with frequencies ``N != N'`` differ
    at ``t = k/M`` for some ``k`` as soon as ``M R_L > |N - N'|``.
    """
    L = max_level
    M = 2 * max_freq * seq.R(L) + 1
    probes = [point(seq, L, Fraction(1, M)), *(point(seq, L, k) for k in range(seq.R(L)))]
    by_sig: dict = {}
    for l in range(L + 1):
        for n in range(-max_freq, max_freq + 1):
            canon = ch.canonicalize(seq, l, n)
            if ch.canonicalize(seq, canon.level, canon.n) != canon:
                report.violate("canonicalize is idempotent", level=l, n=n)
            by_sig.setdefault(character_signature(ch.Character(seq, l, n), L, probes), set()).add(canon)
            report.samples += 1
    forms = [f for group in by_sig.values() for f in group]
    if any(len(group) != 1 for group in by_sig.values()) or len(forms) != len(set(forms)):
        report.violate("canonical forms <-> evaluations", groups=len(by_sig))


def suite_characters(seq, samples, rng, depth=3) -> VerifyReport:
    report = VerifyReport("characters")
    check_canonical_uniqueness(seq, depth, 2 * seq.R(depth), report)
    L = depth + 2
    worst = 0.0
    for _ in range(samples):
        chi = ch.canonicalize(seq, int(rng.integers(0, depth + 1)), int(rng.integers(-50, 51)))
        psi = ch.canonicalize(seq, int(rng.integers(0, depth + 1)), int(rng.integers(-50, 51)))
        u = point(seq, L, rand_real(rng, seq.R(L)))
        v = point(seq, L, rand_real(rng, seq.R(L)))
        if ch.char_angle(chi, u + v) != (ch.char_angle(chi, u) + ch.char_angle(chi, v)) % 1:
            report.violate("chi(u+v) = chi(u) chi(v)", chi=chi, u=u, v=v)
        if ch.char_angle(ch.char_mul(chi, psi), u) != (ch.char_angle(chi, u) + ch.char_angle(psi, u)) % 1:
            report.violate("(chi psi)(u) = chi(u) psi(u)", chi=chi, psi=psi, u=u)
        worst = max(worst, abs(ch.char_eval(chi, u).complex))
        report.samples += 1
    for l in range(depth + 1):
        for n in range(-seq.R(l), seq.R(l) + 1):
            chi = ch.canonicalize(seq, l, n)
            m = ch.constancy_level(chi)
            if m != chi.level or constancy_by_evaluation(chi, L) != m:
                report.violate("constancy level", chi=chi, algebraic=m)
    report.worst_ratio = worst
    return report


def constancy_by_evaluation(chi: ch.Character, L: int) -> int:
    """Smallest ``m`` with ``chi`` constant on the depth-``L`` members of ``Y_m``."""
    seq = chi.seq
    for m in range(L + 1):
        angles = {ch.char_angle(chi, point(seq, L, t)) for t in range(0, seq.R(L), seq.R(m))}
        if len(angles) == 1:
            return m
    return L + 1


# --------------------------------------------------------------- equivalence

# Pairs chosen so that every disagreement in the profiles already shows up
# for k <= 8: a failure needs R_k with more factors of p than r' ever has.
EQUIV_PAIRS = [
    ((2,), (), (6,), ()),
    ((2, 3), (), (6,), ()),
    ((6,), (), (2, 3), ()),
    ((2,), (), (3,), ()),
    ((3,), (), (2,), ()),
    ((2,), (), (2, 3), ()),
    ((2, 3), (), (2,), ()),
    ((3,), (4,), (3,), ()),
    ((3,), (), (3,), (4,)),
    ((4,), (), (2,), ()),
    ((2,), (), (4,), ()),
    ((2,), (3,), (2,), ()),
    ((5,), (), (10,), ()),
    ((10,), (), (5,), ()),
    ((3,), (2,), (3,), (4,)),
    ((3,), (8,), (3,), (4,)),
    ((2, 5), (), (10,), ()),
    ((6,), (), (4, 9), ()),
    ((3,), (9,), (2,), (3,)),
    ((2,), (), (2,), (3,)),
]


def equiv_pair(spec) -> tuple[ModulusSequence, ModulusSequence]:
    c1, p1, c2, p2 = spec
    return ModulusSequence(p1, c1), ModulusSequence(p2, c2)


def suite_equivalence(seq, samples, rng, depth=8) -> VerifyReport:
    report = VerifyReport("equivalence")
    agree = 0
    pairs = [equiv_pair(spec) for spec in EQUIV_PAIRS]
    for r, rp in pairs:
        try:
            brute = eq.precedes_bruteforce(r, rp, depth)
        except eq.SearchBoundExceeded:
            report.violate("brute force inconclusive", r=str(r), r_prime=str(rp))
            continue
        if brute == eq.precedes(r, rp):
            agree += 1
        else:
            report.violate("precedes = brute force", r=str(r), r_prime=str(rp), brute=brute)
        report.samples += 1
    if not eq.equivalent(ModulusSequence.periodic(2, 3), ModulusSequence.constant(6)):
        report.violate("(2,3)^inf ~ 6^inf")
    L = max(l for l in range(1, 64) if seq.R(l) <= 1024)
    RL = seq.R(L)
    images = set()
    for res in range(RL):
        x = RadicInteger(seq, L, res)
        parts = eq.crt_decompose(x)
        images.add(parts)
        if eq.crt_recompose(parts, seq, L) != x:
            report.violate("recompose(decompose(x)) = x", residue=res)
    if len(images) != RL:
        report.violate("decompose is injective", images=len(images))
    moduli = [q for _, q in eq.crt_moduli(seq, L)]
    for _ in range(samples):
        x = RadicInteger(seq, L, rand_below(rng, RL))
        y = RadicInteger(seq, L, rand_below(rng, RL))
        dx, dy = eq.crt_decompose(x), eq.crt_decompose(y)
        if eq.crt_decompose(x + y) != tuple((a + b) % q for a, b, q in zip(dx, dy, moduli)) or \
                eq.crt_decompose(x * y) != tuple((a * b) % q for a, b, q in zip(dx, dy, moduli)):
            report.violate("decompose is a ring homomorphism", x=x.residue, y=y.residue)
        report.samples += 1
    report.worst_ratio = agree / len(pairs)
    return report


# ---------------------------------------------------------------- filtration

def random_step(seq, depth, rng, high=10) -> fl.StepFunction:
    vals = rng.integers(0, high + 1, size=seq.R(depth))
    vals[rng.random(seq.R(depth)) < 0.5] = 0
    return fl.StepFunction(seq, depth, tuple(Fraction(int(v)) for v in vals))


def suite_filtration(seq, samples, rng, depth=None) -> VerifyReport:
    report = VerifyReport("filtration")
    L = depth if depth is not None else max(l for l in range(1, 64) if seq.R(l) <= 64)
    worst = Fraction(0)
    for i in range(samples):
        f = random_step(seq, L, rng)
        if not any(f.values):
            f = fl.StepFunction.constant(seq, L, 1)
        if i < 50:
            check_martingale_laws(f, report)
        lam = Fraction(int(rng.integers(1, 41)), 4)
        weak = fl.weak_11_check(f, lam)
        if not weak.passed:
            report.violate("mu_0{Mf > lam} <= ||f||_1/lam", f=f.values, lam=lam,
                           measure=weak.level_set_measure, bound=weak.bound)
        worst = max(worst, weak.level_set_measure / weak.bound)
        report.samples += 1
    report.worst_ratio = float(worst)
    return report


def check_martingale_laws(f: fl.StepFunction, report: VerifyReport) -> None:
    L = f.depth
    E = [fl.cond_expect(f, n) for n in range(L + 1)]
    for n in range(L + 1):
        if E[n].integral() != f.integral():
            report.violate("E_n preserves the integral", n=n)
        if E[n].norm_inf() > f.norm_inf() or E[n].norm1() > f.norm1():
            report.violate("E_n is a contraction", n=n)
        for m in range(L + 1):
            if fl.cond_expect(E[m], n) != E[min(n, m)]:
                report.violate("E_n E_m = E_min(n,m)", n=n, m=m)
    diffs = fl.martingale_diffs(f)
    total = diffs[0]
    for d in diffs[1:]:
        total = total + d
    if total != f:
        report.violate("martingale differences sum to f")
    if f.inner(f) != sum((d.inner(d) for d in diffs), Fraction(0)):
        report.violate("Pythagoras for martingale differences")
    for i in range(len(diffs)):
        for j in range(i + 1, len(diffs)):
            if diffs[i].inner(diffs[j]) != 0:
                report.violate("martingale differences are orthogonal", i=i, j=j)


RUNNERS: dict[str, Callable] = {
    "ultrametric": suite_ultrametric,
    "lipschitz": suite_lipschitz,
    "measure": suite_measure,
    "characters": suite_characters,
    "equivalence": suite_equivalence,
    "filtration": suite_filtration,
}


def run_suite(name: str, seq: AnySequence, seed: int, samples: int, depth: int | None = None,
              timing: bool = False) -> VerifyReport:
    if name not in RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    rng = make_rng(seed, name)
    start = time.perf_counter()
    kwargs = {} if depth is None else {"depth": depth}
    report = RUNNERS[name](seq, samples, rng, **kwargs)
    if timing:
        report.runtime_ms = round((time.perf_counter() - start) * 1000, 3)
    return report
