import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radic.filtration import (
    NegativeInput, StepFunction, YGridFunction, cond_expect, level_approx_Y, martingale_diffs,
    maximal_function, weak_11_check,
)
from radic.modulus import ModulusSequence
from radic.tower import DepthMismatch

from conftest import seqs

TWO = ModulusSequence.constant(2)
TWO_THREE = ModulusSequence.periodic(2, 3)


def depth_for(seq, limit=64):
    return max(l for l in range(1, 20) if seq.R(l) <= limit)


def averaging_oracle(f, n):
    """Average over the residues sharing c mod R_n, by a direct membership scan."""
    Rn = f.seq.R(n)
    out = []
    for c in range(f.size):
        cell = [f.values[d] for d in range(f.size) if d % Rn == c % Rn]
        out.append(sum(cell, Fraction(0)) / len(cell))
    return tuple(out)


@st.composite
def step_functions(draw, nonneg=False, limit=64):
    seq = draw(seqs)
    L = draw(st.integers(1, depth_for(seq, limit)))
    lo = 0 if nonneg else -20
    vals = draw(st.lists(st.fractions(min_value=lo, max_value=20, max_denominator=6),
                         min_size=seq.R(L), max_size=seq.R(L)))
    return StepFunction(seq, L, tuple(vals))


def indicator(seq, L, cells, height=1):
    return StepFunction(seq, L, tuple(Fraction(height) if c in cells else Fraction(0) for c in range(seq.R(L))))


# ---- conditional expectation

def test_cond_expect_examples():
    f = StepFunction.constant(TWO, 3, Fraction(5, 2))
    assert cond_expect(f, 1) == f
    g = indicator(TWO, 2, {0})
    assert cond_expect(g, 1).values == (Fraction(1, 2), 0, Fraction(1, 2), 0)
    with pytest.raises(DepthMismatch):
        cond_expect(g, 3)


@given(step_functions(), st.data())
def test_cond_expect_matches_oracle(f, data):
    n = data.draw(st.integers(0, f.depth))
    assert cond_expect(f, n).values == averaging_oracle(f, n)


@given(step_functions())
def test_tower_property_integral_and_contraction(f):
    E = [cond_expect(f, n) for n in range(f.depth + 1)]
    for n, m in itertools.product(range(f.depth + 1), repeat=2):
        assert cond_expect(E[m], n) == E[min(n, m)]
    for e in E:
        assert e.integral() == f.integral()
        assert e.norm_inf() <= f.norm_inf()
        assert e.norm1() <= f.norm1()
    assert E[-1] == f


# ---- martingale differences

def test_constant_martingale():
    f = StepFunction.constant(TWO_THREE, 3, 4)
    diffs = martingale_diffs(f)
    assert diffs[0] == f
    assert all(not any(d.values) for d in diffs[1:])


@given(step_functions())
def test_martingale_telescopes_orthogonal_pythagoras(f):
    diffs = martingale_diffs(f)
    assert len(diffs) == f.depth + 1
    total = diffs[0]
    for d in diffs[1:]:
        total = total + d
    assert total == f
    for i, j in itertools.combinations(range(len(diffs)), 2):
        assert diffs[i].inner(diffs[j]) == 0
    assert f.inner(f) == sum((d.inner(d) for d in diffs), Fraction(0))


# ---- maximal function and weak (1,1)

def test_maximal_function_examples():
    f = indicator(TWO, 2, {0}, height=4)
    assert maximal_function(f).values == (4, 1, 2, 1)
    c = StepFunction.constant(TWO, 3, 7)
    assert maximal_function(c) == c
    with pytest.raises(NegativeInput):
        maximal_function(StepFunction(TWO, 1, (1, -1)))


@given(step_functions(nonneg=True))
def test_maximal_function_dominates_every_average(f):
    Mf = maximal_function(f)
    for n in range(f.depth + 1):
        assert all(m >= e for m, e in zip(Mf.values, cond_expect(f, n).values))
    assert max(Mf.values) == max(f.values)


def test_weak_11_example():
    f = indicator(TWO, 2, {0}, height=4)
    report = weak_11_check(f, Fraction(3, 2))
    assert [(b.level, b.cell) for b in report.level_set] == [(1, 0)]
    assert report.level_set_measure == Fraction(1, 2)
    assert report.bound == Fraction(2, 3)
    assert report.passed


def test_weak_11_above_max_is_empty():
    f = indicator(TWO_THREE, 3, {0, 5}, height=3)
    report = weak_11_check(f, 3)
    assert report.level_set == [] and report.level_set_measure == 0 and report.passed


@given(step_functions(nonneg=True), st.fractions(min_value=Fraction(1, 8), max_value=30, max_denominator=8))
def test_weak_11_constant_one(f, lam):
    report = weak_11_check(f, lam)
    Mf = maximal_function(f)
    direct = Fraction(sum(1 for v in Mf.values if v > lam), f.size)
    assert report.level_set_measure == direct
    assert direct <= f.norm1() / lam
    assert report.passed


# ---- approximation on Y

def character_grid(seq, depth, level, n, m=8):
    return YGridFunction.from_function(
        seq, depth, m, lambda t: np.cos(2 * np.pi * n * np.mod(t, seq.R(level)) / seq.R(level)))


def test_measurable_function_has_zero_error():
    f = character_grid(TWO, 3, 1, 1)
    rows = level_approx_Y(f)
    assert rows[1].cond_expect_error == pytest.approx(0, abs=1e-12)
    assert rows[3].cond_expect_error == pytest.approx(0, abs=1e-12)


def test_character_real_part():
    rows = level_approx_Y(character_grid(TWO, 3, 2, 1))
    assert rows[2].cond_expect_error == pytest.approx(0, abs=1e-12)
    assert rows[1].cond_expect_error == pytest.approx(1, abs=1e-12)


def test_best_error_is_monotone_on_random_grids():
    rng = np.random.default_rng(11)
    for seq in (TWO, TWO_THREE):
        for _ in range(50):
            f = YGridFunction(seq, 3, 4, rng.normal(size=4 * seq.R(3)))
            best = [row.best_error for row in level_approx_Y(f)]
            assert all(a >= b - 1e-12 for a, b in zip(best, best[1:]))
            assert best[-1] == 0
            assert all(row.best_error <= row.cond_expect_error + 1e-12 for row in level_approx_Y(f))


def test_cond_expect_error_can_increase():
    # one level-0 fibre of (2,3)^inf at depth 2: children {1,-1,-1} and {1,1,-1}
    seq = TWO_THREE
    values = np.zeros(6)
    # residue c lies in level-1 cell c mod 2; cell 0 = {0,2,4}, cell 1 = {1,3,5}
    values[[0, 2, 4]] = [1, -1, -1]
    values[[1, 3, 5]] = [1, 1, -1]
    rows = level_approx_Y(YGridFunction(seq, 2, 1, values))
    assert rows[0].cond_expect_error == pytest.approx(1)
    assert rows[1].cond_expect_error == pytest.approx(Fraction(4, 3))
    assert rows[0].best_error == rows[1].best_error == 1
