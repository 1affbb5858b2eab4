import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radic.markers import AtLeast, Interval, upper
from radic.modulus import ModulusSequence, SequenceMismatch, radic_metric
from radic.tower import (
    DepthMismatch, RadicInteger, embed_int, first_disagreement, first_disagreement_array,
    from_levels, in_subgroup, rho, subgroup_cosets, subgroup_members,
)

from conftest import seqs

TWO = ModulusSequence.constant(2)
TWO_THREE = ModulusSequence.periodic(2, 3)


def scan_disagreement(seq, L, a, b):
    """Independent oracle: reduce both integers level by level."""
    R = 1
    for l in range(1, L + 1):
        R *= seq.r(l)
        if a % R != b % R:
            return l
    return None


# ---- embedding and arithmetic

def test_embed_examples():
    x = embed_int(ModulusSequence.constant(2), 5, 3)
    assert x.residue == 5 and x.levels() == (1, 1, 5)
    assert embed_int(TWO, 0, 4).residue == 0
    assert embed_int(TWO_THREE, -1, 2).residue == 5


def test_arithmetic_examples():
    assert embed_int(TWO, 3, 3) + embed_int(TWO, 4, 3) == embed_int(TWO, 7, 3)
    prod = embed_int(TWO, 3, 3) * embed_int(TWO, 5, 3)
    assert prod == embed_int(TWO, 15, 3) and prod.residue == 7
    assert (-embed_int(TWO_THREE, 1, 2)).residue == 5


def test_mismatches():
    with pytest.raises(DepthMismatch):
        embed_int(TWO, 1, 2) + embed_int(TWO, 1, 3)
    with pytest.raises(SequenceMismatch):
        embed_int(TWO, 1, 2) * embed_int(TWO_THREE, 1, 2)


def test_residue_range_enforced():
    with pytest.raises(ValueError):
        RadicInteger(TWO, 2, 4)


@given(seqs, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(1, 10))
def test_embedding_is_ring_homomorphism(seq, a, b, L):
    qa, qb = embed_int(seq, a, L), embed_int(seq, b, L)
    assert qa + qb == embed_int(seq, a + b, L)
    assert qa * qb == embed_int(seq, a * b, L)
    assert -qa == embed_int(seq, -a, L)


@given(seqs, st.integers(0, 10**6), st.integers(1, 10))
def test_levels_are_coherent_and_rebuild(seq, a, L):
    x = embed_int(seq, a, L)
    levels = x.levels()
    for l in range(1, L):
        assert levels[l] % seq.R(l) == levels[l - 1]
    assert from_levels(seq, levels) == x


def test_incoherent_levels_rejected():
    with pytest.raises(ValueError):
        from_levels(TWO, (1, 2))


@pytest.mark.parametrize("seq, L", [(TWO, 7), (TWO_THREE, 5), (ModulusSequence((4,), (3,)), 4)])
def test_ring_laws_exhaustive(seq, L):
    RL = seq.R(L)
    assert RL <= 512
    xs = [RadicInteger(seq, L, c) for c in range(RL)]
    rng = np.random.default_rng(7)
    zero = RadicInteger(seq, L, 0)
    for x in xs:
        assert x + zero == x and x + (-x) == zero
    # associativity/distributivity over all pairs, third operand sampled per pair
    for x, y in itertools.product(xs, repeat=2):
        z = xs[int(rng.integers(RL))]
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x


# ---- first disagreement and rho

def test_first_disagreement_examples():
    x = embed_int(TWO, 5, 6)
    assert first_disagreement(x, x) == AtLeast(7)
    assert first_disagreement(embed_int(TWO, 5, 6), embed_int(TWO, 1, 6)) == 3
    assert first_disagreement(embed_int(TWO_THREE, 4, 4), embed_int(TWO_THREE, 1, 4)) == 1


def test_rho_examples():
    assert rho(embed_int(TWO, 5, 8), embed_int(TWO, 1, 8)) == radic_metric(TWO, 5, 1, 20) == Fraction(1, 4)
    x = embed_int(TWO, 3, 8)
    assert rho(x, x) == Interval(Fraction(0), Fraction(1, 256))
    assert rho(embed_int(TWO_THREE, 7, 4), embed_int(TWO_THREE, 1, 4)) == Fraction(1, 6)


@given(seqs, st.integers(-5000, 5000), st.integers(-5000, 5000), st.integers(1, 12))
def test_first_disagreement_matches_scan(seq, a, b, L):
    got = first_disagreement(embed_int(seq, a, L), embed_int(seq, b, L))
    expected = scan_disagreement(seq, L, a, b)
    assert got == (AtLeast(L + 1) if expected is None else expected)


@given(seqs, st.integers(1, 10), st.data())
def test_embedding_is_isometry(seq, L, data):
    half = seq.R(L) // 2
    a = data.draw(st.integers(-half, half))
    b = data.draw(st.integers(-half, half))
    if (a - b) % seq.R(L):
        assert rho(embed_int(seq, a, L), embed_int(seq, b, L)) == radic_metric(seq, a, b, L + 1)


residues = st.integers(0, 10**9)


@given(seqs, residues, residues, residues, st.integers(1, 12))
def test_rho_translation_invariant_ultrametric(seq, a, b, c, L):
    x, y, z = (embed_int(seq, v, L) for v in (a, b, c))
    assert rho(x + z, y + z) == rho(x, y)
    assert upper(rho(x, z)) <= max(upper(rho(x, y)), upper(rho(y, z)))


@given(seqs, st.lists(st.tuples(residues, residues), min_size=1, max_size=40), st.integers(1, 12))
def test_vectorised_disagreement(seq, pairs, L):
    xs = [a % seq.R(L) for a, _ in pairs]
    ys = [b % seq.R(L) for _, b in pairs]
    got = first_disagreement_array(seq, L, xs, ys).tolist()
    for x, y, g in zip(xs, ys, got):
        s = first_disagreement(RadicInteger(seq, L, x), RadicInteger(seq, L, y))
        assert g == (L + 1 if isinstance(s, AtLeast) else s)


# ---- subgroups Y_n

def test_subgroup_examples():
    assert all(in_subgroup(embed_int(TWO, a, 3), 0) for a in range(8))
    members = [x.residue for x in subgroup_members(TWO_THREE, 2, 2)]
    assert members == [0]
    assert len(subgroup_cosets(TWO_THREE, 2, 2)) == 6


def test_subgroup_beyond_depth():
    with pytest.raises(DepthMismatch):
        in_subgroup(embed_int(TWO, 1, 2), 3)
    with pytest.raises(DepthMismatch):
        list(subgroup_members(TWO, 3, 2))


@given(seqs, st.integers(1, 6), st.data())
def test_subgroup_membership_is_divisibility(seq, L, data):
    n = data.draw(st.integers(0, L))
    for a in range(0, seq.R(L), max(1, seq.R(L) // 97)):
        assert in_subgroup(embed_int(seq, a, L), n) == (a % seq.R(n) == 0)


@given(seqs, st.integers(1, 6), st.data())
def test_subgroup_is_ideal_and_cosets_partition(seq, L, data):
    n = data.draw(st.integers(0, L))
    x = embed_int(seq, data.draw(st.integers(0, 10**6)), L)
    for y in subgroup_members(seq, n, L):
        assert in_subgroup(x * y, n)
    cosets = subgroup_cosets(seq, n, L)
    assert len(cosets) == seq.R(n)
    owners = [sum(b.contains_point(c) for b in cosets) for c in range(seq.R(L))]
    assert owners == [1] * seq.R(L)
