import itertools
import math

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.ntheory.modular import crt

from radic.equivalence import (
    ModuliMismatch, PrimeProfile, SearchBoundExceeded, crt_decompose, crt_factorization, crt_moduli,
    crt_recompose, equivalent, factorize, precedes, precedes_bruteforce, prime_profile, transition_level,
)
from radic.markers import INF
from radic.modulus import CappedSequence, ModulusSequence
from radic.suites import EQUIV_PAIRS, equiv_pair
from radic.tower import RadicInteger, embed_int

from conftest import small_seqs

TWO = ModulusSequence.constant(2)
TWO_THREE = ModulusSequence.periodic(2, 3)
SIX = ModulusSequence.constant(6)


def oracle_profile(seq, depth=40):
    """c(p) from sympy factorizations: growth over a full cycle means infinity."""
    early = sympy.factorint(seq.R(depth))
    late = sympy.factorint(seq.R(depth + len(seq.cycle)))
    return {p: (INF if late.get(p, 0) > c else c) for p, c in early.items()}


@given(st.integers(1, 10**7))
def test_factorize_matches_sympy(n):
    assert factorize(n) == sympy.factorint(n)


def test_profile_examples():
    p = prime_profile(ModulusSequence((4,), (3,)))
    assert (p.c(2), p.c(3), p.c(5)) == (2, INF, 0)
    assert prime_profile(ModulusSequence.constant(7)).to_json() == {"7": "inf"}
    six = prime_profile(SIX)
    assert six.c(2) is INF and six.c(3) is INF


@given(small_seqs)
def test_profile_matches_oracle(seq):
    assert dict(prime_profile(seq).counts) == oracle_profile(seq)


def test_exact_profile_needs_infinity():
    with pytest.raises(ValueError):
        PrimeProfile(((2, 3),))


def test_capped_profile_is_a_lower_bound():
    seq = CappedSequence.from_function(lambda j: j + 1, 6)
    profile = prime_profile(seq)
    assert profile.lower_bound
    assert dict(profile.counts) == sympy.factorint(math.factorial(7))


def test_precedes_examples():
    assert equivalent(TWO_THREE, SIX)
    assert precedes(TWO, TWO_THREE) and not equivalent(TWO, TWO_THREE)
    assert not precedes(TWO_THREE, TWO)
    assert precedes(TWO_THREE, TWO_THREE)


def test_bruteforce_examples():
    assert precedes_bruteforce(TWO_THREE, SIX, 6) and precedes_bruteforce(SIX, TWO_THREE, 6)
    assert precedes_bruteforce(TWO, TWO_THREE, 6) and not precedes_bruteforce(TWO_THREE, TWO, 6)
    assert not precedes_bruteforce(TWO, ModulusSequence.constant(3), 3)
    for seq in (TWO, TWO_THREE, SIX, ModulusSequence((4,), (3,))):
        assert precedes_bruteforce(seq, seq, 8)
        assert all(transition_level(seq, seq, k) == k for k in range(1, 9))


def test_bruteforce_inconclusive_without_certificate():
    capped = CappedSequence((3, 3, 3, 3))
    with pytest.raises(SearchBoundExceeded):
        precedes_bruteforce(TWO, capped, 2, search_bound=4)


def test_truncation_can_hide_a_failure():
    # 2^inf is not coarser than 256|3^inf, but no R_k with k <= 8 sees the difference
    late = ModulusSequence((256,), (3,))
    assert not precedes(TWO, late)
    assert precedes_bruteforce(TWO, late, 8)
    assert not precedes_bruteforce(TWO, late, 9)


@pytest.mark.parametrize("spec", EQUIV_PAIRS, ids=[f"{s}" for s in range(len(EQUIV_PAIRS))])
def test_profile_agrees_with_bruteforce_on_designed_pairs(spec):
    r, rp = equiv_pair(spec)
    assert precedes_bruteforce(r, rp, 8) == precedes(r, rp)


@given(small_seqs, small_seqs)
def test_profile_agrees_with_bruteforce_when_depth_suffices(r, rp):
    # depth past every prefix and large enough to exceed each finite count of r'
    finite = [c for _, c in prime_profile(rp).counts if c is not INF]
    depth = len(r.prefix) + len(r.cycle) * (max(finite, default=0) + 1) + 1
    assert precedes_bruteforce(r, rp, depth, search_bound=200) == precedes(r, rp)


family = [TWO, TWO_THREE, SIX, ModulusSequence.periodic(3, 2), ModulusSequence.constant(4),
          ModulusSequence((4,), (3,)), ModulusSequence((2,), (3,)), ModulusSequence.periodic(4, 9),
          ModulusSequence.constant(3)]


def test_equivalence_is_an_equivalence_relation():
    for a in family:
        assert equivalent(a, a)
    for a, b in itertools.product(family, repeat=2):
        assert equivalent(a, b) == equivalent(b, a)
    for a, b, c in itertools.product(family, repeat=3):
        if equivalent(a, b) and equivalent(b, c):
            assert equivalent(a, c)


@given(small_seqs, small_seqs, st.integers(1, 4))
def test_reduction_hom_is_well_defined_and_onto(r, rp, k):
    if not precedes(r, rp):
        return
    l = transition_level(r, rp, k, search_bound=200)
    assert l is not None
    Rk, Rl = r.R(k), rp.R(l)
    if Rl > 20000:
        return
    # residue mod R'_l -> residue mod R_k respects + and * and hits everything
    images = {a % Rk for a in range(Rl)}
    assert images == set(range(Rk))
    for a, b in [(3, 5), (Rl - 1, 2), (7, 11)]:
        assert ((a + b) % Rl) % Rk == (a % Rk + b % Rk) % Rk
        assert ((a * b) % Rl) % Rk == ((a % Rk) * (b % Rk)) % Rk


# ---- CRT

def test_crt_example():
    x = embed_int(TWO_THREE, 7, 2)
    assert crt_decompose(x) == (1, 1)
    assert crt_recompose((1, 1), TWO_THREE, 2).residue == 1 == 7 % 6
    assert crt_decompose(embed_int(TWO_THREE, 0, 5)) == (0, 0)


def test_crt_factorization_layout():
    fac = crt_factorization(prime_profile(ModulusSequence((4, 5), (3,))))
    assert fac.finite_factors == ((2, 2), (5, 1))
    assert fac.infinite_primes == (3,)


def test_recompose_wrong_arity():
    with pytest.raises(ModuliMismatch):
        crt_recompose((1,), TWO_THREE, 2)


@pytest.mark.parametrize("seq", [TWO_THREE, SIX, ModulusSequence((4,), (3,)), ModulusSequence((2, 5), (3, 2))])
def test_crt_bijective_and_homomorphic(seq):
    L = max(l for l in range(1, 30) if seq.R(l) <= 1024)
    RL = seq.R(L)
    moduli = [q for _, q in crt_moduli(seq, L)]
    assert math.prod(moduli) == RL
    seen = set()
    for res in range(RL):
        parts = crt_decompose(RadicInteger(seq, L, res))
        assert int(crt(moduli, list(parts))[0]) == res
        assert crt_recompose(parts, seq, L).residue == res
        seen.add(parts)
    assert len(seen) == RL
    for a, b in itertools.product(range(0, RL, max(1, RL // 40)), repeat=2):
        x, y = RadicInteger(seq, L, a), RadicInteger(seq, L, b)
        dx, dy = crt_decompose(x), crt_decompose(y)
        assert crt_decompose(x + y) == tuple((u + v) % q for u, v, q in zip(dx, dy, moduli))
        assert crt_decompose(x * y) == tuple((u * v) % q for u, v, q in zip(dx, dy, moduli))
