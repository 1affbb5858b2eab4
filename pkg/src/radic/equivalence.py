"""Prime profiles ``c_r(p)`` and what they say about the topology of ``Z_r``.

``c_r(p)`` is the number of factors ``p`` in ``R_l`` as ``l -> inf``.  Two
sequences give the same topological ring exactly when their profiles agree,
and ``r`` is coarser than ``r'`` when the profile of ``r`` is pointwise
smaller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

from .markers import INF, Infinity
from .modulus import AnySequence, CappedSequence, ModulusSequence
from .tower import RadicInteger

Count = Union[int, Infinity]


class SearchBoundExceeded(RuntimeError):
    """The divisibility search ran out of room before reaching a verdict."""


class ModuliMismatch(ValueError):
    pass


def factorize(n: int) -> dict[int, int]:
    """Trial division; the numbers here are products of small sequence entries."""
    if n < 1:
        raise ValueError("need n >= 1")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _le(a: Count, b: Count) -> bool:
    if b is INF:
        return True
    return a is not INF and a <= b


@dataclass(frozen=True)
class PrimeProfile:
    """``p -> c_r(p)``; primes outside ``counts`` have ``c = 0``.

    ``lower_bound`` marks profiles of capped sequences, which only see the
    first ``cap`` entries.
    """

    counts: tuple[tuple[int, Count], ...]
    lower_bound: bool = False

    def __post_init__(self):
        counts = tuple(sorted((p, c) for p, c in self.counts if c is INF or c > 0))
        if not self.lower_bound and not any(c is INF for _, c in counts):
            raise ValueError("an exact profile of an infinite sequence needs some c = inf")
        object.__setattr__(self, "counts", counts)

    def c(self, p: int) -> Count:
        return dict(self.counts).get(p, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.counts)

    def to_json(self) -> dict:
        return {str(p): ("inf" if c is INF else c) for p, c in self.counts}


def prime_profile(seq: AnySequence) -> PrimeProfile:
    if isinstance(seq, CappedSequence):
        return PrimeProfile(tuple(factorize(seq.R(seq.cap)).items()), lower_bound=True)
    looping = factorize(math.prod(seq.cycle))
    fixed = factorize(math.prod(seq.prefix))
    counts = {p: INF for p in looping}
    for p, c in fixed.items():
        counts.setdefault(p, c)
    return PrimeProfile(tuple(counts.items()))


def _profile(x) -> PrimeProfile:
    return x if isinstance(x, PrimeProfile) else prime_profile(x)


def precedes(r, r_prime) -> bool:
    """``r < r'``: ``c_r(p) <= c_{r'}(p)`` for every prime ``p``."""
    a, b = _profile(r), _profile(r_prime)
    return all(_le(a.c(p), b.c(p)) for p in set(a.support) | set(b.support))


def equivalent(r, r_prime) -> bool:
    return precedes(r, r_prime) and precedes(r_prime, r)


def transition_level(r: AnySequence, r_prime: AnySequence, k: int, search_bound: int = 64) -> int | None:
    """Smallest ``l <= search_bound`` with ``R_k | R'_l``, or ``None``."""
    Rk = r.R(k)
    for l in range(search_bound + 1):
        if r_prime.R(l) % Rk == 0:
            return l
    return None


def precedes_bruteforce(r: AnySequence, r_prime: AnySequence, depth: int, search_bound: int = 64) -> bool:
    """``r < r'`` checked directly on ``k <= depth``: some ``R'_l`` is a multiple of ``R_k``.

    A failure is certified once ``gcd(R_k, R'_l)`` repeats across one full
    cycle of ``r'`` past its prefix: from then on no new factors can appear.
    Without a certificate the search gives up with :class:`SearchBoundExceeded`.
    """
    for k in range(1, depth + 1):
        Rk = r.R(k)
        period = len(r_prime.cycle) if isinstance(r_prime, ModulusSequence) else None
        settled = len(r_prime.prefix) if period else None
        found = False
        for l in range(search_bound + 1):
            if r_prime.R(l) % Rk == 0:
                found = True
                break
            if period and l >= settled and l + period <= search_bound:
                if math.gcd(Rk, r_prime.R(l)) == math.gcd(Rk, r_prime.R(l + period)):
                    return False
        if not found:
            raise SearchBoundExceeded(f"no verdict for k={k} within l <= {search_bound}")
    return True


@dataclass(frozen=True)
class CrtFactorization:
    finite_factors: tuple[tuple[int, int], ...]
    infinite_primes: tuple[int, ...]


def crt_factorization(profile: PrimeProfile) -> CrtFactorization:
    finite = tuple((p, c) for p, c in profile.counts if c is not INF)
    infinite = tuple(p for p, c in profile.counts if c is INF)
    return CrtFactorization(finite, infinite)


def crt_moduli(seq: AnySequence, L: int) -> tuple[tuple[int, int], ...]:
    """``(p, p^{v_p(R_L)})`` for each prime of the profile that divides ``R_L``."""
    RL = seq.R(L)
    profile = prime_profile(seq)
    out = []
    for p in profile.support:
        v = 0
        m = RL
        while m % p == 0:
            m //= p
            v += 1
        if v:
            out.append((p, p**v))
    if math.prod(q for _, q in out) != RL:
        raise ModuliMismatch(f"R_{L} = {RL} has factors outside the profile")
    return tuple(out)


def crt_decompose(x: RadicInteger) -> tuple[int, ...]:
    return tuple(x.residue % q for _, q in crt_moduli(x.seq, x.depth))


def crt_recompose(residues: Iterable[int], seq: AnySequence, L: int) -> RadicInteger:
    moduli = [q for _, q in crt_moduli(seq, L)]
    residues = list(residues)
    if len(residues) != len(moduli):
        raise ModuliMismatch(f"expected {len(moduli)} residues, got {len(residues)}")
    RL = seq.R(L)
    total = 0
    for a, q in zip(residues, moduli):
        rest = RL // q
        total += a * rest * pow(rest, -1, q)
    return RadicInteger(seq, L, total % RL)
