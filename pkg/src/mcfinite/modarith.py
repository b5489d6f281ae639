"""Exact modular arithmetic: factorization, residues and CRT."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

MAX_FACTOR_INPUT = 2**63


@dataclass(frozen=True)
class Residue:
    """An integer reduced into ``[0, modulus)``.

    Negative or oversized values are wrapped on construction, so
    ``Residue(-1, 5).value == 4``.
    """

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be >= 1, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.value} mod {self.modulus}"


@dataclass(frozen=True)
class PrimePowerFactorization:
    factors: Tuple[Tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def prime_powers(self) -> List[int]:
        return [p**e for p, e in self.factors]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)


def factorize(m: int) -> PrimePowerFactorization:
    """Factor ``m`` by trial division.

    >>> list(factorize(12))
    [(2, 2), (3, 1)]
    """
    if not isinstance(m, int) or isinstance(m, bool):
        raise TypeError("factorize expects an int")
    if m < 1:
        raise ValueError(f"cannot factor {m}: input must be >= 1")
    if m > MAX_FACTOR_INPUT:
        raise ValueError(f"{m} exceeds the trial-division limit 2^63")
    factors = []
    for p in (2, 3):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            factors.append((p, e))
    # wheel over 6k +- 1
    p = 5
    step = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            factors.append((p, e))
        p += step
        step = 6 - step
    if m > 1:
        factors.append((m, 1))
    return PrimePowerFactorization(tuple(factors))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n).factors == ((n, 1),)


def crt_solve(congruences: Sequence[Residue]) -> Residue:
    """Combine congruences with pairwise coprime moduli into one residue."""
    if not congruences:
        raise ValueError("crt_solve needs at least one congruence")
    congruences = [c if isinstance(c, Residue) else Residue(*c) for c in congruences]
    for i, a in enumerate(congruences):
        for b in congruences[i + 1:]:
            g = math.gcd(a.modulus, b.modulus)
            if g != 1:
                raise ValueError(
                    f"moduli {a.modulus} and {b.modulus} are not coprime (gcd {g})"
                )
    value, modulus = 0, 1
    for c in congruences:
        # lift x = value (mod modulus) to also satisfy x = c.value (mod c.modulus)
        inv = pow(modulus, -1, c.modulus) if c.modulus > 1 else 0
        t = ((c.value - value) * inv) % c.modulus
        value += modulus * t
        modulus *= c.modulus
    return Residue(value, modulus)


def _sieve(limit: int) -> List[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


_PRIMES: List[int] = _sieve(1000)


def nth_prime(i: int) -> int:
    """Return the ``i``-th prime, 1-indexed (``nth_prime(1) == 2``)."""
    global _PRIMES
    if i < 1:
        raise ValueError("prime index must be >= 1")
    while len(_PRIMES) < i:
        # p_i < i (ln i + ln ln i) for i >= 6
        bound = max(_PRIMES[-1] * 2, int(i * (math.log(i) + math.log(math.log(i)))) + 10)
        _PRIMES = _sieve(bound)
    return _PRIMES[i - 1]


def primes(count: int) -> List[int]:
    nth_prime(max(count, 1))
    return list(_PRIMES[:count])


def prod(values: Iterable[int]) -> int:
    return math.prod(values)
