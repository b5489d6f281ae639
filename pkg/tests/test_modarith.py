import math

import pytest
from hypothesis import given, strategies as st

from mcfinite.modarith import (
    PrimePowerFactorization,
    Residue,
    crt_solve,
    factorize,
    is_prime,
    nth_prime,
    primes,
)


def sieve(limit):
    flags = [True] * (limit + 1)
    flags[0:2] = [False, False]
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = [False] * len(flags[i * i :: i])
    return [i for i, f in enumerate(flags) if f]


def test_residue_wraps_negatives():
    assert Residue(-1, 5).value == 4
    assert Residue(17, 5) == Residue(2, 5)
    with pytest.raises(ValueError):
        Residue(1, 0)


@pytest.mark.parametrize(
    "m, factors",
    [(12, ((2, 2), (3, 1))), (1, ()), (97, ((97, 1),)), (2**40, ((2, 40),)), (360, ((2, 3), (3, 2), (5, 1)))],
)
def test_factorize_examples(m, factors):
    assert factorize(m).factors == factors


def test_factorize_rejects_out_of_range():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(2**63 + 1)


def test_factorize_large_semiprime():
    p, q = 1_000_003, 999_983
    assert factorize(p * q).factors == ((q, 1), (p, 1))


@given(st.integers(min_value=1, max_value=10**6))
def test_factorize_reassembles(m):
    f = factorize(m)
    assert f.value() == m
    ps = [p for p, _ in f]
    assert ps == sorted(set(ps))
    assert all(is_prime(p) for p in ps)
    assert all(e >= 1 for _, e in f)
    assert math.prod(f.prime_powers()) == m


def test_crt_examples():
    assert crt_solve([Residue(1, 4), Residue(0, 9)]) == Residue(9, 36)
    assert crt_solve([Residue(0, 7)]) == Residue(0, 7)
    assert crt_solve([Residue(1, 2), Residue(2, 3)]) == Residue(5, 6)


def test_crt_rejects_non_coprime():
    with pytest.raises(ValueError, match="not coprime"):
        crt_solve([Residue(1, 4), Residue(1, 6)])


def test_crt_matches_exhaustive_search():
    mods = [4, 9, 5]
    for a in range(4):
        for b in range(9):
            for c in range(5):
                got = crt_solve([Residue(a, 4), Residue(b, 9), Residue(c, 5)])
                expected = next(x for x in range(180) if x % 4 == a and x % 9 == b and x % 5 == c)
                assert got == Residue(expected, math.prod(mods))


@given(st.lists(st.integers(min_value=0, max_value=10**9), min_size=1, max_size=6), st.data())
def test_crt_reproduces_inputs(values, data):
    ps = primes(len(values))
    exps = [data.draw(st.integers(min_value=1, max_value=3)) for _ in values]
    congruences = [Residue(v, p**e) for v, p, e in zip(values, ps, exps)]
    sol = crt_solve(congruences)
    for c in congruences:
        assert sol.value % c.modulus == c.value


@given(st.integers(min_value=1, max_value=10**6), st.integers(min_value=0, max_value=10**12))
def test_crt_over_prime_power_parts(m, a):
    parts = factorize(m).prime_powers()
    assert crt_solve([Residue(a, q) for q in parts] or [Residue(a, 1)]) == Residue(a, m)


def test_nth_prime_against_sieve():
    ref = sieve(20000)
    assert nth_prime(1) == 2 and nth_prime(3) == 5 and nth_prime(10) == 29
    for i in range(1, len(ref) + 1, 97):
        assert nth_prime(i) == ref[i - 1]
    assert primes(10) == ref[:10]
    with pytest.raises(ValueError):
        nth_prime(0)


def test_factorization_value_object():
    f = PrimePowerFactorization(((2, 2), (3, 1)))
    assert f.value() == 12 and len(f) == 2 and list(f) == [(2, 2), (3, 1)]
