import os

import pytest
from hypothesis import given, settings, strategies as st

from mcfinite import kernels
from mcfinite.periodic import lookup
from mcfinite.prs import (
    DetectBudgetExceeded,
    ModState,
    cached_state_cycle,
    clear_cache,
    detect,
    eval_mod,
    fibonacci,
    initial_state,
    iterate_exact,
    iterate_sequence,
    parse_spec,
    random_prs,
    state_cycle,
    step_mod,
    telephone,
)

import oracles


def test_iterate_exact_examples():
    assert iterate_exact(fibonacci(), 10) == (55,)
    assert iterate_exact(telephone(), 5) == (26, 5)
    tel = telephone()
    assert iterate_exact(tel, 1) == tel.init[0] and iterate_exact(tel, 2) == tel.init[1]


def test_iterate_against_textbook_recurrences():
    assert iterate_sequence(fibonacci(), 60) == [oracles.fib(n) for n in range(1, 61)]
    assert iterate_sequence(telephone(), 40) == [oracles.telephone(n) for n in range(1, 41)]
    assert iterate_sequence(telephone(), 10, coord=2) == list(range(1, 11))


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_systems_against_python_eval(seed):
    prs = random_prs(2, 2, 3, seed=seed)
    ref = oracles.dsl_iterate(prs.format(), 9)
    assert [iterate_exact(prs, n) for n in range(1, 10)] == ref
    ref_mod = oracles.dsl_iterate(prs.format(), 40, modulus=97)
    assert [iterate_exact(prs, n, 97) for n in range(1, 41)] == ref_mod


def test_step_mod_examples():
    fib = fibonacci()
    assert step_mod(fib, ModState(2, ((1,), (1,)))).window == ((1,), (0,))
    tel = telephone()
    assert step_mod(tel, initial_state(tel, 3)).window == ((2, 2), (1, 0))
    assert step_mod(tel, initial_state(tel, 1)).window == ((0, 0), (0, 0))


def test_detect_examples():
    ep = detect(fibonacci(), 2)
    assert (ep.preperiod, ep.period, ep.table) == (0, 3, (1, 1, 0))
    assert detect(fibonacci(), 10).period == 60
    ep = detect(telephone(), 2)
    assert (ep.preperiod, ep.period) == (1, 1) and ep.table == (1, 0)


def pisano(m):
    a, b, k = 0, 1, 0
    while True:
        a, b, k = b, (a + b) % m, k + 1
        if (a, b) == (0, 1):
            return k


@pytest.mark.parametrize("m", [2, 3, 5, 7, 10, 16, 97, 100])
def test_fibonacci_period_is_pisano(m):
    assert detect(fibonacci(), m).period == pisano(m)
    assert detect(fibonacci(), m).preperiod == 0


def test_eval_mod_examples():
    assert eval_mod(fibonacci(), 10, 10).value == 5
    assert eval_mod(fibonacci(), 1, 999).value == 0
    assert eval_mod(fibonacci(), 2, 10**18).value == 1
    assert eval_mod(fibonacci(), 7, "10^18").value == oracles.fib_mod_doubling(10**18, 7)
    with pytest.raises(ValueError):
        eval_mod(fibonacci(), 5, 0)


@given(st.integers(min_value=1, max_value=10**30), st.integers(min_value=2, max_value=200))
@settings(deadline=None)
def test_eval_mod_against_fast_doubling(n, m):
    assert eval_mod(fibonacci(), m, n).value == oracles.fib_mod_doubling(n, m)


@pytest.mark.parametrize("prs_name", ["fib", "tel", "cubic"])
def test_cycle_invariants(prs_name):
    prs = {"fib": fibonacci(), "tel": telephone(), "cubic": random_prs()}[prs_name]
    for m in range(1, 13):
        sc = state_cycle(prs, m)
        assert sc.preperiod + sc.period <= m ** (prs.dim * prs.depth)
        assert sc.period % sc.scalar.period == 0
        assert sc.scalar.preperiod <= sc.preperiod + prs.depth
        assert sc.scalar.is_minimal()
        seq = iterate_sequence(prs, 300, modulus=m) if m > 1 else [0] * 300
        assert [lookup(sc.scalar, n).value for n in range(1, 301)] == [x % m for x in seq]


def test_brent_agrees_with_table():
    for prs in (fibonacci(), telephone(), random_prs()):
        for m in (2, 3, 7, 12, 25):
            a = state_cycle(prs, m)
            b = state_cycle(prs, m, memory_cap=0)
            assert b.method == "brent"
            assert (a.preperiod, a.period, a.scalar) == (b.preperiod, b.period, b.scalar)


def test_large_modulus_goes_to_python_backend():
    m = 2**31 + 11
    with pytest.raises(DetectBudgetExceeded):
        state_cycle(fibonacci(), m, max_steps=10)
    assert kernels.for_modulus(m) is kernels.python


def test_budget_exhaustion_reports():
    with pytest.raises(DetectBudgetExceeded, match="within 5 steps"):
        state_cycle(fibonacci(), 1000, max_steps=5)


def test_disk_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("MCFINITE_CACHE_DIR", str(tmp_path))
    clear_cache()
    prs = telephone()
    first = cached_state_cycle(prs, 9)
    files = list(tmp_path.glob("*.ep"))
    assert len(files) == 1 and files[0].name.startswith(prs.content_hash)
    clear_cache()
    again = cached_state_cycle(prs, 9)
    assert again.method == "disk"
    assert (again.preperiod, again.period, again.scalar) == (first.preperiod, first.period, first.scalar)
    clear_cache()


def test_cache_disabled_when_unset(tmp_path, monkeypatch):
    monkeypatch.setenv("MCFINITE_CACHE_DIR", "")
    clear_cache()
    cached_state_cycle(fibonacci(), 11)
    assert not any(tmp_path.iterdir())
    clear_cache()


def test_coordinate_selection():
    tel = telephone()
    ep = detect(tel, 5, coord=2)
    assert [lookup(ep, n).value for n in range(1, 12)] == [n % 5 for n in range(1, 12)]
    with pytest.raises(ValueError):
        state_cycle(tel, 5, coord=3)


def test_scalar_depth_three():
    trib = parse_spec("dim 1\ndepth 3\ninit 0\ninit 0\ninit 1\nnext[1] = a[1][1] + a[2][1] + a[3][1]\n")
    seq = [0, 0, 1]
    while len(seq) < 200:
        seq.append(seq[-1] + seq[-2] + seq[-3])
    for m in (2, 5, 9):
        assert [eval_mod(trib, m, n).value for n in range(1, 201)] == [x % m for x in seq]
