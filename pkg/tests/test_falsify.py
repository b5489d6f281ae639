import pytest
from hypothesis import given, settings, strategies as st

from mcfinite.falsify import (
    DEFAULT_MODULI,
    BFileError,
    SequenceFile,
    falsify,
    format_bfile,
    ingest_bfile,
    parse_moduli,
)
from mcfinite.prs import fibonacci, telephone

import oracles

TEL = SequenceFile(tuple((n, oracles.telephone(n)) for n in range(1, 41)))
FIB = SequenceFile(tuple((n, oracles.fib(n)) for n in range(1, 51)))


def test_telephone_single_corruption():
    report = falsify(TEL.replace(5, 27), telephone(), [2])
    assert [(x.n, x.modulus, x.expected, x.got) for x in report.mismatches] == [(5, 2, 0, 1)]
    assert report.lines() == ["MISMATCH n=5 m=2 expected=0 got=1", "verdict: FALSIFIED"]


def test_fibonacci_consistent():
    report = falsify(FIB, fibonacci(), range(2, 17))
    assert report.verdict == "CONSISTENT" and report.checked == 50
    assert report.render().endswith("does not verify the values\n")


def test_delta_divisible_by_all_moduli_slips_through():
    import math
    lcm = math.lcm(*range(2, 17))
    assert falsify(FIB.replace(10, oracles.fib(10) + lcm), fibonacci(), range(2, 17)).verdict == "CONSISTENT"
    assert falsify(FIB.replace(10, oracles.fib(10) + lcm + 1), fibonacci(), range(2, 17)).falsified


def test_negative_claims_wrap():
    seq = SequenceFile(((3, 2 - 7 * 5),))  # F_3 = 2, shifted by a multiple of 7
    assert not falsify(seq, fibonacci(), [7]).falsified
    assert falsify(seq, fibonacci(), [2]).mismatches[0].got == 1


def test_mismatches_sorted_by_n_then_m():
    report = falsify(TEL.replace(3, 5).replace(7, 0), telephone(), [5, 3, 2])
    keys = [(x.n, x.modulus) for x in report.mismatches]
    assert keys == sorted(keys) and report.moduli == (2, 3, 5)


def test_soundness_on_exact_values():
    for model, seq in ((telephone(), TEL), (fibonacci(), FIB)):
        text = format_bfile(seq)
        assert not falsify(ingest_bfile(text), model).falsified


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 2 ** 20))
def test_sensitivity(n, delta):
    report = falsify(TEL.replace(n, TEL.value(n) + delta), telephone(), DEFAULT_MODULI)
    assert report.falsified == any(delta % m for m in DEFAULT_MODULI)
    assert all(x.n == n for x in report.mismatches)


def test_ingest():
    seq = ingest_bfile("# A000085\n\n1 1\n2 2\n 3   4 \n4 -10\n", source="t.txt")
    assert list(seq) == [(1, 1), (2, 2), (3, 4), (4, -10)] and seq.source == "t.txt"
    assert format_bfile(seq) == "1 1\n2 2\n3 4\n4 -10\n"
    assert len(ingest_bfile("")) == 0


@pytest.mark.parametrize("text, line", [
    ("1 1\n2\n", 2),
    ("1 x\n", 1),
    ("0 1\n", 1),
    ("1 1\n3 2\n2 5\n", 3),
    ("1 1\n1 1\n", 2),
])
def test_ingest_errors(text, line):
    with pytest.raises(BFileError) as exc:
        ingest_bfile(text)
    assert exc.value.line == line


def test_sequence_file_guards():
    with pytest.raises(ValueError):
        SequenceFile(((2, 1), (1, 1)))
    with pytest.raises(KeyError):
        TEL.replace(99, 0)
    with pytest.raises(ValueError):
        falsify(TEL, telephone(), [1, 2])


def test_parse_moduli():
    assert parse_moduli("2..5") == (2, 3, 4, 5)
    assert parse_moduli("7, 11") == (7, 11)
    for bad in ("1..3", "5..2", "a,b", ""):
        with pytest.raises(ValueError):
            parse_moduli(bad)
