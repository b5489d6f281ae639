import re

import pytest
from hypothesis import given, settings, strategies as st

from mcfinite.prs import FIBONACCI, TELEPHONE, PolyRecurrence, SpecError, format_spec, parse_spec, random_prs
from mcfinite.prs.dsl import parse_expr, poly_terms


def test_parse_stock_documents():
    fib = parse_spec(FIBONACCI)
    assert (fib.dim, fib.depth, fib.init) == (1, 2, ((1,), (1,)))
    tel = parse_spec(TELEPHONE)
    assert (tel.dim, tel.depth, tel.init) == (2, 2, ((1, 1), (2, 2)))


def test_scalar_init_and_comments():
    prs = parse_spec("dim 1 # scalar\ndepth 1\ninit 3\nnext[1] = 2*a[1][1] - 1\n")
    assert prs.init == ((3,),)


def test_index_out_of_range_is_named():
    text = "dim 2\ndepth 1\ninit (1, 1)\nnext[1] = a[1][1]\nnext[3] = a[1][2]\n"
    with pytest.raises(SpecError, match="index 3") as info:
        parse_spec(text)
    assert info.value.line == 5


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("dim 1\ndepth 2\ninit 1\nnext[1] = a[1][1]\n", "init"),
        ("dim 1\ndepth 1\ninit 1\n", "missing next[1]"),
        ("dim 1\ndepth 1\ninit 1\nnext[1] = a[2][1]\n", "lag 2"),
        ("dim 1\ndepth 1\ninit 1\nnext[1] = a[1][1] +\n", "end of expression"),
        ("dim 1\ndepth 1\ninit 1\nnext[1] = a[1][1]^-1\n", "nonnegative"),
        ("dim 1\ndepth 1\ninit 1\nnext[1] = a[1][1] / 2\n", "unexpected character"),
        ("init 1\ndim 1\ndepth 1\nnext[1] = 1\n", "before"),
        ("dim 1\ndepth 1\ninit 1\nnext[1] = 1\nnext[1] = 2\n", "duplicate"),
        ("dim 1\ndepth 1\ninit 1\nfoo 3\nnext[1] = 1\n", "unknown directive"),
    ],
)
def test_rejects_malformed(text, fragment):
    with pytest.raises(SpecError, match=re.escape(fragment)):
        parse_spec(text)


def test_expression_algebra():
    # (a+1)^2 - a^2 - 2a == 1, with a = a[1][1]
    poly = parse_expr("(a[1][1] + 1)^2 - a[1][1]^2 - 2*a[1][1]", 1, 1)
    assert poly_terms(poly) == ((1, ()),)
    assert poly_terms(parse_expr("2*-3", 1, 1)) == ((-6, ()),)
    assert poly_terms(parse_expr("a[1][1] - a[1][1]", 1, 1)) == ()


def test_round_trip_stock():
    for text in (FIBONACCI, TELEPHONE):
        prs = parse_spec(text)
        assert parse_spec(format_spec(prs)) == prs


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(1, 3), st.integers(1, 3), st.integers(0, 3))
def test_round_trip_random(seed, dim, depth, degree):
    prs = random_prs(dim, depth, max(degree, 1), seed=seed)
    text = prs.format()
    again = PolyRecurrence.parse(text)
    assert again == prs
    assert again.format() == text
    assert again.content_hash == prs.content_hash


def test_validation_in_constructor():
    with pytest.raises(ValueError):
        PolyRecurrence(1, 2, ((1,),), (((1, ()),),))
    with pytest.raises(ValueError):
        PolyRecurrence(1, 1, ((1,),), (((1, ((5, 1),)),),))
