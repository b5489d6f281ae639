import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from mcfinite.structures import (
    GRAPH,
    TERNARY,
    RelStructure,
    VocabularyMismatch,
    count_group_tables,
    count_ternary_spaces,
    density,
    density_mod,
    density_table,
    density_with_method,
    disjoint_union,
    embeds,
    enumerate_structures,
    holds,
    parse_property,
    parse_structure,
    relabel,
)
from mcfinite.structures.counting import table_structure

import oracles


def axioms_t(rel, n):
    """T1-T4 checked by literal quantification over [n]."""
    B = lambda a, b, c: (a, b, c) in rel  # noqa: E731
    r = range(1, n + 1)
    for a, b, c in itertools.product(r, repeat=3):
        if B(a, b, c) and not B(c, b, a):
            return False
        if B(a, b, c) and B(a, c, b) and b != c:
            return False
        for d in r:
            if B(a, b, c) and B(a, c, d) and not (B(b, c, d) and B(a, b, d)):
                return False
    return True


def test_holds_examples():
    assert holds(parse_property("ternary-space"), RelStructure.empty(TERNARY, 2))
    assert holds(parse_property("forbid-sub:K_3"), parse_structure("C_4"))
    z3 = table_structure([(1, 2, 3), (2, 3, 1), (3, 1, 2)])
    assert holds(parse_property("group-table"), z3)
    assert not holds(parse_property("group-table"), table_structure([(1, 1), (1, 1)]))


def test_vocabulary_mismatch():
    with pytest.raises(VocabularyMismatch):
        holds(parse_property("ternary-space"), parse_structure("C_3"))


@pytest.mark.parametrize(
    "text, yes, no",
    [
        ("connected", ["1:", "C_4", "P_3"], ["empty", "C_3+C_3", "2:"]),
        ("cycles", ["C_3", "C_5"], ["P_3", "C_3+C_3", "empty", "K_4"]),
        ("cycles-exactly:2", ["C_3+C_4"], ["C_3", "C_3+C_3+C_3", "C_3+K_1"]),
        ("cycles-restricted:even", ["C_4", "C_6"], ["C_3", "C_5", "C_4+C_4"]),
        ("cycles-restricted:>=5", ["C_5"], ["C_4"]),
        ("cycles-restricted:{3,6}", ["C_3", "C_6"], ["C_4"]),
        ("max-degree:1", ["empty", "K_2+K_2+K_1"], ["P_3"]),
        ("two-equal-cliques", ["K_1+K_1", "K_3+K_3", "2:"], ["K_2+K_1", "K_3", "empty"]),
        ("forbid-ind:P_3", ["K_3", "K_2+K_1"], ["P_3", "C_4"]),
        ("forbid-sub:P_3", ["K_2+K_2"], ["K_3"]),
        ("and(connected,max-degree:2)", ["C_5", "P_4"], ["S_3", "C_3+C_3"]),
        ("and(forbid-sub:[3:1-2,2-3],all)", ["K_2"], ["P_3"]),
    ],
)
def test_registry_membership(text, yes, no):
    p = parse_property(text)
    for lit in yes:
        assert holds(p, parse_structure(lit)), lit
    for lit in no:
        assert not holds(p, parse_structure(lit)), lit


def test_property_metadata():
    assert parse_property("cycles").connected and parse_property("cycles").degree_bound == 2
    conj = parse_property("and(connected,max-degree:3)")
    assert conj.connected and conj.degree_bound == 3
    assert parse_property("all").degree_bound is None
    with pytest.raises(ValueError):
        parse_property("nonsense")
    with pytest.raises(ValueError):
        parse_property("max-degree:x")


def test_embeds():
    assert embeds(parse_structure("P_3"), parse_structure("K_3"))
    assert not embeds(parse_structure("P_3"), parse_structure("K_3"), induced=True)
    assert embeds(parse_structure("empty"), parse_structure("K_2"))
    assert not embeds(parse_structure("K_3"), parse_structure("K_2"))


graphs_small = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.sampled_from(list(itertools.combinations(range(1, n + 1), 2)) or [(1, 1)])))
)


@settings(max_examples=60, deadline=None)
@given(graphs_small, st.randoms(use_true_random=False),
       st.sampled_from(["connected", "cycles", "max-degree:2", "forbid-sub:K_3", "forbid-ind:P_3",
                        "two-equal-cliques", "cycles-exactly:2"]))
def test_isomorphism_invariance(spec, rnd, text):
    n, edges = spec
    edges = {e for e in edges if e[0] != e[1]}
    s = RelStructure.graph(n, edges)
    perm = list(range(1, n + 1))
    rnd.shuffle(perm)
    p = parse_property(text)
    assert holds(p, s) == holds(p, relabel(s, perm))


@settings(max_examples=40, deadline=None)
@given(graphs_small, graphs_small, st.sampled_from(["K_3", "P_3", "C_4", "K_2"]))
def test_forbidden_connected_subgraph_splits_over_union(g1, g2, h):
    a = RelStructure.graph(g1[0], {e for e in g1[1] if e[0] != e[1]})
    b = RelStructure.graph(g2[0], {e for e in g2[1] if e[0] != e[1]})
    p = parse_property(f"forbid-sub:{h}")
    assert holds(p, disjoint_union(a, b)) == (holds(p, a) and holds(p, b))


# -- densities --------------------------------------------------------------------

def test_density_examples():
    assert density(parse_property("cycles"), 4) == 3
    assert density(parse_property("max-degree:1"), 4) == 10
    assert density(parse_property("all"), 4) == 64
    assert density_mod(parse_property("all"), 4, 5).value == 4


def test_max_degree_one_is_telephone():
    p = parse_property("max-degree:1")
    for n in range(1, 8):
        assert density(p, n) == oracles.telephone(n)


def test_cycles_by_enumeration():
    p = parse_property("cycles")
    for n in range(1, 8):
        assert density_with_method(p, n, "pruned")[0] == oracles.cycles_count(n)
        assert density_with_method(p, n, "kernel")[0] == oracles.cycles_count(n)


CONNECTED = [1, 1, 4, 38, 728]  # labeled connected graphs, n = 1..5


@pytest.mark.parametrize("method", ["kernel", "enumerate"])
def test_connected_graphs(method):
    p = parse_property("connected")
    assert [density_with_method(p, n, method)[0] for n in range(1, 6)] == CONNECTED
    assert density(p, 0) == 0


def test_methods_agree_on_conjunctions():
    p = parse_property("and(connected,max-degree:2)")
    for n in range(0, 7):
        a = density_with_method(p, n, "kernel")[0]
        b = density_with_method(p, n, "pruned")[0]
        c = sum(1 for s in enumerate_structures(GRAPH, n) if holds(p, s))
        assert a == b == c


def test_method_errors():
    with pytest.raises(ValueError):
        density_with_method(parse_property("two-equal-cliques"), 3, "kernel")
    with pytest.raises(ValueError):
        density_with_method(parse_property("all"), 3, "formula")
    with pytest.raises(ValueError):
        density_with_method(parse_property("all"), 3, "bogus")


def test_auto_falls_back_to_formula_and_labels_it():
    count, method = density_with_method(parse_property("cycles"), 12)
    assert (count, method) == (math.factorial(11) // 2, "formula")


def test_density_table_labels_methods():
    table = density_table(parse_property("cycles"), range(1, 5), 2)
    assert table.counts() == [0, 0, 1, 3]
    assert table.residues() == [0, 0, 1, 1]
    assert {e.method for e in table.entries} <= {"kernel", "pruned", "enumerate"}


def test_parallel_matches_serial():
    p = parse_property("connected")
    assert density(p, 5, "kernel", jobs=2) == 728
    assert density(p, 5, "enumerate", jobs=2) == 728
    q = parse_property("max-degree:1")
    assert density(q, 7, "pruned", jobs=2) == 232


# -- ternary spaces and group tables ------------------------------------------------

@pytest.mark.parametrize("n", [0, 1, 2])
def test_ternary_spaces_three_ways(n):
    literal = sum(1 for s in enumerate_structures(TERNARY, n) if axioms_t(s.relations[0], n))
    assert count_ternary_spaces(n, "filter") == literal
    assert count_ternary_spaces(n, "backtrack") == literal


def test_ternary_space_predicate_matches_literal_axioms():
    for s in enumerate_structures(TERNARY, 2):
        assert holds(parse_property("ternary-space"), s) == axioms_t(s.relations[0], 2)


LABELED_GROUPS = {1: 1, 2: 2, 3: 3, 4: 16, 5: 30}  # sum of n!/|Aut(G)| over iso classes


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_group_tables_filter_vs_backtrack(n):
    assert count_group_tables(n, "filter") == count_group_tables(n, "backtrack") == LABELED_GROUPS[n]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_group_tables_from_all_operations(n):
    assert count_group_tables(n, "functions") == LABELED_GROUPS[n]


def test_group_tables_n5():
    assert count_group_tables(5, "backtrack") == LABELED_GROUPS[5]
    assert count_group_tables(0) == 0
