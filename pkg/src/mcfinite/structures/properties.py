"""Isomorphism-closed properties of structures, parsed from short names.

Registry entries::

    all                      every structure
    connected                Gaifman-connected (empty structure excluded)
    max-degree:D             Gaifman degree <= D everywhere
    forbid-sub:H             no (not necessarily induced) copy of H
    forbid-ind:H             no induced copy of H
    cycles                   a single cycle C_n, n >= 3
    cycles-exactly:K         disjoint union of exactly K cycles
    cycles-restricted:A      a single cycle whose length lies in A
                             (even | odd | >=L | {l1,l2,...})
    two-equal-cliques        K_s + K_s for some s >= 1
    ternary-space            ternary relation obeying the axioms T1-T4
    group-table              ternary relation that is the graph of a group
    and(P,Q,...)             conjunction

``H`` is a structure literal (see :func:`parse_structure`); wrap literals
containing commas in brackets inside ``and(...)``: ``forbid-sub:[3:1-2,2-3]``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from .. import kernels
from .core import (
    GRAPH,
    TERNARY,
    RelStructure,
    Vocabulary,
    VocabularyMismatch,
    _split_top,
    components,
    format_structure,
    is_connected,
    parse_structure,
)


@dataclass(frozen=True, eq=False)
class PropertySpec:
    """A named decidable predicate.

    ``vocab`` is None for properties meaningful on any vocabulary (they
    default to simple graphs when counting).  ``degree_bound`` and
    ``connected`` are guarantees about every member, used for pruning and
    for the vanishing check.  ``atoms`` lets simple-graph counts run in the
    mask kernel; ``counter`` is an exhaustive special-purpose counter and
    ``formula`` a closed form, both optional.
    """

    text: str
    vocab: Optional[Vocabulary]
    predicate: Callable[[RelStructure], bool]
    degree_bound: Optional[int] = None
    connected: bool = False
    atoms: Optional[Tuple[Tuple[int, int], ...]] = None
    counter: Optional[Callable[[int], int]] = None
    formula: Optional[Callable[[int], int]] = None

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"PropertySpec({self.text!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PropertySpec) and other.text == self.text

    def __hash__(self) -> int:
        return hash(self.text)

    def counting_vocab(self) -> Vocabulary:
        return self.vocab or GRAPH


def holds(p: PropertySpec, s: RelStructure) -> bool:
    if p.vocab is not None and s.vocab != p.vocab:
        raise VocabularyMismatch(
            f"property {p.text} expects {p.vocab.name} structures, got {s.vocab.name}"
        )
    return p.predicate(s)


# -- predicates ---------------------------------------------------------------

def _all(s: RelStructure) -> bool:
    return True


def _degree_le(d: int) -> Callable[[RelStructure], bool]:
    return lambda s: all(x <= d for x in s.degrees)


def _cycle_components(s: RelStructure) -> Optional[List[int]]:
    """Component sizes if every vertex has degree 2 in a simple graph, else None."""
    if any(x != 2 for x in s.degrees):
        return None
    return [c.bit_count() for c in components(s)]


def _cycles_exactly(k: int) -> Callable[[RelStructure], bool]:
    def pred(s: RelStructure) -> bool:
        sizes = _cycle_components(s)
        return sizes is not None and len(sizes) == k
    return pred


def _cycle_in(lengths: Callable[[int], bool]) -> Callable[[RelStructure], bool]:
    def pred(s: RelStructure) -> bool:
        sizes = _cycle_components(s)
        return sizes is not None and len(sizes) == 1 and lengths(sizes[0])
    return pred


def _two_equal_cliques(s: RelStructure) -> bool:
    comps = components(s)
    if len(comps) != 2:
        return False
    sizes = [c.bit_count() for c in comps]
    if sizes[0] != sizes[1]:
        return False
    for comp in comps:
        size = comp.bit_count()
        for v in range(s.n):
            if comp >> v & 1 and s.adjacency[v].bit_count() != size - 1:
                return False
    return True


def embeds(h: RelStructure, g: RelStructure, induced: bool = False) -> bool:
    """Is there an injective map ``[h.n] -> [g.n]`` sending every tuple of
    ``h`` into ``g`` (and, if ``induced``, every non-tuple to a non-tuple)?"""
    if h.vocab != g.vocab:
        raise VocabularyMismatch("pattern and host vocabularies differ")
    if h.n > g.n:
        return False
    if h.n == 0:
        return True
    arities = [sym.arity for sym in h.vocab.symbols]
    # tuples of h indexed by their largest element: checked once it is mapped
    by_last: List[List[Tuple[int, Tuple[int, ...]]]] = [[] for _ in range(h.n + 1)]
    for si, rel in enumerate(h.relations):
        for t in rel:
            by_last[max(t)].append((si, t))
    image = [0] * (h.n + 1)
    used = [False] * (g.n + 1)

    def consistent(v: int) -> bool:
        for si, t in by_last[v]:
            if tuple(image[x] for x in t) not in g.relations[si]:
                return False
        if induced:
            for si, ar in enumerate(arities):
                hrel, grel = h.relations[si], g.relations[si]
                for t in _tuples_with_max(v, ar):
                    if t not in hrel and tuple(image[x] for x in t) in grel:
                        return False
        return True

    def rec(v: int) -> bool:
        if v > h.n:
            return True
        for w in range(1, g.n + 1):
            if used[w]:
                continue
            image[v] = w
            used[w] = True
            if consistent(v) and rec(v + 1):
                return True
            used[w] = False
        image[v] = 0
        return False

    return rec(1)


def _tuples_with_max(v: int, arity: int):
    import itertools
    for t in itertools.product(range(1, v + 1), repeat=arity):
        if v in t:
            yield t


def ternary_space(s: RelStructure) -> bool:
    """Axioms T1-T4 on the single ternary relation ``B``."""
    rel = s.relations[0]
    by_ab: Dict[Tuple[int, int], List[int]] = {}
    for a, b, c in rel:
        by_ab.setdefault((a, b), []).append(c)
    for a, b, c in rel:
        if (c, b, a) not in rel:  # T1
            return False
        if b != c and (a, c, b) in rel:  # T2
            return False
        for d in by_ab.get((a, c), ()):  # B(a,b,c) and B(a,c,d)
            if (b, c, d) not in rel or (a, b, d) not in rel:  # T3, T4
                return False
    return True


def operation_table(s: RelStructure) -> Optional[List[List[int]]]:
    """Read ``T(a, b, c)`` as ``a * b = c``; None unless total and functional."""
    n = s.n
    table = [[0] * (n + 1) for _ in range(n + 1)]
    for a, b, c in s.relations[0]:
        if table[a][b]:
            return None
        table[a][b] = c
    if any(table[a][b] == 0 for a in range(1, n + 1) for b in range(1, n + 1)):
        return None
    return table


def is_group_table(table: List[List[int]], n: int) -> bool:
    if n == 0:
        return False
    r = range(1, n + 1)
    for a in r:
        for b in r:
            ab = table[a][b]
            for c in r:
                if table[ab][c] != table[a][table[b][c]]:
                    return False
    ids = [e for e in r if all(table[e][x] == x and table[x][e] == x for x in r)]
    if not ids:
        return False
    e = ids[0]
    return all(any(table[a][b] == e and table[b][a] == e for b in r) for a in r)


def group_table(s: RelStructure) -> bool:
    table = operation_table(s)
    return table is not None and is_group_table(table, s.n)


# -- parsing --------------------------------------------------------------------

def _cycles_formula(n: int) -> int:
    return math.factorial(n - 1) // 2 if n >= 3 else 0


def _length_set(spec: str) -> Callable[[int], bool]:
    spec = spec.strip()
    if spec == "even":
        return lambda n: n % 2 == 0
    if spec == "odd":
        return lambda n: n % 2 == 1
    m = re.fullmatch(r">=\s*(\d+)", spec)
    if m:
        lo = int(m.group(1))
        return lambda n: n >= lo
    m = re.fullmatch(r"\{([\d,\s]*)\}", spec)
    if m:
        allowed = frozenset(int(x) for x in m.group(1).split(",") if x.strip())
        return lambda n: n in allowed
    raise ValueError(f"bad length set {spec!r} (even, odd, >=L, {{l1,l2,...}})")


def _strip_brackets(text: str) -> str:
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        return text[1:-1]
    return text


def _int_param(name: str, param: Optional[str]) -> int:
    if param is None or not param.strip().isdigit():
        raise ValueError(f"{name} needs a nonnegative integer parameter")
    return int(param)


def parse_property(text: str) -> PropertySpec:
    text = text.strip()
    if text.startswith("and(") and text.endswith(")"):
        parts = [parse_property(x) for x in _split_top(text[4:-1], ",")]
        if len(parts) < 2:
            raise ValueError("and(...) needs at least two properties")
        return conjunction(parts)
    name, _, param = text.partition(":")
    param = param if _ else None
    if name == "all":
        return PropertySpec("all", None, _all, atoms=((kernels.ATOM_ALL, 0),))
    if name == "connected":
        return PropertySpec("connected", None, is_connected, connected=True,
                            atoms=((kernels.ATOM_CONNECTED, 0),))
    if name == "max-degree":
        d = _int_param(name, param)
        return PropertySpec(f"max-degree:{d}", None, _degree_le(d), degree_bound=d,
                            atoms=((kernels.ATOM_MAXDEG, d),))
    if name in ("forbid-sub", "forbid-ind"):
        if not param:
            raise ValueError(f"{name} needs a pattern structure")
        h = parse_structure(_strip_brackets(param))
        ind = name == "forbid-ind"
        label = format_structure(h)
        if "," in label:
            label = f"[{label}]"
        return PropertySpec(f"{name}:{label}", h.vocab, lambda s: not embeds(h, s, ind))
    if name == "cycles":
        if param is not None:
            raise ValueError("cycles takes no parameter")
        return PropertySpec("cycles", GRAPH, _cycles_exactly(1), degree_bound=2,
                            connected=True, atoms=((kernels.ATOM_CYCLES, 1),),
                            formula=_cycles_formula)
    if name == "cycles-exactly":
        k = _int_param(name, param)
        return PropertySpec(f"cycles-exactly:{k}", GRAPH, _cycles_exactly(k), degree_bound=2,
                            connected=(k == 1), atoms=((kernels.ATOM_CYCLES, k),),
                            formula=_cycles_formula if k == 1 else None)
    if name == "cycles-restricted":
        if not param:
            raise ValueError("cycles-restricted needs a length set")
        lengths = _length_set(param)
        return PropertySpec(f"cycles-restricted:{param.strip()}", GRAPH, _cycle_in(lengths),
                            degree_bound=2, connected=True,
                            formula=lambda n: _cycles_formula(n) if lengths(n) else 0)
    if name == "two-equal-cliques":
        return PropertySpec("two-equal-cliques", GRAPH, _two_equal_cliques)
    if name == "ternary-space":
        from .counting import count_ternary_spaces
        return PropertySpec("ternary-space", TERNARY, ternary_space,
                            counter=lambda n: count_ternary_spaces(n, "backtrack"))
    if name == "group-table":
        from .counting import count_group_tables
        return PropertySpec("group-table", TERNARY, group_table,
                            counter=lambda n: count_group_tables(n, "backtrack"))
    raise ValueError(f"unknown property {text!r}")


def conjunction(parts: List[PropertySpec]) -> PropertySpec:
    vocabs = {p.vocab for p in parts if p.vocab is not None}
    if len(vocabs) > 1:
        raise VocabularyMismatch("and(...) mixes vocabularies")
    vocab = vocabs.pop() if vocabs else None
    bounds = [p.degree_bound for p in parts if p.degree_bound is not None]
    atoms = None
    if all(p.atoms is not None for p in parts):
        atoms = tuple(a for p in parts for a in p.atoms)
    preds = [p.predicate for p in parts]
    return PropertySpec(
        "and(" + ",".join(p.text for p in parts) + ")",
        vocab,
        lambda s: all(pred(s) for pred in preds),
        degree_bound=min(bounds) if bounds else None,
        connected=any(p.connected for p in parts),
        atoms=atoms,
    )


def with_degree_bound(p: PropertySpec, d: int) -> PropertySpec:
    """The degree-restricted class: members of ``p`` with Gaifman degree <= d."""
    if p.degree_bound is not None and p.degree_bound <= d:
        return p
    return conjunction([p, parse_property(f"max-degree:{d}")])


REGISTRY_NAMES = (
    "all", "connected", "max-degree", "forbid-sub", "forbid-ind", "cycles",
    "cycles-exactly", "cycles-restricted", "two-equal-cliques", "ternary-space",
    "group-table", "and",
)
