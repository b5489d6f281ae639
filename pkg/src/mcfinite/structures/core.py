"""Finite labeled relational structures on the universe ``[n] = {1..n}``."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

SYMMETRIC = "symmetric"
IRREFLEXIVE = "irreflexive"

# unpruned enumeration refuses more than 2**DEFAULT_BUDGET_BITS structures
DEFAULT_BUDGET_BITS = 22


class BudgetExceeded(RuntimeError):
    pass


class VocabularyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    flags: FrozenSet[str] = frozenset()

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError(f"symbol {self.name}: arity must be >= 1")
        object.__setattr__(self, "flags", frozenset(self.flags))
        unknown = self.flags - {SYMMETRIC, IRREFLEXIVE}
        if unknown:
            raise ValueError(f"symbol {self.name}: unknown flags {sorted(unknown)}")
        if self.flags and self.arity != 2:
            raise ValueError(f"symbol {self.name}: flags only apply to binary symbols")

    @property
    def symmetric(self) -> bool:
        return SYMMETRIC in self.flags

    @property
    def irreflexive(self) -> bool:
        return IRREFLEXIVE in self.flags


@dataclass(frozen=True)
class Vocabulary:
    name: str
    symbols: Tuple[Symbol, ...]

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")

    @property
    def max_arity(self) -> int:
        return max((s.arity for s in self.symbols), default=0)

    def slots(self, n: int) -> List[Tuple[int, Tuple[int, ...]]]:
        """Independent yes/no decisions defining a structure on ``[n]``.

        Ordered by symbol, then lexicographically by tuple.  A symmetric
        binary symbol contributes one slot per unordered pair.
        """
        out = []
        for si, sym in enumerate(self.symbols):
            for tup in itertools.product(range(1, n + 1), repeat=sym.arity):
                if sym.arity == 2:
                    a, b = tup
                    if sym.irreflexive and a == b:
                        continue
                    if sym.symmetric and a > b:
                        continue
                out.append((si, tup))
        return out

    def slot_count(self, n: int) -> int:
        total = 0
        for sym in self.symbols:
            if sym.arity == 2 and sym.flags:
                if sym.symmetric and sym.irreflexive:
                    total += n * (n - 1) // 2
                elif sym.symmetric:
                    total += n * (n + 1) // 2
                else:
                    total += n * (n - 1)
            else:
                total += n ** sym.arity
        return total

    def expand(self, si: int, tup: Tuple[int, ...]) -> Tuple[Tuple[int, ...], ...]:
        sym = self.symbols[si]
        if sym.symmetric and tup[0] != tup[1]:
            return (tup, (tup[1], tup[0]))
        return (tup,)


GRAPH = Vocabulary("graph", (Symbol("E", 2, frozenset({SYMMETRIC, IRREFLEXIVE})),))
TERNARY = Vocabulary("ternary", (Symbol("B", 3),))
VOCABULARIES: Dict[str, Vocabulary] = {"graph": GRAPH, "ternary": TERNARY}


@dataclass(frozen=True)
class GaifmanGraph:
    n: int
    edges: FrozenSet[Tuple[int, int]]  # pairs (a, b) with a < b
    degrees: Tuple[int, ...]

    def max_degree(self) -> int:
        return max(self.degrees, default=0)


@dataclass(frozen=True)
class RelStructure:
    vocab: Vocabulary
    n: int
    relations: Tuple[FrozenSet[Tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("universe size must be >= 0")
        rels = tuple(frozenset(tuple(t) for t in r) for r in self.relations)
        if len(rels) != len(self.vocab.symbols):
            raise VocabularyMismatch(
                f"{len(rels)} relations for {len(self.vocab.symbols)} symbols"
            )
        for sym, rel in zip(self.vocab.symbols, rels):
            for t in rel:
                if len(t) != sym.arity:
                    raise ValueError(f"{sym.name}: tuple {t} has wrong arity")
                if any(not 1 <= x <= self.n for x in t):
                    raise ValueError(f"{sym.name}: tuple {t} outside [1, {self.n}]")
            if sym.irreflexive and any(a == b for a, b in rel):
                raise ValueError(f"{sym.name} is irreflexive but has a loop")
            if sym.symmetric and any((b, a) not in rel for a, b in rel):
                raise ValueError(f"{sym.name} is symmetric but not closed under reversal")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def _trusted(cls, vocab: Vocabulary, n: int, relations) -> "RelStructure":
        obj = object.__new__(cls)
        object.__setattr__(obj, "vocab", vocab)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "relations", relations)
        return obj

    @classmethod
    def empty(cls, vocab: Vocabulary = GRAPH, n: int = 0) -> "RelStructure":
        return cls._trusted(vocab, n, tuple(frozenset() for _ in vocab.symbols))

    @classmethod
    def graph(cls, n: int, edges) -> "RelStructure":
        rel = set()
        for a, b in edges:
            rel.add((a, b))
            rel.add((b, a))
        return cls(GRAPH, n, (frozenset(rel),))

    @cached_property
    def adjacency(self) -> Tuple[int, ...]:
        """Gaifman neighbour bitmasks; bit ``b - 1`` of entry ``a - 1``."""
        nbr = [0] * self.n
        for rel in self.relations:
            for t in rel:
                distinct = set(t)
                if len(distinct) < 2:
                    continue
                mask = 0
                for x in distinct:
                    mask |= 1 << (x - 1)
                for x in distinct:
                    nbr[x - 1] |= mask & ~(1 << (x - 1))
        return tuple(nbr)

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(x.bit_count() for x in self.adjacency)

    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def tuple_count(self) -> int:
        return sum(len(r) for r in self.relations)

    def __str__(self) -> str:
        return format_structure(self)


def gaifman(s: RelStructure) -> GaifmanGraph:
    """Co-occurrence graph; loops are dropped and never counted in degrees."""
    edges = set()
    for a, mask in enumerate(s.adjacency, start=1):
        b = 1
        while mask:
            if mask & 1 and a < b:
                edges.add((a, b))
            mask >>= 1
            b += 1
    return GaifmanGraph(s.n, frozenset(edges), s.degrees)


def components(s: RelStructure) -> List[int]:
    """Gaifman components as vertex bitmasks, ordered by least element."""
    nbr = s.adjacency
    left = (1 << s.n) - 1
    out = []
    while left:
        seen = frontier = left & -left
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= nbr[low.bit_length() - 1]
                f ^= low
            frontier = nxt & ~seen
            seen |= nxt
        out.append(seen)
        left &= ~seen
    return out


def is_connected(s: RelStructure) -> bool:
    """Gaifman-connected; the empty structure is not, a single vertex is."""
    return s.n >= 1 and len(components(s)) == 1


def relabel(s: RelStructure, perm: Sequence[int]) -> RelStructure:
    """Image under the bijection ``x -> perm[x - 1]`` of ``[n]``."""
    rels = tuple(
        frozenset(tuple(perm[x - 1] for x in t) for t in rel) for rel in s.relations
    )
    return RelStructure._trusted(s.vocab, s.n, rels)


def induced(s: RelStructure, vertices: Sequence[int]) -> RelStructure:
    """Substructure on ``vertices`` (kept in the given order, renumbered 1..)."""
    index = {v: i for i, v in enumerate(vertices, start=1)}
    rels = tuple(
        frozenset(tuple(index[x] for x in t) for t in rel if all(x in index for x in t))
        for rel in s.relations
    )
    return RelStructure._trusted(s.vocab, len(vertices), rels)


def disjoint_union(a: RelStructure, b: RelStructure) -> RelStructure:
    """``a`` on ``1..n_a`` followed by ``b`` shifted to ``n_a+1..n_a+n_b``."""
    if a.vocab != b.vocab:
        raise VocabularyMismatch(f"cannot join {a.vocab.name} and {b.vocab.name} structures")
    shift = a.n
    rels = tuple(
        ra | frozenset(tuple(x + shift for x in t) for t in rb)
        for ra, rb in zip(a.relations, b.relations)
    )
    return RelStructure._trusted(a.vocab, a.n + b.n, rels)


# -- literal syntax -----------------------------------------------------------

def _named(name: str, vocab: Vocabulary) -> Optional[RelStructure]:
    m = re.fullmatch(r"([KCPES])_?(\d+)", name)
    if not m:
        return None
    if vocab != GRAPH:
        raise ValueError(f"named graph {name!r} needs the graph vocabulary")
    kind, size = m.group(1), int(m.group(2))
    if kind == "K":
        edges = itertools.combinations(range(1, size + 1), 2)
    elif kind == "C":
        if size < 3:
            raise ValueError("cycles need at least 3 vertices")
        edges = [(i, i % size + 1) for i in range(1, size + 1)]
    elif kind == "P":
        edges = [(i, i + 1) for i in range(1, size)]
    elif kind == "S":
        # star: centre 1 with `size` leaves
        return RelStructure.graph(size + 1, [(1, i) for i in range(2, size + 2)])
    else:
        edges = []
    return RelStructure.graph(size, edges)


def parse_structure(text: str, vocab: Optional[Vocabulary] = None) -> RelStructure:
    """Parse a structure literal.

    ``empty``; ``3:1-2,2-3`` (graph edges); ``3:(1,2,3),(2,1,3)`` (tuples of
    the single symbol); ``4:`` (no tuples); named graphs ``K_n``, ``C_n``,
    ``P_n`` (path on n vertices), ``E_n`` (edgeless), ``S_d`` (star with d
    leaves); ``A+B`` is the disjoint union.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty structure literal")
    parts = _split_top(text, "+")
    if len(parts) > 1:
        out = parse_structure(parts[0], vocab)
        for part in parts[1:]:
            out = disjoint_union(out, parse_structure(part, vocab or out.vocab))
        return out
    if text == "empty":
        return RelStructure.empty(vocab or GRAPH)
    named = _named(text, vocab or GRAPH)
    if named is not None:
        return named
    m = re.fullmatch(r"(\d+)\s*:(.*)", text, re.S)
    if not m:
        raise ValueError(f"bad structure literal {text!r}")
    n = int(m.group(1))
    body = m.group(2).strip()
    if not body:
        return RelStructure.empty(vocab or GRAPH, n)
    if body.startswith("("):
        tuples = [tuple(int(x) for x in grp.split(",")) for grp in re.findall(r"\(([^)]*)\)", body)]
        arity = len(tuples[0])
        if any(len(t) != arity for t in tuples):
            raise ValueError(f"mixed tuple arities in {text!r}")
        if vocab is None:
            vocab = TERNARY if arity == 3 else Vocabulary(
                f"arity{arity}", (Symbol("R", arity),)
            )
        if len(vocab.symbols) != 1:
            raise ValueError("tuple literals need a single-symbol vocabulary")
        if vocab == GRAPH:
            return RelStructure.graph(n, tuples)
        return RelStructure(vocab, n, (frozenset(tuples),))
    edges = []
    for item in body.split(","):
        mm = re.fullmatch(r"\s*(\d+)\s*-\s*(\d+)\s*", item)
        if not mm:
            raise ValueError(f"bad edge {item!r} in {text!r}")
        edges.append((int(mm.group(1)), int(mm.group(2))))
    if vocab not in (None, GRAPH):
        raise ValueError("edge lists need the graph vocabulary")
    return RelStructure.graph(n, edges)


def _split_top(text: str, sep: str) -> List[str]:
    depth = 0
    out, cur = [], []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur).strip())
    return out


def format_structure(s: RelStructure) -> str:
    if s.n == 0 and not any(s.relations):
        return "empty"
    if s.vocab == GRAPH:
        edges = sorted((a, b) for a, b in s.relations[0] if a < b)
        return f"{s.n}:" + ",".join(f"{a}-{b}" for a, b in edges)
    if len(s.vocab.symbols) == 1:
        tuples = sorted(s.relations[0])
        return f"{s.n}:" + ",".join("(" + ",".join(map(str, t)) + ")" for t in tuples)
    parts = []
    for sym, rel in zip(s.vocab.symbols, s.relations):
        parts.append(sym.name + "=" + ",".join("(" + ",".join(map(str, t)) + ")" for t in sorted(rel)))
    return f"{s.n}:" + ";".join(parts)


# -- enumeration --------------------------------------------------------------

def enumerate_structures(vocab: Vocabulary, n: int, prune: Optional[int] = None, *,
                         budget_bits: int = DEFAULT_BUDGET_BITS,
                         shard: Optional[Tuple[int, int]] = None,
                         node_budget: Optional[int] = None) -> Iterator[RelStructure]:
    """Every labeled structure on ``[n]`` exactly once.

    Slots are decided in canonical order, "absent" before "present".  With
    ``prune = d`` a slot is only switched on if all Gaifman degrees stay
    ``<= d``, so violating partial structures are never extended.
    ``shard = (b, i)`` fixes the first ``b`` decisions to the bits of ``i``
    (most significant first); the ``2**b`` shards partition the output.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    slots = vocab.slots(n)
    if prune is None and len(slots) > budget_bits:
        raise BudgetExceeded(
            f"{vocab.name} structures on [{n}]: 2^{len(slots)} = {2 ** len(slots)} "
            f"exceeds the budget 2^{budget_bits}"
        )
    forced: Dict[int, int] = {}
    if shard is not None:
        b, idx = shard
        if not 0 <= idx < (1 << b):
            raise ValueError("shard index out of range")
        for pos in range(min(b, len(slots))):
            forced[pos] = (idx >> (b - 1 - pos)) & 1
        if b > len(slots) and idx & ((1 << (b - len(slots))) - 1):
            return
    expanded = [vocab.expand(si, tup) for si, tup in slots]
    pair_masks = []
    for _, tup in slots:
        distinct = sorted(set(tup))
        pair_masks.append([(x, sum(1 << (y - 1) for y in distinct if y != x)) for x in distinct])
    nsym = len(vocab.symbols)
    chosen: List[List[Tuple[int, ...]]] = [[] for _ in range(nsym)]
    nbr = [0] * n
    nodes = [0]

    def emit() -> RelStructure:
        rels = tuple(frozenset(c) for c in chosen)
        return RelStructure._trusted(vocab, n, rels)

    def rec(pos: int) -> Iterator[RelStructure]:
        if node_budget is not None:
            nodes[0] += 1
            if nodes[0] > node_budget:
                raise BudgetExceeded(f"pruned enumeration on [{n}] exceeded {node_budget} nodes")
        if pos == len(slots):
            yield emit()
            return
        want = forced.get(pos)
        if want != 1:
            yield from rec(pos + 1)
        if want == 0:
            return
        saved = None
        if prune is not None:
            saved = [(x - 1, nbr[x - 1]) for x, _ in pair_masks[pos]]
            ok = True
            for x, mask in pair_masks[pos]:
                nbr[x - 1] |= mask
                if nbr[x - 1].bit_count() > prune:
                    ok = False
            if not ok:
                for i, v in saved:
                    nbr[i] = v
                return
        si = slots[pos][0]
        chosen[si].extend(expanded[pos])
        yield from rec(pos + 1)
        del chosen[si][-len(expanded[pos]):]
        if saved is not None:
            for i, v in saved:
                nbr[i] = v

    yield from rec(0)


def all_structures_upto(vocab: Vocabulary, max_n: int, prune: Optional[int] = None) -> List[RelStructure]:
    out = []
    for n in range(max_n + 1):
        out.extend(enumerate_structures(vocab, n, prune))
    return out
