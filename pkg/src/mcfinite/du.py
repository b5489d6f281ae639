"""Disjoint-union and substitution matrices over GF(2).

The true matrices are infinite; everything here works on a finite set of
witness structures.  A finite submatrix of rank ``r`` certifies that the
full matrix has rank at least ``r``; it never certifies an upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .structures import (
    GRAPH,
    PropertySpec,
    RelStructure,
    Vocabulary,
    VocabularyMismatch,
    all_structures_upto,
    disjoint_union,
    format_structure,
    holds,
    parse_structure,
)

OUTSIDE = "outside"


@dataclass(frozen=True)
class Gf2Matrix:
    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]
    rows: Tuple[int, ...]  # bit j of rows[i] is entry (i, j)

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.row_labels):
            raise ValueError("one bit row per row label")
        if len(set(self.row_labels)) != len(self.row_labels):
            raise ValueError("row labels must be unique")
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("column labels must be unique")
        width = len(self.col_labels)
        if any(r >> width for r in self.rows):
            raise ValueError("row has bits beyond the last column")

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], row_labels=None, col_labels=None) -> "Gf2Matrix":
        nrows = len(entries)
        ncols = len(entries[0]) if entries else 0
        if any(len(r) != ncols for r in entries):
            raise ValueError("matrix is not rectangular")
        rows = tuple(sum((1 << j) for j, x in enumerate(r) if x & 1) for r in entries)
        return cls(
            tuple(row_labels or (str(i) for i in range(nrows))),
            tuple(col_labels or (str(j) for j in range(ncols))),
            rows,
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> List[List[int]]:
        return [[self.entry(i, j) for j in range(len(self.col_labels))] for i in range(len(self.rows))]

    def column(self, j: int) -> int:
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.rows))

    def render(self) -> str:
        """Aligned 0/1 grid, one row per line, labels on the left."""
        width = max((len(x) for x in self.row_labels), default=0)
        lines = []
        for label, row in zip(self.row_labels, self.to_lists()):
            lines.append(label.ljust(width) + "  " + " ".join(map(str, row)))
        return "\n".join(lines)


def gf2_rank(mat: Union[Gf2Matrix, Sequence[Sequence[int]]]) -> int:
    """Rank over GF(2) by XOR elimination on bit rows."""
    rows = list(mat.rows) if isinstance(mat, Gf2Matrix) else list(Gf2Matrix.from_lists(mat).rows)
    rank = 0
    while rows:
        pivot = rows.pop()
        if not pivot:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def _labels(structures: Sequence[RelStructure]) -> Tuple[str, ...]:
    labels = tuple(format_structure(s) for s in structures)
    if len(set(labels)) != len(labels):
        raise ValueError("witness set lists a structure twice")
    return labels


def du_submatrix(p: PropertySpec, w: Sequence[RelStructure]) -> Gf2Matrix:
    """Entry (i, j) is 1 iff ``w_i + w_j`` (disjoint union) has property ``p``."""
    labels = _labels(w)
    rows = []
    for a in w:
        bits = 0
        for j, b in enumerate(w):
            if holds(p, disjoint_union(a, b)):
                bits |= 1 << j
        rows.append(bits)
    return Gf2Matrix(labels, labels, tuple(rows))


def du_column(p: PropertySpec, w: Sequence[RelStructure], s: RelStructure) -> int:
    """Bit ``i`` set iff ``w_i + s`` has property ``p``."""
    bits = 0
    for i, a in enumerate(w):
        if holds(p, disjoint_union(a, s)):
            bits |= 1 << i
    return bits


def du_equiv_classes(p: PropertySpec, w: Sequence[RelStructure]) -> List[List[RelStructure]]:
    """Group witnesses with identical DU columns, blocks in order of first member.

    Adding witnesses (rows) can only split blocks, never merge them.
    """
    _labels(w)
    blocks: dict = {}
    for s in w:
        blocks.setdefault(du_column(p, w, s), []).append(s)
    return list(blocks.values())


def default_witnesses(vocab: Vocabulary = GRAPH, max_n: int = 3) -> List[RelStructure]:
    """Every structure on at most ``max_n`` points, the empty one first."""
    return all_structures_upto(vocab, max_n)


def parse_witness_file(text: str, vocab: Optional[Vocabulary] = None):
    """One structure literal per line; ``@A0 literal`` lines are pointed rows.

    ``A0`` is a vertex number or ``out``.  Returns ``(columns, pointed)``.
    """
    cols: List[RelStructure] = []
    pointed: List[PointedStructure] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("@"):
                tag, _, lit = line[1:].partition(" ")
                s = parse_structure(lit, vocab)
                point = OUTSIDE if tag == "out" else int(tag)
                pointed.append(PointedStructure(s, point))
            else:
                cols.append(parse_structure(line, vocab))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return cols, pointed


# -- substitution -------------------------------------------------------------------

@dataclass(frozen=True)
class PointedStructure:
    structure: RelStructure
    point: Union[int, str]  # vertex in 1..n or OUTSIDE

    def __post_init__(self) -> None:
        if self.point != OUTSIDE:
            if not isinstance(self.point, int) or not 1 <= self.point <= self.structure.n:
                raise ValueError(f"distinguished point {self.point!r} not in [1, {self.structure.n}]")

    @property
    def label(self) -> str:
        tag = "out" if self.point == OUTSIDE else str(self.point)
        return f"@{tag} {format_structure(self.structure)}"


def subst_compose(pa: PointedStructure, b: RelStructure) -> RelStructure:
    """Replace the distinguished point of ``pa`` by a copy of ``b``.

    Survivors of ``pa`` keep their order as ``1..n_a-1``; ``b`` follows.
    Every binary tuple ``(x, a0)`` becomes ``(x, y)`` for all ``y`` in ``b``,
    and ``(a0, x)`` becomes ``(y, x)``; tuples touching only ``a0`` (unary
    facts, loops) are dropped.  An outside point gives the disjoint union.
    """
    a = pa.structure
    if a.vocab != b.vocab:
        raise VocabularyMismatch("pointed structure and substituted structure differ in vocabulary")
    if a.vocab.max_arity > 2:
        raise ValueError("substitution is only defined for vocabularies of arity <= 2")
    if pa.point == OUTSIDE:
        return disjoint_union(a, b)
    a0 = pa.point
    ren = {x: x - (x > a0) for x in range(1, a.n + 1) if x != a0}
    shift = a.n - 1
    bverts = [y + shift for y in range(1, b.n + 1)]
    rels = []
    for sym, ra, rb in zip(a.vocab.symbols, a.relations, b.relations):
        out = set(tuple(y + shift for y in t) for t in rb)
        for t in ra:
            if a0 not in t:
                out.add(tuple(ren[x] for x in t))
            elif sym.arity == 2:
                x, y = t
                if x == a0 and y != a0:
                    out.update((v, ren[y]) for v in bverts)
                elif y == a0 and x != a0:
                    out.update((ren[x], v) for v in bverts)
        rels.append(frozenset(out))
    return RelStructure._trusted(a.vocab, shift + b.n, tuple(rels))


def subst_submatrix(p: PropertySpec, pointed: Sequence[PointedStructure],
                    witnesses: Sequence[RelStructure]) -> Gf2Matrix:
    col_labels = _labels(witnesses)
    row_labels = tuple(pw.label for pw in pointed)
    rows = []
    for pw in pointed:
        bits = 0
        for j, b in enumerate(witnesses):
            if holds(p, subst_compose(pw, b)):
                bits |= 1 << j
        rows.append(bits)
    return Gf2Matrix(row_labels, col_labels, tuple(rows))


def all_pointed(structures: Iterable[RelStructure], include_outside: bool = True) -> List[PointedStructure]:
    out = []
    for s in structures:
        if include_outside:
            out.append(PointedStructure(s, OUTSIDE))
        out.extend(PointedStructure(s, v) for v in range(1, s.n + 1))
    return out
