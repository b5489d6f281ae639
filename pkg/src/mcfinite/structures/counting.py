"""Density functions: how many structures on ``[n]`` have a property."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Tuple

from .. import kernels
from ..modarith import Residue
from .core import (
    DEFAULT_BUDGET_BITS,
    GRAPH,
    TERNARY,
    BudgetExceeded,
    RelStructure,
    enumerate_structures,
)
from .properties import PropertySpec, holds, is_group_table, parse_property

# masks visited by the simple-graph kernel before falling back
KERNEL_BUDGET_BITS = {"cython": 24, "python": 16}
# search nodes allowed for degree-pruned enumeration in "auto" mode
AUTO_NODE_BUDGET = 2_000_000

METHODS = ("auto", "kernel", "enumerate", "pruned", "counter", "formula")


@dataclass(frozen=True)
class DensityEntry:
    n: int
    count: Optional[int]
    residue: Optional[Residue]
    method: str


@dataclass
class DensityTable:
    property: str
    modulus: Optional[int]
    entries: List[DensityEntry] = field(default_factory=list)

    def counts(self) -> List[Optional[int]]:
        return [e.count for e in self.entries]

    def residues(self) -> List[Optional[int]]:
        return [e.residue.value if e.residue else None for e in self.entries]


def _kernel_ok(p: PropertySpec, n: int) -> bool:
    if p.atoms is None or p.counting_vocab() != GRAPH:
        return False
    bits = n * (n - 1) // 2
    return bits <= KERNEL_BUDGET_BITS[kernels.BACKEND]


def _count_enum(p: PropertySpec, n: int, prune: Optional[int], shard=None,
                node_budget: Optional[int] = None) -> int:
    vocab = p.counting_vocab()
    return sum(
        1 for s in enumerate_structures(vocab, n, prune, shard=shard, node_budget=node_budget)
        if holds(p, s)
    )


def _count_kernel(p: PropertySpec, n: int, lo: int = 0, hi: int = -1) -> int:
    return kernels.active.count_graphs(n, list(p.atoms), lo, hi)


def _shard_worker(args) -> int:
    text, n, method, shard_bits, idx = args
    p = parse_property(text)
    if method == "kernel":
        total = 1 << (n * (n - 1) // 2)
        step = -(-total // (1 << shard_bits))
        return _count_kernel(p, n, idx * step, min(total, (idx + 1) * step))
    prune = p.degree_bound if method == "pruned" else None
    return _count_enum(p, n, prune, shard=(shard_bits, idx))


def _sharded(p: PropertySpec, n: int, method: str, jobs: int) -> int:
    shard_bits = max(1, (jobs - 1).bit_length() + 1)
    work = [(p.text, n, method, shard_bits, i) for i in range(1 << shard_bits)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return sum(pool.map(_shard_worker, work))


def density_with_method(p: PropertySpec, n: int, method: str = "auto", jobs: int = 1,
                        node_budget: Optional[int] = None) -> Tuple[int, str]:
    """Count members on ``[n]``; returns ``(count, method actually used)``.

    ``auto`` tries, in order: the simple-graph mask kernel, an exhaustive
    special-purpose counter, degree-pruned enumeration (node-budgeted),
    plain enumeration, and finally a closed-form formula if the property
    has one.  The returned method name says which answered.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    parallel = jobs > 1 and _reparseable(p)

    if method == "kernel" or (method == "auto" and _kernel_ok(p, n)):
        if p.atoms is None or p.counting_vocab() != GRAPH:
            raise ValueError(f"{p.text} has no simple-graph kernel form")
        if parallel:
            return _sharded(p, n, "kernel", jobs), "kernel"
        return _count_kernel(p, n), "kernel"
    if method == "counter" or (method == "auto" and p.counter is not None):
        if p.counter is None:
            raise ValueError(f"{p.text} has no dedicated counter")
        return p.counter(n), "counter"
    if method == "formula":
        if p.formula is None:
            raise ValueError(f"{p.text} has no closed form")
        return p.formula(n), "formula"
    if method == "pruned" or (method == "auto" and p.degree_bound is not None):
        if p.degree_bound is None:
            raise ValueError(f"{p.text} has no degree bound to prune with")
        budget = node_budget if node_budget is not None else (
            AUTO_NODE_BUDGET if method == "auto" else None)
        try:
            if parallel:
                return _sharded(p, n, "pruned", jobs), "pruned"
            return _count_enum(p, n, p.degree_bound, node_budget=budget), "pruned"
        except BudgetExceeded:
            if method == "auto" and p.formula is not None:
                return p.formula(n), "formula"
            raise
    try:
        if parallel:
            return _sharded(p, n, "enumerate", jobs), "enumerate"
        return _count_enum(p, n, None), "enumerate"
    except BudgetExceeded:
        if method == "auto" and p.formula is not None:
            return p.formula(n), "formula"
        raise


def _reparseable(p: PropertySpec) -> bool:
    try:
        return parse_property(p.text) == p
    except ValueError:
        return False


def density(p: PropertySpec, n: int, method: str = "auto", jobs: int = 1) -> int:
    return density_with_method(p, n, method, jobs)[0]


def density_mod(p: PropertySpec, n: int, m: int, method: str = "auto", jobs: int = 1) -> Residue:
    return Residue(density(p, n, method, jobs), m)


def density_series(p: PropertySpec, ns: Iterable[int], method: str = "auto",
                   jobs: int = 1) -> Iterator[Tuple[int, int, str]]:
    """``(n, count, method)`` for each n.

    In ``auto`` mode a budget fallback to the closed form is sticky: once
    some n needed it, every larger n goes straight to the formula.
    """
    formula_from = None
    for n in ns:
        if method == "auto" and formula_from is not None and n >= formula_from:
            yield n, p.formula(n), "formula"
            continue
        count, used = density_with_method(p, n, method, jobs)
        if used == "formula" and method == "auto":
            formula_from = n if formula_from is None else min(formula_from, n)
        yield n, count, used


def density_table(p: PropertySpec, ns: Iterable[int], m: Optional[int] = None,
                  method: str = "auto", jobs: int = 1) -> DensityTable:
    table = DensityTable(p.text, m)
    for n, count, used in density_series(p, ns, method, jobs):
        table.entries.append(
            DensityEntry(n, count, Residue(count, m) if m else None, used)
        )
    return table


# -- ternary spaces -------------------------------------------------------------

def _ternary_clauses(n: int):
    """Ground Horn clauses of T1-T4 over slot indices of ``[n]^3``.

    A clause ``(premises, conclusion)`` reads "all premises present implies
    conclusion present"; ``conclusion is None`` forbids the premises
    together.  Returns clauses grouped by the largest slot they mention.
    """
    idx = {t: i for i, t in enumerate(itertools.product(range(1, n + 1), repeat=3))}
    by_last: List[List[Tuple[Tuple[int, ...], Optional[int]]]] = [[] for _ in idx]

    def add(prem, concl):
        lits = list(prem) + ([concl] if concl is not None else [])
        by_last[max(lits)].append((tuple(prem), concl))

    r = range(1, n + 1)
    for a, b, c in itertools.product(r, repeat=3):
        add([idx[a, b, c]], idx[c, b, a])
        if b != c:
            add([idx[a, b, c], idx[a, c, b]], None)
        for d in r:
            add([idx[a, b, c], idx[a, c, d]], idx[b, c, d])
            add([idx[a, b, c], idx[a, c, d]], idx[a, b, d])
    return len(idx), by_last


def count_ternary_spaces(n: int, method: str = "backtrack") -> int:
    """Labeled ternary spaces on ``[n]``.

    ``filter`` runs the axiom checker over all ``2^(n^3)`` relations;
    ``backtrack`` decides tuples one at a time and rejects a branch as soon
    as a fully decided ground axiom instance fails.
    """
    if method == "filter":
        p = parse_property("ternary-space")
        return sum(1 for s in enumerate_structures(TERNARY, n) if holds(p, s))
    if method != "backtrack":
        raise ValueError(f"unknown method {method!r}")
    size, by_last = _ternary_clauses(n)
    val = [False] * size

    def ok(pos: int) -> bool:
        for prem, concl in by_last[pos]:
            if all(val[i] for i in prem):
                if concl is None or not val[concl]:
                    return False
        return True

    def rec(pos: int) -> int:
        if pos == size:
            return 1
        total = 0
        for bit in (False, True):
            val[pos] = bit
            if ok(pos):
                total += rec(pos + 1)
        val[pos] = False
        return total

    return rec(0)


# -- group tables -----------------------------------------------------------------

def _latin_squares(n: int):
    """Latin squares as row lists, each row a permutation, columns kept distinct."""
    perms = list(itertools.permutations(range(1, n + 1)))
    rows: List[Tuple[int, ...]] = []
    used = [set() for _ in range(n)]

    def rec():
        if len(rows) == n:
            yield list(rows)
            return
        for perm in perms:
            if any(perm[j] in used[j] for j in range(n)):
                continue
            rows.append(perm)
            for j in range(n):
                used[j].add(perm[j])
            yield from rec()
            rows.pop()
            for j in range(n):
                used[j].discard(perm[j])

    yield from rec()


def table_structure(rows: List[Tuple[int, ...]]) -> RelStructure:
    n = len(rows)
    rel = frozenset((a, b, rows[a - 1][b - 1]) for a in range(1, n + 1) for b in range(1, n + 1))
    return RelStructure._trusted(TERNARY, n, (rel,))


def count_group_tables(n: int, method: str = "backtrack") -> int:
    """Ternary relations on ``[n]`` that are graphs of group operations.

    ``filter``: enumerate Latin squares row-permutation by row-permutation
    and test each as a ternary structure with the group-table predicate.
    ``functions``: filter all ``n^(n^2)`` operation tables (small n only).
    ``backtrack``: fill the table cell by cell, keeping rows and columns
    injective and rejecting as soon as a fully determined associativity
    instance fails.
    """
    if n == 0:
        return 0
    if method == "filter":
        p = parse_property("group-table")
        return sum(1 for rows in _latin_squares(n) if holds(p, table_structure(rows)))
    if method == "functions":
        if n > 3:
            raise BudgetExceeded(f"{n}^{n * n} operation tables exceed the budget")
        total = 0
        for flat in itertools.product(range(1, n + 1), repeat=n * n):
            table = [[0] * (n + 1)] + [[0] + list(flat[i * n:(i + 1) * n]) for i in range(n)]
            if is_group_table(table, n):
                total += 1
        return total
    if method != "backtrack":
        raise ValueError(f"unknown method {method!r}")
    cells = [(a, b) for a in range(n) for b in range(n)]
    tab = [[-1] * n for _ in range(n)]
    row_used = [[False] * n for _ in range(n)]
    col_used = [[False] * n for _ in range(n)]

    def assoc_ok() -> bool:
        for x in range(n):
            for y in range(n):
                xy = tab[x][y]
                if xy < 0:
                    continue
                for z in range(n):
                    yz = tab[y][z]
                    if yz < 0:
                        continue
                    left, right = tab[xy][z], tab[x][yz]
                    if left >= 0 and right >= 0 and left != right:
                        return False
        return True

    def rec(pos: int) -> int:
        if pos == len(cells):
            # an associative quasigroup is a group
            return 1
        a, b = cells[pos]
        total = 0
        for v in range(n):
            if row_used[a][v] or col_used[b][v]:
                continue
            tab[a][b] = v
            row_used[a][v] = col_used[b][v] = True
            if assoc_ok():
                total += rec(pos + 1)
            row_used[a][v] = col_used[b][v] = False
            tab[a][b] = -1
        return total

    return rec(0)
