"""Orbit divisibility and the modular linear recurrence for bounded-degree
classes.

For a class whose members have Gaifman degree at most ``d`` and modulus
``m``, put ``C = m * d!``.  Counting structures on ``[n]`` by their class
under disjoint-union equivalence, the counts at ``n`` are, modulo ``m``, a
fixed linear combination (depending on ``n mod C``) of the counts at the
multiple ``C * floor((n - 1) / C)``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .du import du_column
from .structures import (
    BudgetExceeded,
    PropertySpec,
    RelStructure,
    Vocabulary,
    density_series,
    disjoint_union,
    enumerate_structures,
    format_structure,
    relabel,
    with_degree_bound,
)

MAX_ORBIT_SET = 8


# -- orbits ---------------------------------------------------------------------

def _key(s: RelStructure):
    return s.relations


def orbit_size(s: RelStructure, fixed_subset: Iterable[int]) -> int:
    """Number of distinct images of ``s`` under permutations of ``fixed_subset``
    that fix every other point."""
    subset = sorted(set(fixed_subset))
    if any(not 1 <= x <= s.n for x in subset):
        raise ValueError("subset must lie inside the universe")
    if len(subset) > MAX_ORBIT_SET:
        raise BudgetExceeded(f"|A'| = {len(subset)} exceeds {MAX_ORBIT_SET}")
    seen = set()
    base = list(range(1, s.n + 1))
    for image in itertools.permutations(subset):
        perm = list(base)
        for src, dst in zip(subset, image):
            perm[src - 1] = dst
        seen.add(_key(relabel(s, perm)))
    return len(seen)


def stabilizer_order(s: RelStructure, fixed_subset: Iterable[int]) -> int:
    """Permutations of the subset that map ``s`` to itself."""
    subset = sorted(set(fixed_subset))
    base = list(range(1, s.n + 1))
    key = _key(s)
    count = 0
    for image in itertools.permutations(subset):
        perm = list(base)
        for src, dst in zip(subset, image):
            perm[src - 1] = dst
        if _key(relabel(s, perm)) == key:
            count += 1
    return count


@dataclass(frozen=True)
class DvlmCheck:
    neighbors: int  # d': Gaifman neighbours of v inside A'
    binomial: int  # C(|A'|, d')
    orbit: int
    divides: bool


def check_dvlm(s: RelStructure, fixed_subset: Iterable[int], v: int) -> DvlmCheck:
    """Does C(|A'|, d') divide the orbit size, where d' counts v's neighbours in A'?"""
    subset = sorted(set(fixed_subset))
    if v in subset:
        raise ValueError(f"vertex {v} must lie outside A'")
    if not 1 <= v <= s.n:
        raise ValueError(f"vertex {v} not in the universe")
    nbr = s.adjacency[v - 1]
    d_prime = sum(1 for x in subset if nbr >> (x - 1) & 1)
    if d_prime == 0:
        raise ValueError(f"vertex {v} has no neighbours in A'; the check needs d' >= 1")
    orbit = orbit_size(s, subset)
    binom = math.comb(len(subset), d_prime)
    return DvlmCheck(d_prime, binom, orbit, orbit % binom == 0)


@dataclass(frozen=True)
class DvlmInstance:
    structure: RelStructure
    subset: Tuple[int, ...]
    vertex: int


def random_dvlm_instances(trials: int, max_n: int, seed: int) -> List[DvlmInstance]:
    """Seeded instances from ``random.Random(seed)`` (Mersenne Twister).

    Each draw picks ``n`` in ``[2, max_n]``, a simple graph with edge
    probability 1/2 (every fourth trial instead a ternary structure with
    three random triples), a nonempty proper subset ``A'`` of at most
    eight points and ``v`` outside it; draws where ``v`` has no neighbour
    in ``A'`` are rejected and redrawn.
    """
    from .structures import TERNARY

    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    rng = random.Random(seed)
    out: List[DvlmInstance] = []
    while len(out) < trials:
        n = rng.randint(2, max_n)
        if len(out) % 4 == 3:
            tuples = {tuple(rng.randint(1, n) for _ in range(3)) for _ in range(3)}
            s = RelStructure(TERNARY, n, (frozenset(tuples),))
        else:
            edges = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1) if rng.random() < 0.5]
            s = RelStructure.graph(n, edges)
        size = rng.randint(1, min(n - 1, MAX_ORBIT_SET))
        subset = tuple(sorted(rng.sample(range(1, n + 1), size)))
        outside = [x for x in range(1, n + 1) if x not in subset]
        v = rng.choice(outside)
        if not any(s.adjacency[v - 1] >> (x - 1) & 1 for x in subset):
            continue
        out.append(DvlmInstance(s, subset, v))
    return out


# -- recurrence parameters ----------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceParams:
    modulus: int
    degree: int
    check_upto: int = 5

    def __post_init__(self) -> None:
        if self.modulus < 1 or self.degree < 0:
            raise ValueError("need modulus >= 1 and degree >= 0")
        C = self.stride
        for t in range(1, self.check_upto + 1):
            for dp in range(1, self.degree + 1):
                if math.comb(t * C, dp) % self.modulus:
                    raise AssertionError(f"{self.modulus} does not divide C({t * C}, {dp})")

    @property
    def stride(self) -> int:
        """``C = m * d!``."""
        return self.modulus * math.factorial(self.degree)

    def t(self, n: int) -> int:
        return (n - 1) // self.stride

    def base(self, n: int) -> int:
        """``C * t(n)``, the multiple of C the recurrence reaches back to."""
        return self.stride * self.t(n)

    def tail(self, n: int) -> int:
        """Universe size of the free part, ``n - C t(n)``, in ``1..C``."""
        return n - self.base(n)


# -- equivalence tables -------------------------------------------------------------

def degree_probe(vocab: Vocabulary, d: int) -> Optional[RelStructure]:
    """A structure with one point of Gaifman degree ``d + 1`` (None if impossible)."""
    sym_idx = next((i for i, s in enumerate(vocab.symbols) if s.arity >= 2), None)
    if sym_idx is None:
        return None
    arity = vocab.symbols[sym_idx].arity
    per = arity - 1
    k = -(-(d + 1) // per)
    n = 1 + k * per
    tuples = set()
    for j in range(k):
        t = (1,) + tuple(2 + j * per + i for i in range(per))
        tuples.update(vocab.expand(sym_idx, t))
    rels = tuple(frozenset(tuples) if i == sym_idx else frozenset() for i in range(len(vocab.symbols)))
    return RelStructure(vocab, n, rels)


@dataclass
class EquivalenceTable:
    """Blocks of structures with identical DU columns against ``witnesses``.

    Block 0 is the sink (all-zero column: it contains every structure of
    degree above ``d``); ``counts[n][b]`` is the number of structures on
    ``[n]`` in block ``b``, reduced mod ``modulus``.
    """

    property: PropertySpec
    degree: int
    modulus: int
    witnesses: List[RelStructure]
    signatures: List[int] = field(default_factory=list)
    representatives: List[RelStructure] = field(default_factory=list)
    counts: Dict[int, List[int]] = field(default_factory=dict)
    exact: Dict[int, List[int]] = field(default_factory=dict)

    sink = 0

    @property
    def vocab(self) -> Vocabulary:
        return self.property.counting_vocab()

    def block_count(self) -> int:
        return len(self.signatures)

    def block_of(self, s: RelStructure, register: bool = False) -> int:
        sig = du_column(self.property, self.witnesses, s)
        try:
            return self.signatures.index(sig)
        except ValueError:
            if not register:
                raise KeyError(f"{format_structure(s)} falls in a block unseen by the table")
            self.signatures.append(sig)
            self.representatives.append(s)
            return len(self.signatures) - 1

    def vector(self, n: int) -> List[int]:
        """``d_E(n)``: counts of the non-sink blocks mod m."""
        if n not in self.counts:
            raise KeyError(f"no density data for n = {n}")
        row = self.counts[n]
        return [row[b] if b < len(row) else 0 for b in range(1, self.block_count())]

    def count(self, n: int, block: int) -> int:
        if n not in self.counts:
            raise KeyError(f"no density data for n = {n}")
        row = self.counts[n]
        return row[block] if block < len(row) else 0


def equiv_table(p: PropertySpec, d: int, m: int, witness_set: Sequence[RelStructure],
                n_range: Iterable[int]) -> EquivalenceTable:
    q = with_degree_bound(p, d)
    vocab = q.counting_vocab()
    witnesses = list(witness_set)
    probe = degree_probe(vocab, d)
    table = EquivalenceTable(q, d, m, witnesses)
    # sink first: the all-zero column, represented by the degree probe
    table.signatures.append(0)
    table.representatives.append(probe if probe is not None else RelStructure.empty(vocab))
    if probe is not None and du_column(q, witnesses, probe) != 0:
        raise AssertionError("degree probe has a nonzero column")
    for s in sorted(witnesses, key=lambda s: s.n):
        if probe is None or s.max_degree() <= d:
            table.block_of(s, register=True)
    for n in sorted(set(n_range)):
        exact = [0] * table.block_count()
        for s in enumerate_structures(vocab, n, prune=d):
            b = table.block_of(s, register=True)
            if b >= len(exact):
                exact.extend([0] * (b + 1 - len(exact)))
            exact[b] += 1
        table.exact[n] = exact
        table.counts[n] = [x % m for x in exact]
    return table


@dataclass
class ModularRecurrence:
    """``coeffs[rho][D][E]``: weight of block E at C*t(n) in block D at n,
    for ``n mod C == rho``; blocks numbered as in the table (sink excluded
    from sums but kept in indexing)."""

    params: RecurrenceParams
    blocks: int
    coeffs: List[List[List[int]]]

    def coefficient(self, target: int, source: int, rho: int) -> int:
        return self.coeffs[rho][target][source]


def extract_recurrence(table: EquivalenceTable, params: RecurrenceParams) -> ModularRecurrence:
    """Count, for each tail size and block pair, the structures B on the tail
    with ``rep(E) + B`` landing in ``D``."""
    if params.modulus != table.modulus:
        raise ValueError("table and parameters use different moduli")
    m, C, d = params.modulus, params.stride, params.degree
    vocab = table.vocab
    nb = table.block_count()
    tails = {}
    for rho in range(C):
        size = (rho - 1) % C + 1
        if size not in tails:
            tails[size] = list(enumerate_structures(vocab, size, prune=d))
    coeffs = [[[0] * nb for _ in range(nb)] for _ in range(C)]
    for rho in range(C):
        size = (rho - 1) % C + 1
        for e in range(1, nb):
            rep = table.representatives[e]
            for b in tails[size]:
                target = table.block_of(disjoint_union(rep, b))
                coeffs[rho][target][e] += 1
        for row in coeffs[rho]:
            for e in range(nb):
                row[e] %= m
    return ModularRecurrence(params, nb, coeffs)


@dataclass(frozen=True)
class RecurrenceRow:
    block: int
    n: int
    lhs: int
    rhs: int
    residual: int


def verify_recurrence(rec: ModularRecurrence, table: EquivalenceTable,
                      params: RecurrenceParams, n_range: Iterable[int]) -> List["RecurrenceRow"]:
    m, C = params.modulus, params.stride
    rows = []
    for n in n_range:
        base = params.base(n)
        rho = n % C
        src = table.vector(base)
        for D in range(1, rec.blocks):
            lhs = table.count(n, D)
            rhs = sum(rec.coeffs[rho][D][e] * src[e - 1] for e in range(1, rec.blocks)) % m
            rows.append(RecurrenceRow(D, n, lhs, rhs, (lhs - rhs) % m))
    return rows


# -- ultimate vanishing -----------------------------------------------------------------

@dataclass
class VanishReport:
    modulus: int
    residues: List[Tuple[int, int, str]]  # (n, residue, method)
    first_zero: Optional[int]  # from here on every tested residue is 0

    @property
    def vanishes(self) -> bool:
        return self.first_zero is not None


def first_vanishing_index(residues: Sequence[Tuple[int, int]]) -> Optional[int]:
    """Least n with every listed residue from n onwards equal to 0."""
    first = None
    for n, r in reversed(list(residues)):
        if r != 0:
            break
        first = n
    return first


def check_ultimate_vanishing(p: PropertySpec, m: int, n_range: Iterable[int],
                             method: str = "auto", jobs: int = 1) -> VanishReport:
    ns = sorted(set(n_range))
    if m == 1:
        return VanishReport(1, [(n, 0, "trivial") for n in ns], ns[0] if ns else None)
    if not p.connected or p.degree_bound is None:
        raise ValueError(f"{p.text} does not certify connectivity and a degree bound")
    residues = [(n, count % m, used) for n, count, used in density_series(p, ns, method, jobs)]
    return VanishReport(m, residues, first_vanishing_index([(n, r) for n, r, _ in residues]))
