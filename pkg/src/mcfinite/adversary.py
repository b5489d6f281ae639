"""CRT-built MC-finite sequences that encode an arbitrary bit source.

``a_n`` is the unique integer in ``{1, ..., p_1^n ... p_n^n}`` with
``a_n = b_k (mod p_k^n)`` for every ``k <= n``.  Modulo a fixed prime
power ``p_i^j`` the sequence is constant (equal to ``b_i``) from
``n = max(i, j)`` on, whatever the bits are.  Here the bits come from
computable generators, so the sequence is a stress input, not a witness
of non-computability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, List, Tuple

from .modarith import Residue, crt_solve, nth_prime

DEFAULT_MAX_N = 8


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class BitSource:
    """Deterministic bits ``b_1, b_2, ...`` (1-indexed)."""

    name: str
    fn: Callable[[int], int]

    def __call__(self, i: int) -> int:
        if i < 1:
            raise ValueError("bit index must be >= 1")
        return self.fn(i)

    def prefix(self, count: int) -> List[int]:
        return [self(i) for i in range(1, count + 1)]


def alternating() -> BitSource:
    """1, 0, 1, 0, ..."""
    return BitSource("alternating", lambda i: i % 2)


def thue_morse() -> BitSource:
    """Thue-Morse word from its start: b_i = parity of popcount(i - 1)."""
    return BitSource("thue-morse", lambda i: bin(i - 1).count("1") % 2)


def from_list(bits: Iterable[int]) -> BitSource:
    """Explicit finite prefix, padded with zeros."""
    values = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in values):
        raise ValueError("bits must be 0 or 1")
    label = "list:" + ",".join(map(str, values))
    return BitSource(label, lambda i: values[i - 1] if i <= len(values) else 0)


def parse_bits(spec: str) -> BitSource:
    spec = spec.strip()
    if spec == "alternating":
        return alternating()
    if spec == "thue-morse":
        return thue_morse()
    if spec.startswith("list:"):
        body = spec[5:].strip()
        return from_list(int(x) for x in body.split(",") if x.strip()) if body else from_list(())
    raise ValueError(f"unknown bit source {spec!r} (alternating, thue-morse, list:...)")


def adversary_term(bits: BitSource, n: int, max_n: int = DEFAULT_MAX_N) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > max_n:
        raise BudgetExceeded(f"n = {n} exceeds the precision budget max_n = {max_n}")
    congruences = [Residue(bits(k), nth_prime(k) ** n) for k in range(1, n + 1)]
    sol = crt_solve(congruences)
    # representative in {1, ..., P} rather than {0, ..., P-1}
    return sol.value or sol.modulus


@dataclass(frozen=True)
class StabilizationRow:
    n: int
    residue: int
    expected: int
    applies: bool  # n >= max(i, j)

    @property
    def ok(self) -> bool:
        return (not self.applies) or self.residue == self.expected


def verify_stabilization(bits: BitSource, i: int, j: int, n_range: Iterable[int],
                         max_n: int = DEFAULT_MAX_N) -> List[StabilizationRow]:
    """``a_n mod p_i^j`` for each ``n``, checked against ``b_i`` once ``n >= max(i, j)``."""
    if i < 1 or j < 1:
        raise ValueError("i and j must be >= 1")
    q = nth_prime(i) ** j
    start = max(i, j)
    rows = []
    for n in n_range:
        a = adversary_term(bits, n, max_n)
        rows.append(StabilizationRow(n, a % q, bits(i), n >= start))
    return rows


def crt_consistent(bits: BitSource, n: int, max_n: int = DEFAULT_MAX_N) -> List[Tuple[int, bool]]:
    a = adversary_term(bits, n, max_n)
    return [(k, a % nth_prime(k) ** n == bits(k)) for k in range(1, n + 1)]
