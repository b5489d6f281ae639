"""Eventually periodic residue sequences and constant-work lookup.

A sequence ``a_1, a_2, ...`` modulo ``m`` with preperiod ``N`` and period
``r`` is stored as the table ``a_1 .. a_{N+r}``; any index, however large,
is answered by reducing ``n - N`` modulo ``r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from .modarith import Residue

IndexLike = Union[int, str]


class CertificateError(ValueError):
    """The supplied prefix does not certify a repetition."""


def parse_index(n: IndexLike) -> int:
    """Accept ints, decimal strings and ``base^exp`` / ``base**exp`` strings."""
    if isinstance(n, bool):
        raise TypeError("index must be an integer")
    if isinstance(n, int):
        return n
    text = str(n).strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", text)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ValueError(f"not an integer index: {n!r}")
    return int(text)


@dataclass(frozen=True)
class EventuallyPeriodic:
    modulus: int
    preperiod: int
    period: int
    table: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if self.preperiod < 0 or self.period < 1:
            raise ValueError("need preperiod >= 0 and period >= 1")
        table = tuple(int(v) % self.modulus for v in self.table)
        if len(table) != self.preperiod + self.period:
            raise ValueError(
                f"table has {len(table)} entries, expected "
                f"{self.preperiod + self.period}"
            )
        object.__setattr__(self, "table", table)

    def lookup(self, n: IndexLike) -> Residue:
        return lookup(self, n)

    def is_minimal(self) -> bool:
        return minimal_cycle(list(self.table), self.preperiod, self.period) == (
            self.preperiod,
            self.period,
        )

    def serialize(self) -> str:
        return serialize(self)


def lookup(ep: EventuallyPeriodic, n: IndexLike) -> Residue:
    """Return ``a_n mod m`` using index arithmetic only."""
    n = parse_index(n)
    if n < 1:
        raise ValueError(f"sequence index must be >= 1, got {n}")
    N, r = ep.preperiod, ep.period
    if n <= N + r:
        return Residue(ep.table[n - 1], ep.modulus)
    # a_{N+1+i} with i = (n - N - 1) mod r
    return Residue(ep.table[N + (n - N - 1) % r], ep.modulus)


def _cyclic_min_period(cycle: Sequence[int]) -> int:
    """Smallest rotation period of a cyclic word (prefix-function method)."""
    r = len(cycle)
    fail = [0] * r
    k = 0
    for i in range(1, r):
        while k and cycle[i] != cycle[k]:
            k = fail[k - 1]
        if cycle[i] == cycle[k]:
            k += 1
        fail[i] = k
    p = r - fail[-1]
    return p if r % p == 0 else r


def minimal_cycle(values: Sequence[int], preperiod: int, period: int) -> Tuple[int, int]:
    """Shrink a known-valid ``(preperiod, period)`` to the minimal pair.

    ``values`` holds at least ``preperiod + period`` terms and the caller
    guarantees ``a_{n+period} = a_n`` for every ``n > preperiod``.
    """
    if len(values) < preperiod + period:
        raise CertificateError("values shorter than preperiod + period")
    r = _cyclic_min_period(values[preperiod:preperiod + period])
    N = preperiod
    # values is 0-indexed: a_N is values[N-1]
    while N > 0 and values[N - 1] == values[N - 1 + r]:
        N -= 1
    return N, r


def from_cycle(m: int, values: Sequence[int], preperiod: int, period: int) -> EventuallyPeriodic:
    """Build the minimal representation from an exactly known cycle."""
    vals = [int(v) % m for v in values]
    N, r = minimal_cycle(vals, preperiod, period)
    return EventuallyPeriodic(m, N, r, tuple(vals[: N + r]))


def normalize(m: int, raw_prefix: Sequence[int]) -> EventuallyPeriodic:
    """Minimal ``(N, r)`` consistent with a prefix that has entered its cycle.

    A candidate ``(N, r)`` is accepted only when the prefix shows the whole
    cycle at least twice after the preperiod (``N + 2r <= len``); the
    smallest such ``r`` wins, then the smallest ``N`` for it.
    """
    if m < 1:
        raise ValueError("modulus must be >= 1")
    vals = [int(v) % m for v in raw_prefix]
    L = len(vals)
    for r in range(1, L // 2 + 1):
        # longest suffix on which period r holds: scan backwards
        N = L - r
        while N > 0 and vals[N - 1] == vals[N - 1 + r]:
            N -= 1
        if N + 2 * r <= L:
            return EventuallyPeriodic(m, N, r, tuple(vals[: N + r]))
    raise CertificateError(
        f"prefix of length {L} does not contain a certified repetition"
    )


def serialize(ep: EventuallyPeriodic) -> str:
    return f"{ep.modulus} {ep.preperiod} {ep.period}\n" + " ".join(map(str, ep.table)) + "\n"


def deserialize(text: str) -> EventuallyPeriodic:
    lines = [ln for ln in text.strip().splitlines()]
    if not lines:
        raise ValueError("empty periodic block")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError("first line must be 'm N r'")
    m, N, r = (int(x) for x in head)
    table: List[int] = [int(x) for x in lines[1].split()] if len(lines) > 1 else []
    return EventuallyPeriodic(m, N, r, tuple(table))
