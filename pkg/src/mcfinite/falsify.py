"""Refuting claimed sequence values by comparing residues with a trusted model.

A mismatch modulo any ``m`` proves the claimed value wrong (given the
model).  Agreement modulo every tested ``m`` proves nothing: a claim off by
a multiple of all tested moduli passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from .prs import PolyRecurrence, eval_mod

DEFAULT_MODULI = tuple(range(2, 65))


class BFileError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class SequenceFile:
    entries: Tuple[Tuple[int, int], ...]
    source: Optional[str] = None

    def __post_init__(self) -> None:
        for (a, _), (b, _) in zip(self.entries, self.entries[1:]):
            if b <= a:
                raise ValueError(f"indices not increasing: {b} after {a}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def value(self, n: int) -> int:
        for k, v in self.entries:
            if k == n:
                return v
        raise KeyError(n)

    def replace(self, n: int, value: int) -> "SequenceFile":
        if all(k != n for k, _ in self.entries):
            raise KeyError(n)
        return SequenceFile(tuple((k, value if k == n else v) for k, v in self.entries), self.source)


def ingest_bfile(text: str, source: Optional[str] = None) -> SequenceFile:
    """Parse ``n value`` lines; blank lines and ``#`` comments are skipped."""
    entries: List[Tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BFileError(f"expected 'n value', got {line!r}", lineno)
        try:
            n, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise BFileError(f"non-integer field in {line!r}", lineno) from None
        if n < 1:
            raise BFileError(f"index {n} must be >= 1", lineno)
        if entries and n <= entries[-1][0]:
            raise BFileError(f"indices not increasing: {n} after {entries[-1][0]}", lineno)
        entries.append((n, v))
    return SequenceFile(tuple(entries), source)


def format_bfile(seq: Iterable[Tuple[int, int]]) -> str:
    return "".join(f"{n} {v}\n" for n, v in seq)


@dataclass(frozen=True)
class Mismatch:
    n: int
    modulus: int
    expected: int
    got: int

    def line(self) -> str:
        return f"MISMATCH n={self.n} m={self.modulus} expected={self.expected} got={self.got}"


@dataclass
class FalsificationReport:
    moduli: Tuple[int, ...]
    checked: int
    mismatches: List[Mismatch] = field(default_factory=list)

    @property
    def falsified(self) -> bool:
        return bool(self.mismatches)

    @property
    def verdict(self) -> str:
        return "FALSIFIED" if self.falsified else "CONSISTENT"

    def lines(self) -> List[str]:
        out = [m.line() for m in self.mismatches]
        out.append(f"verdict: {self.verdict}")
        if not self.falsified:
            out.append("note: agreement modulo the tested moduli does not verify the values")
        return out

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"


def falsify(seq: SequenceFile, model: PolyRecurrence, moduli: Iterable[int] = DEFAULT_MODULI,
            coord: int = 1) -> FalsificationReport:
    ms = tuple(sorted(set(moduli)))
    if any(m < 2 for m in ms):
        raise ValueError("moduli must be >= 2")
    report = FalsificationReport(ms, len(seq))
    for n, claimed in seq:
        for m in ms:
            expected = eval_mod(model, m, n, coord).value
            got = claimed % m
            if got != expected:
                report.mismatches.append(Mismatch(n, m, expected, got))
    return report


def parse_moduli(text: str) -> Tuple[int, ...]:
    """``LO..HI`` or a comma list such as ``2,3,5``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            out = tuple(range(int(lo), int(hi) + 1))
        else:
            out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"bad moduli {text!r}; use LO..HI or a comma list") from None
    if not out:
        raise ValueError(f"empty moduli range {text!r}")
    if min(out) < 2:
        raise ValueError("moduli must be >= 2")
    return out
