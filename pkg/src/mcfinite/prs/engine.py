"""Polynomial recurrence systems: exact iteration and mod-m evaluation.

The state modulo ``m`` is the window of the last ``c`` vectors, so there
are at most ``m**(k*c)`` states and the state sequence repeats within that
many steps.  :func:`detect` finds the repetition once per ``(prs, m)`` and
stores the scalar residues as an :class:`~mcfinite.periodic.EventuallyPeriodic`
table; every later :func:`eval_mod` is a single table lookup.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
import os
import random
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .. import kernels
from ..modarith import Residue
from ..periodic import EventuallyPeriodic, IndexLike, deserialize, from_cycle, lookup, parse_index, serialize
from . import dsl

log = logging.getLogger(__name__)

# state spaces larger than this use Brent's method (constant memory) instead of a visited table
DEFAULT_MEMORY_CAP = 1 << 24


# step counters are C int64 in the compiled kernel
STEP_LIMIT = 2 ** 62


class DetectBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PolyRecurrence:
    """Vector recurrence of dimension ``dim`` and depth ``depth``.

    ``polys[i]`` is the canonical term tuple of the update polynomial for
    coordinate ``i + 1``; see :mod:`mcfinite.prs.dsl` for the encoding.
    """

    dim: int
    depth: int
    init: Tuple[Tuple[int, ...], ...]
    polys: Tuple[dsl.Terms, ...]

    def __post_init__(self) -> None:
        k, c = self.dim, self.depth
        if k < 1 or c < 1:
            raise ValueError("dimension and depth must be >= 1")
        if len(self.init) != c or any(len(v) != k for v in self.init):
            raise ValueError(f"need exactly {c} initial vectors of width {k}")
        if len(self.polys) != k:
            raise ValueError(f"need exactly {k} update polynomials")
        for terms in self.polys:
            for _, mono in terms:
                for var, e in mono:
                    if not 0 <= var < k * c:
                        raise ValueError(f"variable index {var} out of range")
                    if e < 0:
                        raise ValueError("negative exponent")

    @classmethod
    def parse(cls, text: str) -> "PolyRecurrence":
        return cls(*dsl.parse_document(text))

    def format(self) -> str:
        return dsl.format_document(self.dim, self.depth, self.init, self.polys)

    @cached_property
    def content_hash(self) -> str:
        return hashlib.sha256(self.format().encode()).hexdigest()[:32]

    @property
    def state_bits(self) -> int:
        return self.dim * self.depth

    def _eval_exact(self, window: Sequence[Tuple[int, ...]]) -> Tuple[int, ...]:
        # window[w] is a_{n-c+w}; variable (lag j, coord i) is window[c-j][i]
        flat = [x for vec in window for x in vec]
        k, c = self.dim, self.depth
        out = []
        for terms in self.polys:
            acc = 0
            for coef, mono in terms:
                v = coef
                for var, e in mono:
                    j, i = divmod(var, k)
                    v *= flat[(c - 1 - j) * k + i] ** e
                acc += v
            out.append(acc)
        return tuple(out)

    def program(self, m: int):
        """Flatten the polynomials for the kernels, coefficients mod ``m``."""
        k, c = self.dim, self.depth
        mono_off, mono_coef, fac_off, fac_var, fac_exp = [0], [], [0], [], []
        for terms in self.polys:
            for coef, mono in terms:
                mono_coef.append(coef % m)
                for var, e in mono:
                    j, i = divmod(var, k)
                    fac_var.append((c - 1 - j) * k + i)
                    fac_exp.append(e)
                fac_off.append(len(fac_var))
            mono_off.append(len(mono_coef))
        return mono_off, mono_coef, fac_off, fac_var, fac_exp


def parse_spec(text: str) -> PolyRecurrence:
    return PolyRecurrence.parse(text)


def format_spec(prs: PolyRecurrence) -> str:
    return prs.format()


def iterate_exact(prs: PolyRecurrence, n: int, modulus: Optional[int] = None) -> Tuple[int, ...]:
    """The vector ``a_n`` in exact integer arithmetic.

    With ``modulus`` set, every intermediate value is reduced modulo it;
    by the ring homomorphism Z -> Z/L this equals the exact ``a_n`` mod L
    and keeps iteration feasible for fast-growing (nonlinear) systems.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c = prs.depth
    if n <= c:
        vec = prs.init[n - 1]
        return tuple(x % modulus for x in vec) if modulus else vec
    window = list(prs.init)
    if modulus:
        window = [tuple(x % modulus for x in v) for v in window]
    for _ in range(n - c):
        new = prs._eval_exact(window)
        if modulus:
            new = tuple(x % modulus for x in new)
        window = window[1:] + [new]
    return window[-1]


def iterate_sequence(prs: PolyRecurrence, count: int, coord: int = 1,
                     modulus: Optional[int] = None) -> List[int]:
    """Scalar terms ``a_1 .. a_count`` (coordinate ``coord``)."""
    window = list(prs.init)
    if modulus:
        window = [tuple(x % modulus for x in v) for v in window]
    out = [v[coord - 1] for v in window[:count]]
    while len(out) < count:
        new = prs._eval_exact(window)
        if modulus:
            new = tuple(x % modulus for x in new)
        window = window[1:] + [new]
        out.append(new[coord - 1])
    return out


@dataclass(frozen=True)
class ModState:
    modulus: int
    window: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        m = self.modulus
        if m < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "window", tuple(tuple(x % m for x in v) for v in self.window))


def initial_state(prs: PolyRecurrence, m: int) -> ModState:
    return ModState(m, prs.init)


def step_mod(prs: PolyRecurrence, state: ModState) -> ModState:
    """Apply the update map with all arithmetic in Z_m and shift the window."""
    m = state.modulus
    if len(state.window) != prs.depth or any(len(v) != prs.dim for v in state.window):
        raise ValueError("window shape does not match the recurrence")
    new = tuple(x % m for x in prs._eval_exact(state.window))
    return ModState(m, state.window[1:] + (new,))


@dataclass(frozen=True)
class StateCycle:
    """Repetition of the mod-m window sequence plus the scalar table.

    The window after ``s`` steps first recurs ``period`` steps later when
    ``s == preperiod``; ``preperiod + period <= bound = m**(k*c)``.
    """

    modulus: int
    preperiod: int
    period: int
    bound: int
    scalar: EventuallyPeriodic
    method: str = field(default="table", compare=False)
    backend: str = field(default="python", compare=False)


def _orbit(prs: PolyRecurrence, m: int, coord: int, max_steps: Optional[int],
           memory_cap: int, backend=None):
    k, c = prs.dim, prs.depth
    bound = m ** (k * c)
    budget = bound if max_steps is None else min(max_steps, bound)
    kern = backend or kernels.for_modulus(m)
    if kern is not kernels.python and m > kernels.COMPILED_MAX_MODULUS:
        kern = kernels.python
    prog = prs.program(m)
    state0 = [x for vec in prs.init for x in vec]
    if bound <= memory_cap:
        mu, lam, outs = kern.orbit_visited(state0, m, k, c, prog, coord - 1, budget)
        method = "table"
    else:
        # Brent's hare may walk up to ~3(mu + lam) steps before it meets the tortoise
        mu, lam = kern.orbit_brent(state0, m, k, c, prog, min(3 * budget + 1, STEP_LIMIT))
        outs = None
        method = "brent"
    if mu < 0:
        raise DetectBudgetExceeded(
            f"no repetition modulo {m} within {budget} steps "
            f"(pigeonhole bound {bound})"
        )
    if outs is None:
        outs = kern.orbit_outputs(state0, m, k, c, prog, coord - 1, mu + lam)
    return mu, lam, bound, outs, method, kern.BACKEND


def state_cycle(prs: PolyRecurrence, m: int, coord: int = 1, *,
                max_steps: Optional[int] = None,
                memory_cap: int = DEFAULT_MEMORY_CAP,
                backend=None) -> StateCycle:
    """Find the window-sequence repetition modulo ``m`` and extract the
    minimal eventually periodic table of coordinate ``coord``."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if not 1 <= coord <= prs.dim:
        raise ValueError(f"coordinate {coord} outside 1..{prs.dim}")
    mu, lam, bound, outs, method, used = _orbit(prs, m, coord, max_steps, memory_cap, backend)
    c = prs.depth
    # window after s steps holds a_{s+1} .. a_{s+c}; a_{n+lam} = a_n for n > mu
    values = [v[coord - 1] % m for v in prs.init] + list(outs)
    scalar = from_cycle(m, values[: mu + lam], mu, lam)
    log.debug("detect m=%d: state mu=%d lam=%d via %s/%s", m, mu, lam, method, used)
    return StateCycle(m, mu, lam, bound, scalar, method, used)


# -- caching ----------------------------------------------------------------

_memory_cache: Dict[Tuple[str, int, int], StateCycle] = {}


def cache_dir() -> Optional[Path]:
    """On-disk cache location from ``MCFINITE_CACHE_DIR`` (unset/empty: off)."""
    path = os.environ.get("MCFINITE_CACHE_DIR", "")
    return Path(path) if path else None


def _cache_file(directory: Path, key: Tuple[str, int, int]) -> Path:
    h, m, coord = key
    return directory / f"{h}-m{m}-c{coord}.ep"


def _read_disk(key) -> Optional[StateCycle]:
    directory = cache_dir()
    if directory is None:
        return None
    path = _cache_file(directory, key)
    try:
        text = path.read_text()
    except OSError:
        return None
    head, _, rest = text.partition("\n")
    parts = head.split()
    if len(parts) != 4 or parts[0] != "state":
        return None
    mu, lam, bound = (int(x) for x in parts[1:])
    return StateCycle(key[1], mu, lam, bound, deserialize(rest), "disk", "cache")


def _write_disk(key, sc: StateCycle) -> None:
    directory = cache_dir()
    if directory is None:
        return
    directory.mkdir(parents=True, exist_ok=True)
    body = f"state {sc.preperiod} {sc.period} {sc.bound}\n" + serialize(sc.scalar)
    # atomic replace: concurrent writers of one key never expose a torn file
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(body)
    os.replace(tmp, _cache_file(directory, key))


def cached_state_cycle(prs: PolyRecurrence, m: int, coord: int = 1, **kwargs) -> StateCycle:
    key = (prs.content_hash, m, coord)
    sc = _memory_cache.get(key)
    if sc is None:
        sc = _read_disk(key)
        if sc is None:
            sc = state_cycle(prs, m, coord, **kwargs)
            _write_disk(key, sc)
        _memory_cache[key] = sc
    return sc


def clear_cache() -> None:
    _memory_cache.clear()


def detect(prs: PolyRecurrence, m: int, coord: int = 1, **kwargs) -> EventuallyPeriodic:
    return cached_state_cycle(prs, m, coord, **kwargs).scalar


def eval_mod(prs: PolyRecurrence, m: int, n: IndexLike, coord: int = 1) -> Residue:
    """``a_n mod m``: one cached detection per ``(prs, m)``, then a lookup."""
    n = parse_index(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if m == 1:
        return Residue(0, 1)
    return lookup(detect(prs, m, coord), n)


# -- stock recurrences -------------------------------------------------------

FIBONACCI = """\
# Fibonacci numbers F_1 = F_2 = 1
dim 1
depth 2
init 1
init 1
next[1] = a[1][1] + a[2][1]
"""

TELEPHONE = """\
# involution numbers T(n) = T(n-1) + (n-1) T(n-2); coordinate 2 counts n
dim 2
depth 2
init (1, 1)
init (2, 2)
next[1] = a[1][1] + a[1][2]*a[2][1]
next[2] = a[1][2] + 1
"""


def fibonacci() -> PolyRecurrence:
    return parse_spec(FIBONACCI)


def telephone() -> PolyRecurrence:
    return parse_spec(TELEPHONE)


def random_prs(dim: int = 2, depth: int = 2, degree: int = 3,
               coef_range: Tuple[int, int] = (-3, 3), seed: int = 42) -> PolyRecurrence:
    """Dense random system from ``random.Random(seed)`` (Mersenne Twister).

    Every monomial of total degree <= ``degree`` gets a coefficient drawn
    uniformly from ``coef_range``, coordinate by coordinate, monomials in
    graded lexicographic order; initial entries are drawn last.  Draws are
    repeated until coordinate 1 has a nonzero top-degree term.
    """
    rng = random.Random(seed)
    nvars = dim * depth
    monos = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            exps: Dict[int, int] = {}
            for v in combo:
                exps[v] = exps.get(v, 0) + 1
            monos.append(tuple(sorted(exps.items())))
    lo, hi = coef_range
    while True:
        polys = []
        for _ in range(dim):
            poly = {mono: rng.randint(lo, hi) for mono in monos}
            polys.append(dsl.poly_terms({mo: co for mo, co in poly.items() if co}))
        top = any(sum(e for _, e in mono) == degree for _, mono in polys[0])
        init = tuple(tuple(rng.randint(lo, hi) for _ in range(dim)) for _ in range(depth))
        if top:
            return PolyRecurrence(dim, depth, init, tuple(polys))
