"""Pure-Python implementations of the hot loops.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``MCFINITE_PURE=1`` is set.

A recurrence program ``prog`` is the tuple
``(mono_off, mono_coef, fac_off, fac_var, fac_exp)``: output coordinate
``i`` sums monomials ``mono_off[i]:mono_off[i+1]``; monomial ``t`` has
coefficient ``mono_coef[t]`` (already reduced mod m) and factors
``fac_off[t]:fac_off[t+1]``, each ``state[fac_var[f]] ** fac_exp[f]``.
The state is the flattened window, oldest vector first.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

BACKEND = "python"

# predicate atom codes for count_graphs
ATOM_ALL = 0
ATOM_CONNECTED = 1
ATOM_MAXDEG = 2
ATOM_CYCLES = 3  # every vertex of degree 2, exactly `param` components


def _make_step(m: int, k: int, c: int, prog):
    mono_off, mono_coef, fac_off, fac_var, fac_exp = prog
    polys = []
    for i in range(k):
        terms = []
        for t in range(mono_off[i], mono_off[i + 1]):
            facs = tuple(
                (fac_var[f], fac_exp[f]) for f in range(fac_off[t], fac_off[t + 1])
            )
            terms.append((mono_coef[t], facs))
        polys.append(tuple(terms))

    def step(state: Tuple[int, ...]) -> Tuple[int, ...]:
        new = []
        for terms in polys:
            acc = 0
            for coef, facs in terms:
                v = coef
                for var, e in facs:
                    v = v * pow(state[var], e, m) % m
                acc += v
            new.append(acc % m)
        return state[k:] + tuple(new)

    return step


def orbit_visited(state0: Sequence[int], m: int, k: int, c: int, prog, coord: int,
                  max_steps: int) -> Tuple[int, int, List[int]]:
    """Iterate until a state repeats, remembering every visited state.

    Returns ``(mu, lam, outs)``: the first repeated state was first seen
    after ``mu`` steps and recurs ``lam`` steps later; ``outs[s]`` is
    coordinate ``coord`` of the vector produced by step ``s``.  Returns
    ``(-1, -1, outs)`` if ``max_steps`` steps pass without a repeat.
    """
    step = _make_step(m, k, c, prog)
    state = tuple(x % m for x in state0)
    seen = {state: 0}
    outs: List[int] = []
    off = (c - 1) * k + coord
    s = 0
    while s < max_steps:
        state = step(state)
        outs.append(state[off])
        s += 1
        first = seen.get(state)
        if first is not None:
            return first, s - first, outs
        seen[state] = s
    return -1, -1, outs


def orbit_brent(state0: Sequence[int], m: int, k: int, c: int, prog,
                max_steps: int) -> Tuple[int, int]:
    """Brent's cycle detection in constant memory; ``(-1, -1)`` on budget."""
    step = _make_step(m, k, c, prog)
    x0 = tuple(x % m for x in state0)
    power = lam = 1
    tortoise = x0
    hare = step(x0)
    used = 1
    while tortoise != hare:
        if used >= max_steps:
            return -1, -1
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
        used += 1
    tortoise = hare = x0
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1
    return mu, lam


def orbit_outputs(state0: Sequence[int], m: int, k: int, c: int, prog, coord: int,
                  steps: int) -> List[int]:
    step = _make_step(m, k, c, prog)
    state = tuple(x % m for x in state0)
    off = (c - 1) * k + coord
    outs = []
    for _ in range(steps):
        state = step(state)
        outs.append(state[off])
    return outs


def _pair_index(n: int):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    return pairs


def graph_holds(n: int, nbr: Sequence[int], atoms: Sequence[Tuple[int, int]]) -> bool:
    """Evaluate a conjunction of atoms on a graph given as neighbour bitmasks."""
    for code, param in atoms:
        if code == ATOM_ALL:
            continue
        if code == ATOM_MAXDEG:
            for x in nbr:
                if bin(x).count("1") > param:
                    return False
        elif code == ATOM_CONNECTED:
            if n == 0:
                return False
            seen = 1
            frontier = 1
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    low = f & -f
                    nxt |= nbr[low.bit_length() - 1]
                    f ^= low
                frontier = nxt & ~seen
                seen |= nxt
            if seen != (1 << n) - 1:
                return False
        elif code == ATOM_CYCLES:
            for x in nbr:
                if bin(x).count("1") != 2:
                    return False
            comps = 0
            left = (1 << n) - 1
            while left:
                comps += 1
                frontier = left & -left
                seen = frontier
                while frontier:
                    nxt = 0
                    f = frontier
                    while f:
                        low = f & -f
                        nxt |= nbr[low.bit_length() - 1]
                        f ^= low
                    frontier = nxt & ~seen
                    seen |= nxt
                left &= ~seen
            if comps != param:
                return False
        else:
            raise ValueError(f"unknown atom code {code}")
    return True


def count_graphs(n: int, atoms: Sequence[Tuple[int, int]], lo: int = 0, hi: int = -1) -> int:
    """Count simple graphs on ``n`` vertices satisfying every atom.

    Graphs are edge bitmasks over the pairs ``(a, b)``, ``a < b``, in
    lexicographic order; only masks in ``[lo, hi)`` are visited
    (``hi = -1`` means all ``2^(n(n-1)/2)``).
    """
    pairs = _pair_index(n)
    total = 1 << len(pairs)
    if hi < 0 or hi > total:
        hi = total
    count = 0
    for mask in range(lo, hi):
        nbr = [0] * n
        bits = mask
        while bits:
            low = bits & -bits
            a, b = pairs[low.bit_length() - 1]
            nbr[a] |= 1 << b
            nbr[b] |= 1 << a
            bits ^= low
        if graph_holds(n, nbr, atoms):
            count += 1
    return count
