# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_pykernels`` for the reference semantics.

Residues are held in ``int64``; callers must keep ``m < 2**31`` so that a
product of two residues cannot overflow.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy
from libc.stdint cimport int64_t, uint64_t, int32_t

BACKEND = "cython"

cdef enum:
    C_ALL = 0
    C_CONNECTED = 1
    C_MAXDEG = 2
    C_CYCLES = 3

ATOM_ALL = C_ALL
ATOM_CONNECTED = C_CONNECTED
ATOM_MAXDEG = C_MAXDEG
ATOM_CYCLES = C_CYCLES

cdef extern from * nogil:
    int __builtin_popcountll(unsigned long long)
    int __builtin_ctzll(unsigned long long)


cdef struct Prog:
    int k
    int c
    int64_t m
    int64_t *mono_off
    int64_t *mono_coef
    int64_t *fac_off
    int64_t *fac_var
    int64_t *fac_exp


cdef int64_t *_copy(seq) except NULL:
    cdef Py_ssize_t n = len(seq)
    cdef int64_t *out = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    if out == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = seq[i]
    return out


cdef int _load(Prog *p, prog, int64_t m, int k, int c) except -1:
    p.k = k
    p.c = c
    p.m = m
    p.mono_off = _copy(prog[0])
    p.mono_coef = _copy(prog[1])
    p.fac_off = _copy(prog[2])
    p.fac_var = _copy(prog[3])
    p.fac_exp = _copy(prog[4])
    return 0


cdef void _unload(Prog *p):
    free(p.mono_off)
    free(p.mono_coef)
    free(p.fac_off)
    free(p.fac_var)
    free(p.fac_exp)


cdef inline int64_t _powmod(int64_t b, int64_t e, int64_t m) noexcept nogil:
    cdef int64_t r = 1 % m
    b %= m
    while e > 0:
        if e & 1:
            r = r * b % m
        b = b * b % m
        e >>= 1
    return r


cdef void _step(Prog *p, int64_t *state, int64_t *tmp) noexcept nogil:
    """Advance the window in place; ``tmp`` has room for k values."""
    cdef int i, t, f
    cdef int64_t acc, v
    cdef int k = p.k
    cdef int kc = p.k * p.c
    for i in range(k):
        acc = 0
        for t in range(p.mono_off[i], p.mono_off[i + 1]):
            v = p.mono_coef[t]
            for f in range(p.fac_off[t], p.fac_off[t + 1]):
                v = v * _powmod(state[p.fac_var[f]], p.fac_exp[f], p.m) % p.m
            acc = (acc + v) % p.m
        tmp[i] = acc
    for i in range(kc - k):
        state[i] = state[i + k]
    for i in range(k):
        state[kc - k + i] = tmp[i]


cdef int64_t _code(int64_t *state, int kc, int64_t m) noexcept nogil:
    cdef int64_t code = 0
    cdef int i
    for i in range(kc - 1, -1, -1):
        code = code * m + state[i]
    return code


cdef struct Table:
    uint64_t *keys
    int64_t *vals
    uint64_t mask
    int64_t used


cdef uint64_t EMPTY = <uint64_t> -1


cdef inline uint64_t _mix(uint64_t x) noexcept nogil:
    # splitmix64 finaliser
    x ^= x >> 30
    x *= <uint64_t> 0xbf58476d1ce4e5b9
    x ^= x >> 27
    x *= <uint64_t> 0x94d049bb133111eb
    x ^= x >> 31
    return x


cdef int _table_init(Table *t, uint64_t cap) noexcept nogil:
    cdef uint64_t i
    t.keys = <uint64_t *> malloc(cap * sizeof(uint64_t))
    t.vals = <int64_t *> malloc(cap * sizeof(int64_t))
    if t.keys == NULL or t.vals == NULL:
        free(t.keys); free(t.vals)
        return -1
    for i in range(cap):
        t.keys[i] = EMPTY
    t.mask = cap - 1
    t.used = 0
    return 0


cdef int64_t _table_get(Table *t, uint64_t key) noexcept nogil:
    cdef uint64_t h = _mix(key) & t.mask
    while t.keys[h] != EMPTY:
        if t.keys[h] == key:
            return t.vals[h]
        h = (h + 1) & t.mask
    return -1


cdef int _table_put(Table *t, uint64_t key, int64_t val) noexcept nogil:
    cdef Table bigger
    cdef uint64_t i, h
    if 2 * (t.used + 1) > <int64_t> (t.mask + 1):
        if _table_init(&bigger, 2 * (t.mask + 1)) < 0:
            return -1
        for i in range(t.mask + 1):
            if t.keys[i] != EMPTY:
                h = _mix(t.keys[i]) & bigger.mask
                while bigger.keys[h] != EMPTY:
                    h = (h + 1) & bigger.mask
                bigger.keys[h] = t.keys[i]
                bigger.vals[h] = t.vals[i]
        bigger.used = t.used
        free(t.keys); free(t.vals)
        t[0] = bigger
    h = _mix(key) & t.mask
    while t.keys[h] != EMPTY:
        h = (h + 1) & t.mask
    t.keys[h] = key
    t.vals[h] = val
    t.used += 1
    return 0


def orbit_visited(state0, int64_t m, int k, int c, prog, int coord, int64_t max_steps):
    """Hash-table cycle detection over the state codes (first-visit step per code)."""
    cdef int kc = k * c
    cdef int i
    cdef Prog p
    _load(&p, prog, m, k, c)
    cdef int64_t cap = 1024
    cdef int64_t *state = <int64_t *> malloc(kc * sizeof(int64_t))
    cdef int64_t *tmp = <int64_t *> malloc(k * sizeof(int64_t))
    cdef int64_t *outs = <int64_t *> malloc(cap * sizeof(int64_t))
    cdef int64_t *grown
    cdef Table seen
    if state == NULL or tmp == NULL or outs == NULL or _table_init(&seen, 1024) < 0:
        free(state); free(tmp); free(outs); _unload(&p)
        raise MemoryError()
    for i in range(kc):
        state[i] = state0[i] % m
    cdef int64_t s = 0, first = -1, off = (c - 1) * k + coord
    cdef uint64_t code
    cdef bint oom = False
    with nogil:
        _table_put(&seen, _code(state, kc, m), 0)
        while s < max_steps:
            _step(&p, state, tmp)
            if s == cap:
                grown = <int64_t *> realloc(outs, 2 * cap * sizeof(int64_t))
                if grown == NULL:
                    oom = True
                    break
                outs = grown
                cap *= 2
            outs[s] = state[off]
            s += 1
            code = _code(state, kc, m)
            first = _table_get(&seen, code)
            if first >= 0:
                break
            if _table_put(&seen, code, s) < 0:
                oom = True
                break
    cdef int64_t j
    result = [outs[j] for j in range(s)] if not oom else None
    free(state); free(tmp); free(outs); free(seen.keys); free(seen.vals); _unload(&p)
    if oom:
        raise MemoryError()
    if first < 0:
        return -1, -1, result
    return first, s - first, result


cdef bint _eq(int64_t *a, int64_t *b, int n) noexcept nogil:
    cdef int i
    for i in range(n):
        if a[i] != b[i]:
            return False
    return True


def orbit_brent(state0, int64_t m, int k, int c, prog, int64_t max_steps):
    cdef int kc = k * c
    cdef Prog p
    _load(&p, prog, m, k, c)
    cdef int64_t *x0 = <int64_t *> malloc(kc * sizeof(int64_t))
    cdef int64_t *tort = <int64_t *> malloc(kc * sizeof(int64_t))
    cdef int64_t *hare = <int64_t *> malloc(kc * sizeof(int64_t))
    cdef int64_t *tmp = <int64_t *> malloc(k * sizeof(int64_t))
    cdef int i
    for i in range(kc):
        x0[i] = state0[i] % m
    cdef int64_t power = 1, lam = 1, used = 1, mu = 0, j
    cdef bint exhausted = False
    with nogil:
        memcpy(tort, x0, kc * sizeof(int64_t))
        memcpy(hare, x0, kc * sizeof(int64_t))
        _step(&p, hare, tmp)
        while not _eq(tort, hare, kc):
            if used >= max_steps:
                exhausted = True
                break
            if power == lam:
                memcpy(tort, hare, kc * sizeof(int64_t))
                power *= 2
                lam = 0
            _step(&p, hare, tmp)
            lam += 1
            used += 1
        if not exhausted:
            memcpy(tort, x0, kc * sizeof(int64_t))
            memcpy(hare, x0, kc * sizeof(int64_t))
            for j in range(lam):
                _step(&p, hare, tmp)
            while not _eq(tort, hare, kc):
                _step(&p, tort, tmp)
                _step(&p, hare, tmp)
                mu += 1
    free(x0); free(tort); free(hare); free(tmp); _unload(&p)
    if exhausted:
        return -1, -1
    return mu, lam


def orbit_outputs(state0, int64_t m, int k, int c, prog, int coord, int64_t steps):
    cdef int kc = k * c
    cdef Prog p
    _load(&p, prog, m, k, c)
    cdef int64_t *state = <int64_t *> malloc(kc * sizeof(int64_t))
    cdef int64_t *tmp = <int64_t *> malloc(k * sizeof(int64_t))
    cdef int64_t *outs = <int64_t *> malloc((steps + 1) * sizeof(int64_t))
    cdef int i
    for i in range(kc):
        state[i] = state0[i] % m
    cdef int64_t s, off = (c - 1) * k + coord
    with nogil:
        for s in range(steps):
            _step(&p, state, tmp)
            outs[s] = state[off]
    result = [outs[s] for s in range(steps)]
    free(state); free(tmp); free(outs); _unload(&p)
    return result


cdef uint64_t _reach(uint64_t start, uint64_t *nbr) noexcept nogil:
    cdef uint64_t seen = start, frontier = start, nxt, f, low
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & (~f + 1)
            nxt |= nbr[__builtin_ctzll(f)]
            f ^= low
        frontier = nxt & ~seen
        seen |= nxt
    return seen


cdef bint _holds(int n, uint64_t *nbr, int natoms, int64_t *codes, int64_t *params) noexcept nogil:
    cdef int a, v, comps
    cdef uint64_t full, left, seen
    if n >= 64:
        full = 0xFFFFFFFFFFFFFFFF
    else:
        full = ((<uint64_t> 1) << n) - 1
    for a in range(natoms):
        if codes[a] == C_MAXDEG:
            for v in range(n):
                if __builtin_popcountll(nbr[v]) > params[a]:
                    return False
        elif codes[a] == C_CONNECTED:
            if n == 0:
                return False
            if _reach(1, nbr) != full:
                return False
        elif codes[a] == C_CYCLES:
            for v in range(n):
                if __builtin_popcountll(nbr[v]) != 2:
                    return False
            comps = 0
            left = full
            while left:
                comps += 1
                seen = _reach(left & (~left + 1), nbr)
                left &= ~seen
            if comps != params[a]:
                return False
    return True


def count_graphs(int n, atoms, int64_t lo=0, int64_t hi=-1):
    cdef int npairs = n * (n - 1) // 2
    if npairs > 62:
        raise ValueError("too many vertices for the mask kernel")
    cdef int64_t total = (<int64_t> 1) << npairs
    if hi < 0 or hi > total:
        hi = total
    cdef int natoms = len(atoms)
    cdef int64_t codes[16]
    cdef int64_t params[16]
    if natoms > 16:
        raise ValueError("at most 16 atoms")
    cdef int i
    for i in range(natoms):
        codes[i] = atoms[i][0]
        params[i] = atoms[i][1]
        if codes[i] < 0 or codes[i] > 3:
            raise ValueError(f"unknown atom code {codes[i]}")
    cdef int pa[64]
    cdef int pb[64]
    cdef int a, b, t = 0
    for a in range(n):
        for b in range(a + 1, n):
            pa[t] = a
            pb[t] = b
            t += 1
    cdef uint64_t nbr[64]
    cdef int64_t mask, count = 0
    cdef uint64_t bits
    cdef int idx
    with nogil:
        for mask in range(lo, hi):
            for i in range(n):
                nbr[i] = 0
            bits = <uint64_t> mask
            while bits:
                idx = __builtin_ctzll(bits)
                nbr[pa[idx]] |= (<uint64_t> 1) << pb[idx]
                nbr[pb[idx]] |= (<uint64_t> 1) << pa[idx]
                bits &= bits - 1
            if _holds(n, nbr, natoms, codes, params):
                count += 1
    return count
