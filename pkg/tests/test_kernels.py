import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from mcfinite import kernels
from mcfinite.prs import random_prs, telephone

import oracles

compiled = kernels.compiled
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def orbit_args(prs, m):
    return [x for v in prs.init for x in v], m, prs.dim, prs.depth, prs.program(m)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 40), st.integers(1, 2), st.integers(1, 2))
def test_orbit_kernels_agree(seed, m, dim, depth):
    prs = random_prs(dim, depth, 3, seed=seed)
    state0, m, k, c, prog = orbit_args(prs, m)
    bound = m ** (k * c)
    for coord in range(k):
        assert compiled.orbit_visited(state0, m, k, c, prog, coord, bound) == \
            kernels.python.orbit_visited(state0, m, k, c, prog, coord, bound)
    assert compiled.orbit_brent(state0, m, k, c, prog, 3 * bound + 1) == \
        kernels.python.orbit_brent(state0, m, k, c, prog, 3 * bound + 1)
    assert compiled.orbit_outputs(state0, m, k, c, prog, 0, 50) == \
        kernels.python.orbit_outputs(state0, m, k, c, prog, 0, 50)


@needs_compiled
def test_orbit_budget_signal_agrees():
    state0, m, k, c, prog = orbit_args(telephone(), 1009)
    assert compiled.orbit_visited(state0, m, k, c, prog, 0, 3)[:2] == (-1, -1)
    assert kernels.python.orbit_visited(state0, m, k, c, prog, 0, 3)[:2] == (-1, -1)
    assert compiled.orbit_brent(state0, m, k, c, prog, 3) == (-1, -1)
    assert kernels.python.orbit_brent(state0, m, k, c, prog, 3) == (-1, -1)


@needs_compiled
def test_near_limit_modulus_does_not_overflow():
    m = kernels.COMPILED_MAX_MODULUS
    prs = random_prs(seed=7)
    state0, m, k, c, prog = orbit_args(prs, m)
    assert compiled.orbit_outputs(state0, m, k, c, prog, 0, 200) == \
        kernels.python.orbit_outputs(state0, m, k, c, prog, 0, 200)


ATOMS = [
    (kernels.ATOM_ALL, 0),
    (kernels.ATOM_CONNECTED, 0),
    (kernels.ATOM_MAXDEG, 0),
    (kernels.ATOM_MAXDEG, 1),
    (kernels.ATOM_MAXDEG, 2),
    (kernels.ATOM_CYCLES, 1),
    (kernels.ATOM_CYCLES, 2),
]


def reference_count(n, atoms):
    total = 0
    for edges in oracles.graphs(n):
        deg = oracles.degrees(n, edges)
        ok = True
        for code, param in atoms:
            if code == kernels.ATOM_CONNECTED:
                ok &= oracles.connected(n, edges)
            elif code == kernels.ATOM_MAXDEG:
                ok &= max(deg, default=0) <= param
            elif code == kernels.ATOM_CYCLES:
                ok &= n > 0 and all(d == 2 for d in deg) and _components(n, edges) == param
        total += ok
    return total


def _components(n, edges):
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(1, n + 1)})


@pytest.mark.parametrize("n", range(0, 6))
@pytest.mark.parametrize("combo", [(a,) for a in ATOMS] + [(ATOMS[1], ATOMS[4]), (ATOMS[3], ATOMS[1])])
def test_graph_counts_python_vs_reference(n, combo):
    assert kernels.python.count_graphs(n, list(combo)) == reference_count(n, combo)


@needs_compiled
@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("combo", [(a,) for a in ATOMS] + [(ATOMS[1], ATOMS[4])])
def test_graph_counts_compiled_vs_python(n, combo):
    assert compiled.count_graphs(n, list(combo)) == kernels.python.count_graphs(n, list(combo))


@needs_compiled
def test_graph_count_ranges_partition():
    atoms = [(kernels.ATOM_CONNECTED, 0)]
    total = 1 << 10
    parts = [compiled.count_graphs(5, atoms, lo, min(total, lo + 100)) for lo in range(0, total, 100)]
    assert sum(parts) == compiled.count_graphs(5, atoms) == 728
    assert kernels.python.count_graphs(5, atoms, 100, 300) == compiled.count_graphs(5, atoms, 100, 300)


def test_pure_backend_selected_by_environment():
    code = "from mcfinite import kernels; print(kernels.BACKEND, kernels.compiled is None)"
    env = dict(os.environ, MCFINITE_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "True"]


def test_for_modulus_routes_huge_moduli_to_python():
    assert kernels.for_modulus(2**40) is kernels.python
    assert kernels.for_modulus(5) is kernels.active
