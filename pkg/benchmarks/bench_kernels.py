"""Compare the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat R] [--quick]

Each row reports the best-of-R wall time for both backends and the speedup.
Results of the two backends are asserted equal before timing is reported.
"""

from __future__ import annotations

import argparse
import sys
import time

from mcfinite import kernels
from mcfinite.prs import fibonacci, random_prs, telephone


def _orbit_case(prs, m):
    prog = prs.program(m)
    state0 = [x for vec in prs.init for x in vec]
    k, c = prs.dim, prs.depth

    def run(kern):
        return kern.orbit_visited(state0, m, k, c, prog, 0, m ** (k * c))[:2]

    return run


def _brent_case(prs, m):
    prog = prs.program(m)
    state0 = [x for vec in prs.init for x in vec]
    k, c = prs.dim, prs.depth

    def run(kern):
        return kern.orbit_brent(state0, m, k, c, prog, m ** (k * c))

    return run


def _graph_case(n, atoms):
    def run(kern):
        return kern.count_graphs(n, atoms)

    return run


def cases(quick: bool):
    A = kernels
    yield "fibonacci mod 3989, hash table", _orbit_case(fibonacci(), 3989)
    yield "telephone mod 61, hash table", _orbit_case(telephone(), 61)
    yield "random cubic mod 29, hash table", _orbit_case(random_prs(), 29)
    yield "telephone mod 997, Brent", _brent_case(telephone(), 997)
    yield "graphs n=6, connected", _graph_case(6, [(A.ATOM_CONNECTED, 0)])
    yield "graphs n=6, max-degree:2", _graph_case(6, [(A.ATOM_MAXDEG, 2)])
    if not quick:
        yield "graphs n=7, cycles", _graph_case(7, [(A.ATOM_CYCLES, 1)])
        yield "graphs n=7, connected", _graph_case(7, [(A.ATOM_CONNECTED, 0)])


def _norm(result):
    return tuple(result) if isinstance(result, (tuple, list)) else result


def best_of(fn, kern, repeat: int):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(kern)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the n=7 graph counts")
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; only the Python backend is available", file=sys.stderr)
        return 1
    print(f"{'workload':38} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for name, fn in cases(args.quick):
        tp, rp = best_of(fn, kernels.python, 1)
        tc, rc = best_of(fn, kernels.compiled, args.repeat)
        if _norm(rp) != _norm(rc):
            print(f"{name}: backends disagree ({rp} vs {rc})", file=sys.stderr)
            return 1
        print(f"{name:38} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
