"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it imports; set
``MCFINITE_PURE=1`` to force the pure-Python ``_pykernels`` twin.  Both
expose identical functions, and ``python`` always names the fallback so
tests and benchmarks can compare them.
"""

from __future__ import annotations

import os

from . import _pykernels as python

compiled = None
if os.environ.get("MCFINITE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else python
BACKEND: str = active.BACKEND

# the compiled kernels hold residues in int64
COMPILED_MAX_MODULUS = 2**31 - 1

ATOM_ALL = python.ATOM_ALL
ATOM_CONNECTED = python.ATOM_CONNECTED
ATOM_MAXDEG = python.ATOM_MAXDEG
ATOM_CYCLES = python.ATOM_CYCLES


def for_modulus(m: int):
    """Kernel module able to handle residues modulo ``m``."""
    if compiled is not None and m <= COMPILED_MAX_MODULUS:
        return compiled
    return python
