"""Effective modular evaluation of recurrence sequences and small-scale
checks of modular counting for labeled structures.

Subpackages: :mod:`mcfinite.prs` (recurrences), :mod:`mcfinite.structures`
(structures, properties, densities); modules :mod:`mcfinite.du`,
:mod:`mcfinite.specker`, :mod:`mcfinite.falsify`, :mod:`mcfinite.adversary`.
"""

from .kernels import BACKEND
from .modarith import Residue, crt_solve, factorize, nth_prime
from .periodic import EventuallyPeriodic, lookup, normalize
from .prs import PolyRecurrence, detect, eval_mod, iterate_exact, parse_spec

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "EventuallyPeriodic", "PolyRecurrence", "Residue", "crt_solve", "detect",
    "eval_mod", "factorize", "iterate_exact", "lookup", "normalize", "nth_prime", "parse_spec",
]
