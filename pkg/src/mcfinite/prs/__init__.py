"""Polynomial recurrence systems (parsing, iteration, mod-m evaluation)."""

from .dsl import SpecError
from .engine import (
    FIBONACCI,
    TELEPHONE,
    DetectBudgetExceeded,
    ModState,
    PolyRecurrence,
    StateCycle,
    cached_state_cycle,
    clear_cache,
    detect,
    eval_mod,
    fibonacci,
    format_spec,
    initial_state,
    iterate_exact,
    iterate_sequence,
    parse_spec,
    random_prs,
    state_cycle,
    step_mod,
    telephone,
)

__all__ = [
    "FIBONACCI", "TELEPHONE", "DetectBudgetExceeded", "ModState", "PolyRecurrence",
    "SpecError", "StateCycle", "cached_state_cycle", "clear_cache", "detect", "eval_mod",
    "fibonacci", "format_spec", "initial_state", "iterate_exact", "iterate_sequence",
    "parse_spec", "random_prs", "state_cycle", "step_mod", "telephone",
]
