"""Labeled relational structures, Gaifman graphs, properties and densities."""

from .core import (
    DEFAULT_BUDGET_BITS,
    GRAPH,
    IRREFLEXIVE,
    SYMMETRIC,
    TERNARY,
    VOCABULARIES,
    BudgetExceeded,
    GaifmanGraph,
    RelStructure,
    Symbol,
    Vocabulary,
    VocabularyMismatch,
    all_structures_upto,
    components,
    disjoint_union,
    enumerate_structures,
    format_structure,
    gaifman,
    induced,
    is_connected,
    parse_structure,
    relabel,
)
from .counting import (
    DensityEntry,
    DensityTable,
    count_group_tables,
    count_ternary_spaces,
    density,
    density_mod,
    density_series,
    density_table,
    density_with_method,
)
from .properties import (
    PropertySpec,
    conjunction,
    embeds,
    group_table,
    holds,
    parse_property,
    ternary_space,
    with_degree_bound,
)

enumerate = enumerate_structures  # noqa: A001 - module-level alias mirroring the operation name
