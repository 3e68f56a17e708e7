"""Greedy repair solver and experiment harness for random k-SAT."""

from ._backend import backend_name
from .formula import (
    Assignment,
    Formula,
    GeneratorConfig,
    OccurrenceIndex,
    duplicate_stats,
    evaluate,
    from_clauses,
    parse_dimacs,
    sample_formula,
    unsatisfied_indices,
    write_dimacs,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "Formula",
    "GeneratorConfig",
    "OccurrenceIndex",
    "backend_name",
    "duplicate_stats",
    "evaluate",
    "from_clauses",
    "parse_dimacs",
    "sample_formula",
    "unsatisfied_indices",
    "write_dimacs",
    "__version__",
]
