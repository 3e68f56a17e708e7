"""Comparator heuristics for the threshold experiments.

Four single-shot solvers: unit-clause (UC), shortest-clause (SC), the pure
random walk (WALKSAT), and the pure-literal fixpoint (PL). UC and SC break
clause ties by least index and pick literals uniformly; those details are
our fixed choices, seeds make them reproducible. Walksat carries no noise
parameter and no break-count greediness.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernels
from ._rng import (
    DOMAIN_SOLVER,
    SUB_SHORTEST_CLAUSE,
    SUB_UNIT_CLAUSE,
    SUB_WALKSAT,
    philox,
)
from .formula import Assignment, Formula

ALGORITHMS = ("UC", "SC", "WALKSAT", "PL", "FIX")

FAIL_CONTRADICTION = "contradiction"
FAIL_FLIP_BUDGET = "flip-budget-exhausted"
FAIL_RESIDUAL = "residual-nonempty"


@dataclasses.dataclass(frozen=True)
class BaselineConfig:
    algorithm: str
    seed: int
    max_flips: int | None = None  # WALKSAT only; default 50*n*k at run time

    def __post_init__(self):
        if self.algorithm not in ("UC", "SC", "WALKSAT", "PL"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.max_flips is not None and self.max_flips < 1:
            raise ValueError("max_flips must be >= 1")


@dataclasses.dataclass
class BaselineOutcome:
    algorithm: str
    assignment: Assignment | None
    failure_reason: str | None
    steps: int              # variable assignments (UC/SC/PL) or flips
    trace: dict | None = None

    @property
    def success(self) -> bool:
        return self.assignment is not None


def _fresh_pool(n: int):
    assigned = np.zeros(n + 1, np.uint8)
    value = np.zeros(n + 1, np.uint8)
    pool = np.arange(1, n + 1, dtype=np.int32)
    pool_pos = np.zeros(n + 1, np.int64)
    pool_pos[1:] = np.arange(n)
    return assigned, value, pool, pool_pos


def unit_clause_solve(formula: Formula, seed: int,
                      trace: bool = False) -> BaselineOutcome:
    """Unit steps first (least clause index), else a uniformly random value
    on a uniformly random unassigned variable. Fails on an emptied clause.
    Variables still unassigned at success keep the value false."""
    n = formula.n
    oi = formula.occurrence_index()
    rng = philox(seed, DOMAIN_SOLVER, SUB_UNIT_CLAUSE)
    assigned, value, pool, pool_pos = _fresh_pool(n)
    cap = n if trace else 0
    t_var = np.zeros(max(cap, 1), np.int64)
    t_val = np.zeros(max(cap, 1), np.int64)
    t_unit = np.zeros(max(cap, 1), np.int64)
    status, steps = _kernels.uc_run(formula.lits, n, oi.indptr, oi.occ, rng,
                                    assigned, value, pool, pool_pos,
                                    bool(trace), t_var, t_val, t_unit)
    tr = None
    if trace:
        tr = {"variable": t_var[:steps].copy(), "value": t_val[:steps].copy(),
              "was_unit": t_unit[:steps].copy()}
    if status != 1:
        return BaselineOutcome("UC", None, FAIL_CONTRADICTION, int(steps), tr)
    return BaselineOutcome("UC", Assignment(n, value), None, int(steps), tr)


def shortest_clause_solve(formula: Formula, seed: int,
                          trace: bool = False) -> BaselineOutcome:
    """Uniform clause among those of minimum current length, uniform
    unassigned literal inside it; free random step only when no clause is
    shorter than k."""
    n = formula.n
    oi = formula.occurrence_index()
    rng = philox(seed, DOMAIN_SOLVER, SUB_SHORTEST_CLAUSE)
    assigned, value, pool, pool_pos = _fresh_pool(n)
    cap = n if trace else 0
    t_var = np.zeros(max(cap, 1), np.int64)
    t_val = np.zeros(max(cap, 1), np.int64)
    t_forced = np.zeros(max(cap, 1), np.int64)
    status, steps = _kernels.sc_run(formula.lits, n, oi.indptr, oi.occ, rng,
                                    assigned, value, pool, pool_pos,
                                    bool(trace), t_var, t_val, t_forced)
    tr = None
    if trace:
        tr = {"variable": t_var[:steps].copy(), "value": t_val[:steps].copy(),
              "was_forced": t_forced[:steps].copy()}
    if status != 1:
        return BaselineOutcome("SC", None, FAIL_CONTRADICTION, int(steps), tr)
    return BaselineOutcome("SC", Assignment(n, value), None, int(steps), tr)


def walksat_solve(formula: Formula, seed: int,
                  max_flips: int | None = None) -> BaselineOutcome:
    """Uniform random start; flip a uniformly random position of a
    uniformly random unsatisfied clause until satisfied or out of budget."""
    n = formula.n
    if max_flips is None:
        max_flips = 50 * n * formula.k
    if max_flips < 1:
        raise ValueError("max_flips must be >= 1")
    oi = formula.occurrence_index()
    rng = philox(seed, DOMAIN_SOLVER, SUB_WALKSAT)
    value = np.zeros(n + 1, np.uint8)
    value[1:] = rng.integers(0, 2, size=n, dtype=np.uint8)
    status, flips = _kernels.walksat_run(formula.lits, oi.indptr, oi.occ,
                                         rng, value, max_flips)
    if status != 1:
        return BaselineOutcome("WALKSAT", None, FAIL_FLIP_BUDGET, int(flips))
    return BaselineOutcome("WALKSAT", Assignment(n, value), None, int(flips))


def pure_literal_reduce(formula: Formula):
    """Fixpoint of the pure-literal rule, least variable first.

    Returns (partial, residual): partial is a {variable: bool} dict covering
    exactly the variables the rule touched, residual a Formula holding the
    clauses no pure assignment satisfied (m may be 0)."""
    n = formula.n
    oi = formula.occurrence_index()
    assigned = np.zeros(n + 1, np.uint8)
    value = np.zeros(n + 1, np.uint8)
    sat = np.zeros(formula.m, np.uint8)
    residual_buf = np.empty(formula.m, np.int32)
    nassigned, rc = _kernels.pl_run(formula.lits, n, oi.indptr, oi.occ,
                                    assigned, value, sat, residual_buf)
    partial = {int(v): bool(value[v]) for v in range(1, n + 1) if assigned[v]}
    rows = formula.lits[residual_buf[:rc].astype(np.int64)]
    residual = Formula(n, formula.k, np.ascontiguousarray(rows),
                       validate=False)
    return partial, residual


def pure_literal_solve(formula: Formula, seed: int = 0) -> BaselineOutcome:
    """Bench adapter: success iff the fixpoint satisfies everything; the
    returned assignment completes untouched variables with true. The seed
    is accepted for interface uniformity and ignored (PL is deterministic).
    """
    partial, residual = pure_literal_reduce(formula)
    steps = len(partial)
    if residual.m > 0:
        return BaselineOutcome("PL", None, FAIL_RESIDUAL, steps)
    values = np.ones(formula.n + 1, np.uint8)
    values[0] = 0
    for v, val in partial.items():
        values[v] = 1 if val else 0
    return BaselineOutcome("PL", Assignment(formula.n, values), None, steps)
