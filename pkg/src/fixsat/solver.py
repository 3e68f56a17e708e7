"""Three-phase greedy repair solver.

Phase 1 walks the clauses once and, for each all-negative clause not yet
hit, selects a variable to set false: the least position before k1 whose
variable currently endangers no unique clause, else position k1 outright.
Phase 2 takes the clauses left unsatisfied and keeps granting each popped
clause three repair variables (window positions when safely possible,
otherwise the tail positions) until every clause is secure or owns three
distinct repair variables. Phase 3 matches endangered clauses to their
repair variables and reads the final assignment off the matching.

The run is deterministic: no internal randomness anywhere.

The module-level predicates (is_z_unique, is_z_safe, is_endangered,
is_zz_safe) are deliberately naive definitional scans; the incremental
counters inside the phases are tested against them.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import _kernels
from .formula import Assignment, Formula
from .instrumentation import PhaseStats, TraceRecord, collect_stats
from .matching import Matching

FAIL_MATCHING = "matching-not-found"
FAIL_ANOMALY = "degenerate-clause-anomaly"


@dataclasses.dataclass(frozen=True)
class SolverParams:
    """Positional windows derived from k. Both windows are 1-based
    half-open-below ranges (lo, hi] and may be empty for small k."""

    k: int
    k1: int
    window_2d: tuple  # (k1, k-5]
    window_2e: tuple  # (k-5, k]

    @classmethod
    def from_k(cls, k: int) -> "SolverParams":
        k1 = math.ceil(k / 2)
        return cls(k=k, k1=k1, window_2d=(k1, k - 5), window_2e=(k - 5, k))


@dataclasses.dataclass
class Phase1State:
    z: tuple                   # selection order
    pos_out_z: np.ndarray      # per clause: positive literals with var outside Z
    neg_in_z: np.ndarray       # per clause: negative literals with var in Z
    u: np.ndarray              # per variable: unique clauses it is the positive of
    z_unique_count: int
    fallback_1e_count: int
    trace: list | None = None
    snapshots: dict | None = None


@dataclasses.dataclass
class Phase2State:
    z_prime: tuple
    support_out_zp: np.ndarray   # literals true under the phase-1 assignment, var outside Z'
    distinct_zp_vars: np.ndarray
    non_dead: np.ndarray         # literals that could still become true
    non_dead_sum: np.ndarray     # signed sum of non-dead literals (internal)
    u_prime: np.ndarray
    q_init: tuple                # 1-based clause ids unsatisfied at entry
    iterations: int
    endangered_count: int
    anomaly_clause: int | None = None
    snapshots: dict | None = None


@dataclasses.dataclass
class FixOutcome:
    assignment: Assignment | None
    failure_reason: str | None
    stats: PhaseStats
    z: tuple = ()
    z_prime: tuple = ()
    matching: Matching | None = None
    deficient_set: tuple | None = None
    trace: list | None = None  # Phase-1 TraceRecords when tracing was on

    @property
    def success(self) -> bool:
        return self.assignment is not None


def _membership(n: int, variables) -> np.ndarray:
    mask = np.zeros(n + 1, np.uint8)
    for v in variables:
        if not 1 <= v <= n:
            raise ValueError(f"variable {v} out of range")
        mask[v] = 1
    return mask


# ------------------------------------------- definitional predicates

def is_z_unique(formula: Formula, z, i: int) -> bool:
    """Clause i (1-based) has exactly one positive occurrence on a variable
    outside z and no negative occurrence on a variable inside z. Duplicate
    positive occurrences count per occurrence."""
    in_z = _membership(formula.n, z)
    row = formula.lits[i - 1]
    pos_out = 0
    for lit in row:
        lit = int(lit)
        if lit > 0:
            if not in_z[lit]:
                pos_out += 1
        else:
            if in_z[-lit]:
                return False
    return pos_out == 1


def is_z_safe(x: int, formula: Formula, z) -> bool:
    """x endangers no unique clause. Defined only for x outside z."""
    zs = set(z)
    if x in zs:
        raise ValueError(f"is_z_safe is defined only outside the selection set; got {x}")
    for i in range(1, formula.m + 1):
        if is_z_unique(formula, zs, i):
            row = formula.lits[i - 1]
            if any(int(lit) == x for lit in row):
                return False
    return True


def is_endangered(formula: Formula, z, z_prime, i: int) -> bool:
    """No literal of clause i (1-based) is true under the phase-1
    assignment on a variable outside the repair set."""
    in_z = _membership(formula.n, z)
    in_zp = _membership(formula.n, z_prime)
    for lit in formula.lits[i - 1]:
        lit = int(lit)
        if lit > 0:
            if not in_z[lit] and not in_zp[lit]:
                return False
        else:
            if in_z[-lit] and not in_zp[-lit]:
                return False
    return True


def is_zz_safe(x: int, formula: Formula, z, z_prime) -> bool:
    """False iff x is in either selection set or some clause has x as its
    unique non-dead positive literal (dead: positive on a selected-or-repair
    variable, or negative on an unselected one)."""
    zs = set(z)
    zps = set(z_prime)
    if x in zs or x in zps:
        return False
    in_z = _membership(formula.n, zs)
    in_zp = _membership(formula.n, zps)
    for i in range(formula.m):
        row = formula.lits[i]
        live = []
        for lit in row:
            lit = int(lit)
            if lit > 0:
                dead = in_z[lit] or in_zp[lit]
            else:
                dead = not in_z[-lit]
            if not dead:
                live.append(lit)
        if len(live) == 1 and live[0] == x:
            return False
    return True


# ------------------------------------------------------- the phases

def run_phase1(formula: Formula, trace: bool = False,
               snapshot: bool = False):
    """Returns (z, sigma_z, Phase1State). sigma_z sets exactly the selected
    variables false. Every all-negative clause holds a selected variable on
    exit."""
    if formula.k < 2:
        raise ValueError("phase 1 needs k >= 2")
    n, m, k = formula.n, formula.m, formula.k
    if n * k >= 2 ** 31:
        raise ValueError("instance too large for int32 counter sums")
    params = SolverParams.from_k(k)
    oi = formula.occurrence_index()
    pos_out = np.zeros(m, np.int16)
    pos_sum = np.zeros(m, np.int32)
    u = np.zeros(n + 1, np.int32)
    allneg_buf = np.empty(m, np.int32)
    unique0, na = _kernels.phase1_init(formula.lits, pos_out, pos_sum, u,
                                       allneg_buf)
    allneg_ids = allneg_buf[:na].astype(np.int64)
    if na:
        allneg_rows = np.ascontiguousarray(formula.lits[allneg_ids])
    else:
        allneg_rows = np.zeros((0, k), np.int32)
    neg_in = np.zeros(m, np.int16)
    in_z = np.zeros(n + 1, np.uint8)
    z_order = np.zeros(max(na, 1), np.int32)
    cap = na if (trace or snapshot) else 0
    t_clause = np.zeros(max(cap, 1), np.int64)
    t_var = np.zeros(max(cap, 1), np.int64)
    t_fb = np.zeros(max(cap, 1), np.int64)
    t_unique = np.zeros(max(cap, 1), np.int64)
    if snapshot:
        s_pos = np.zeros((na, m), np.int16)
        s_neg = np.zeros((na, m), np.int16)
        s_u = np.zeros((na, n + 1), np.int32)
        s_unique = np.zeros(max(na, 1), np.int64)
    else:
        s_pos = np.zeros((0, 0), np.int16)
        s_neg = np.zeros((0, 0), np.int16)
        s_u = np.zeros((0, 0), np.int32)
        s_unique = np.zeros(1, np.int64)
    zc, fallbacks, unique = _kernels.phase1_run(
        allneg_rows, allneg_ids, params.k1, in_z, z_order,
        pos_out, neg_in, pos_sum, u, oi.indptr, oi.occ, unique0,
        bool(trace or snapshot), t_clause, t_var, t_fb, t_unique,
        bool(snapshot), s_pos, s_neg, s_u, s_unique)
    z = tuple(int(v) for v in z_order[:zc])
    trace_records = None
    if trace or snapshot:
        trace_records = [
            TraceRecord(t=t + 1, clause_index=int(t_clause[t]),
                        variable=int(t_var[t]), used_fallback=bool(t_fb[t]),
                        z_unique_count=int(t_unique[t]))
            for t in range(zc)
        ]
    snapshots = None
    if snapshot:
        snapshots = {"pos_out_z": s_pos[:zc], "neg_in_z": s_neg[:zc],
                     "u": s_u[:zc], "z_unique_count": s_unique[:zc]}
    values = np.ones(n + 1, np.uint8)
    values[0] = 0
    for v in z:
        values[v] = 0
    sigma_z = Assignment(n, values)
    state = Phase1State(z=z, pos_out_z=pos_out, neg_in_z=neg_in, u=u,
                        z_unique_count=int(unique),
                        fallback_1e_count=int(fallbacks),
                        trace=trace_records, snapshots=snapshots)
    return z, sigma_z, state


def run_phase2(formula: Formula, z, snapshot: bool = False):
    """Returns (z_prime, Phase2State). On the degenerate-clause anomaly
    (fewer than three distinct eligible tail variables, only possible with
    duplicate variables) the state carries the offending 1-based clause id
    and z_prime holds the additions made before the abort."""
    n, m, k = formula.n, formula.m, formula.k
    params = SolverParams.from_k(k)
    oi = formula.occurrence_index()
    in_z = _membership(n, z)
    support = np.zeros(m, np.int16)
    live = np.zeros(m, np.int16)
    live_sum = np.zeros(m, np.int32)
    distinct = np.zeros(m, np.int16)
    uprime = np.zeros(n + 1, np.int32)
    q_buf = np.empty(m, np.int32)
    qc = int(_kernels.phase2_init(formula.lits, in_z, support, live,
                                  live_sum, uprime, q_buf))
    heap = np.empty(max(2 * qc + 16, 64), np.int32)
    heap[:qc] = q_buf[:qc]  # an ascending run is already min-heap ordered
    q_init = tuple(int(c) + 1 for c in q_buf[:qc])
    del q_buf
    in_zp = np.zeros(n + 1, np.uint8)
    zp_order = np.zeros(max(3 * qc + 3, 64), np.int32)
    if snapshot:
        cap = 3 * m + 3
        s_support = np.zeros((cap, m), np.int16)
        s_live = np.zeros((cap, m), np.int16)
        s_live_sum = np.zeros((cap, m), np.int32)
        s_distinct = np.zeros((cap, m), np.int16)
        s_uprime = np.zeros((cap, n + 1), np.int32)
    else:
        s_support = np.zeros((0, 0), np.int16)
        s_live = np.zeros((0, 0), np.int16)
        s_live_sum = np.zeros((0, 0), np.int32)
        s_distinct = np.zeros((0, 0), np.int16)
        s_uprime = np.zeros((0, 0), np.int32)
    zp_order, zpc, iters, anomaly, endangered = _kernels.phase2_run(
        formula.lits, params.k1, in_z, in_zp, zp_order,
        support, live, live_sum, distinct, uprime,
        oi.indptr, oi.occ, heap, qc, qc,
        bool(snapshot), s_support, s_live, s_live_sum, s_distinct, s_uprime)
    z_prime = tuple(int(v) for v in zp_order[:zpc])
    snapshots = None
    if snapshot:
        snapshots = {"support_out_zp": s_support[:zpc],
                     "non_dead": s_live[:zpc],
                     "non_dead_sum": s_live_sum[:zpc],
                     "distinct_zp_vars": s_distinct[:zpc],
                     "u_prime": s_uprime[:zpc]}
    state = Phase2State(z_prime=z_prime, support_out_zp=support,
                        distinct_zp_vars=distinct, non_dead=live,
                        non_dead_sum=live_sum, u_prime=uprime,
                        q_init=q_init, iterations=int(iters),
                        endangered_count=int(endangered),
                        anomaly_clause=int(anomaly) if anomaly else None,
                        snapshots=snapshots)
    return z_prime, state


def _final_values(formula: Formula, z, z_prime, matching: Matching) -> np.ndarray:
    values = np.ones(formula.n + 1, np.uint8)
    values[0] = 0
    zps = set(z_prime)
    for v in z:
        if v not in zps:
            values[v] = 0
    for ci, x in matching.pairs:
        row = formula.lits[ci - 1]
        if any(int(lit) == -x for lit in row):
            values[x] = 0
    return values


def run_phase3(formula: Formula, z, z_prime, phase1: Phase1State | None = None,
               phase2: Phase2State | None = None) -> FixOutcome:
    """Match endangered clauses to repair variables and read off the final
    assignment: selected-not-repair variables false, matched variables set
    to satisfy their clause, everything else true.

    phase1/phase2 states feed the stats record when available; standalone
    calls recompute what is definitional and report zero for phase-history
    counters (fallbacks, iterations).

    The incidence graph is kept in CSR form throughout; the public Matching
    and certificate objects are materialized from the kernel results."""
    in_z = _membership(formula.n, z)
    in_zp = _membership(formula.n, z_prime)
    rows_buf = np.empty(formula.m, np.int32)
    cnt = int(_kernels.endangered_scan(formula.lits, in_z, in_zp, rows_buf))
    rows = rows_buf[:cnt].copy()
    del rows_buf
    if phase2 is not None and phase2.anomaly_clause is None:
        if cnt != phase2.endangered_count:
            raise RuntimeError(
                "internal error: endangered recount "
                f"{cnt} != incremental {phase2.endangered_count}")
    zp_sorted = np.unique(np.fromiter(
        (int(v) for v in z_prime), np.int32)) if len(tuple(z_prime)) \
        else np.empty(0, np.int32)
    nr = int(zp_sorted.shape[0])
    right_index = np.full(formula.n + 1, -1, np.int32)
    right_index[zp_sorted] = np.arange(nr, dtype=np.int32)
    indptr = np.empty(cnt + 1, np.int64)
    nbr = np.empty(cnt * formula.k, np.int32)
    edges = int(_kernels.incidence_adj(
        formula.lits, rows, right_index, indptr, nbr))
    nbr = nbr[:edges]
    match_l = np.full(cnt, -1, np.int32)
    match_r = np.full(nr, -1, np.int32)
    size = int(_kernels.hk_solve(indptr, nbr, nr, match_l, match_r))
    covered = size == cnt
    stats = _assemble_stats(formula, z, z_prime, cnt, covered, phase1, phase2)
    if not covered:
        reach_l = np.zeros(cnt, np.uint8)
        reach_r = np.zeros(nr, np.uint8)
        _kernels.hall_reach(indptr, nbr, match_l, match_r, reach_l, reach_r)
        subset = tuple((rows[reach_l != 0] + 1).tolist())
        neighborhood = tuple(zp_sorted[reach_r != 0].tolist())
        pairs = frozenset(
            (int(rows[match_r[r]]) + 1, int(zp_sorted[r]))
            for r in range(nr) if match_r[r] >= 0)
        return FixOutcome(assignment=None, failure_reason=FAIL_MATCHING,
                          stats=stats, z=tuple(z), z_prime=tuple(z_prime),
                          matching=Matching(pairs, cnt),
                          deficient_set=(subset, neighborhood))
    pairs = frozenset(
        (int(rows[u]) + 1, int(zp_sorted[match_l[u]])) for u in range(cnt))
    matching = Matching(pairs, cnt)
    values = _final_values(formula, z, z_prime, matching)
    if _kernels.first_unsatisfied(formula.lits, values) >= 0:
        raise RuntimeError("internal error: covering matching left a clause "
                           "unsatisfied")
    assignment = Assignment(formula.n, values)
    return FixOutcome(assignment=assignment, failure_reason=None, stats=stats,
                      z=tuple(z), z_prime=tuple(z_prime), matching=matching)


def _assemble_stats(formula, z, z_prime, endangered_count, covered,
                    phase1, phase2):
    if phase1 is not None and phase2 is not None:
        return collect_stats(formula, phase1, phase2, covered)
    # standalone call: definitional recomputation where possible
    zs = set(z)
    unique = sum(1 for i in range(1, formula.m + 1)
                 if is_z_unique(formula, zs, i))
    values = np.ones(formula.n + 1, np.uint8)
    values[0] = 0
    for v in z:
        values[v] = 0
    out = np.empty(formula.m, np.int32)
    unsat = int(_kernels.collect_unsatisfied(formula.lits, values, out))
    return PhaseStats(
        z_size=len(tuple(z)), z_unique_count=unique,
        unsat_after_phase1=unsat, z_prime_size=len(tuple(z_prime)),
        endangered_count=endangered_count,
        phase2_iterations=len(tuple(z_prime)) // 3,
        matching_covered=bool(covered),
        fallback_1e_count=phase1.fallback_1e_count if phase1 else 0)


def fix_solve(formula: Formula, trace: bool = False,
              snapshot: bool = False) -> FixOutcome:
    """Run the three phases. Deterministic; any returned assignment has
    been checked against the formula."""
    if formula.k < 2:
        raise ValueError("solver requires k >= 2")
    z, _, p1 = run_phase1(formula, trace=trace, snapshot=snapshot)
    z_prime, p2 = run_phase2(formula, z, snapshot=snapshot)
    if p2.anomaly_clause is not None:
        stats = collect_stats(formula, p1, p2, matching_covered=False)
        return FixOutcome(assignment=None, failure_reason=FAIL_ANOMALY,
                          stats=stats, z=z, z_prime=z_prime, trace=p1.trace)
    outcome = run_phase3(formula, z, z_prime, phase1=p1, phase2=p2)
    outcome.trace = p1.trace
    return outcome
