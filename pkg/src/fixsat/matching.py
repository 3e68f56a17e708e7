"""Bipartite matching between endangered clauses and repair variables.

Left vertices are endangered clause indices (1-based), right vertices are
repair-set variables. hopcroft_karp and brute_force_matching are independent
implementations kept separate on purpose: the brute-force search is the test
oracle for the fast one and must not share its code paths.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernels
from .formula import Formula


@dataclasses.dataclass(frozen=True)
class ClauseVariableGraph:
    """Incidence graph: edge {i, x} iff variable x of the repair set occurs
    in endangered clause i, any polarity, deduplicated."""

    left_vertices: tuple
    right_vertices: tuple
    adjacency: tuple  # per-left tuple of right neighbors (variable ids)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency)


@dataclasses.dataclass(frozen=True)
class Matching:
    """pairs: set of (clause index, variable) edges, vertex-disjoint."""

    pairs: frozenset
    left_total: int

    @property
    def covers_all(self) -> bool:
        return len(self.pairs) == self.left_total

    def variable_for(self, clause_index: int):
        for ci, x in self.pairs:
            if ci == clause_index:
                return x
        return None


def _membership(n: int, variables) -> np.ndarray:
    mask = np.zeros(n + 1, np.uint8)
    for v in variables:
        mask[v] = 1
    return mask


def build_incidence_graph(formula: Formula, z, z_prime) -> ClauseVariableGraph:
    in_z = _membership(formula.n, z)
    in_zp = _membership(formula.n, z_prime)
    out = np.empty(formula.m, np.int32)
    cnt = _kernels.endangered_scan(formula.lits, in_z, in_zp, out)
    left = []
    adjacency = []
    for i in out[:cnt]:
        row = formula.lits[i]
        neigh = sorted({int(abs(l)) for l in row if in_zp[abs(l)]})
        left.append(int(i) + 1)
        adjacency.append(tuple(neigh))
    right = tuple(sorted({int(v) for v in z_prime}))
    return ClauseVariableGraph(tuple(left), right, tuple(adjacency))


def _csr_of_graph(graph: ClauseVariableGraph):
    """Dense CSR form: neighbor lists as right-vertex positions."""
    right_ids = {v: j for j, v in enumerate(graph.right_vertices)}
    nl = len(graph.left_vertices)
    indptr = np.zeros(nl + 1, np.int64)
    for u, neigh in enumerate(graph.adjacency):
        indptr[u + 1] = indptr[u] + len(neigh)
    nbr = np.empty(int(indptr[-1]), np.int32)
    pos = 0
    for neigh in graph.adjacency:
        for x in neigh:
            nbr[pos] = right_ids[x]
            pos += 1
    return indptr, nbr


def hopcroft_karp(graph: ClauseVariableGraph) -> Matching:
    """Maximum-cardinality matching in O(E * sqrt(V)).

    Phases of BFS layering followed by vertex-disjoint augmenting DFS,
    run as an array kernel; the number of phases is O(sqrt(V)) by the
    standard argument."""
    nl = len(graph.left_vertices)
    nr = len(graph.right_vertices)
    indptr, nbr = _csr_of_graph(graph)
    match_l = np.full(nl, -1, np.int32)
    match_r = np.full(nr, -1, np.int32)
    _kernels.hk_solve(indptr, nbr, nr, match_l, match_r)
    pairs = frozenset(
        (graph.left_vertices[u], graph.right_vertices[match_l[u]])
        for u in range(nl) if match_l[u] >= 0)
    return Matching(pairs, nl)


def brute_force_matching(graph: ClauseVariableGraph) -> Matching:
    """Exhaustive maximum matching; oracle for hopcroft_karp, capped at 15
    left vertices."""
    nl = len(graph.left_vertices)
    if nl > 15:
        raise ValueError("brute_force_matching is capped at 15 left vertices")
    best = {}

    def extend(u: int, used: set, current: dict):
        nonlocal best
        if len(current) + (nl - u) <= len(best):
            return  # cannot beat the incumbent even if all remaining match
        if u == nl:
            best = dict(current)
            return
        # skip u
        extend(u + 1, used, current)
        for x in graph.adjacency[u]:
            if x not in used:
                used.add(x)
                current[u] = x
                extend(u + 1, used, current)
                del current[u]
                used.discard(x)

    extend(0, set(), {})
    pairs = frozenset((graph.left_vertices[u], x) for u, x in best.items())
    return Matching(pairs, nl)


def verify_matching(graph: ClauseVariableGraph, matching: Matching,
                    require_coverage: bool = False) -> bool:
    """Edge membership and vertex-disjointness; coverage of every left
    vertex only when require_coverage (a maximum matching need not cover)."""
    edges = set()
    for u, neigh in enumerate(graph.adjacency):
        for x in neigh:
            edges.add((graph.left_vertices[u], x))
    seen_l = set()
    seen_r = set()
    for ci, x in matching.pairs:
        if (ci, x) not in edges:
            return False
        if ci in seen_l or x in seen_r:
            return False
        seen_l.add(ci)
        seen_r.add(x)
    if require_coverage and len(matching.pairs) != len(graph.left_vertices):
        return False
    return True


def hall_deficient_set(graph: ClauseVariableGraph, matching: Matching):
    """Certificate for a non-covering maximum matching.

    Returns (clause_subset, neighborhood) with |neighborhood| < |subset|,
    found by alternating BFS from the unmatched left vertices; None when the
    matching covers every left vertex. Only meaningful when the matching is
    maximum."""
    nl = len(graph.left_vertices)
    if len(matching.pairs) == nl:
        return None
    nr = len(graph.right_vertices)
    indptr, nbr = _csr_of_graph(graph)
    left_pos = {ci: u for u, ci in enumerate(graph.left_vertices)}
    right_ids = {v: j for j, v in enumerate(graph.right_vertices)}
    match_l = np.full(nl, -1, np.int32)
    match_r = np.full(nr, -1, np.int32)
    for ci, x in matching.pairs:
        u = left_pos[ci]
        r = right_ids[x]
        match_l[u] = r
        match_r[r] = u
    reach_l = np.zeros(nl, np.uint8)
    reach_r = np.zeros(nr, np.uint8)
    _kernels.hall_reach(indptr, nbr, match_l, match_r, reach_l, reach_r)
    subset = tuple(sorted(
        graph.left_vertices[u] for u in range(nl) if reach_l[u]))
    neighborhood = tuple(sorted(
        graph.right_vertices[r] for r in range(nr) if reach_r[r]))
    return subset, neighborhood
