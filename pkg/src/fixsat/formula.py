"""k-uniform random CNF: representation, sampling, DIMACS I/O, evaluation.

A formula holds its literals as an (m, k) int32 array, +v for a positive
occurrence of variable v and -v for a negative one. Clause order and
literal order are significant and survive I/O round trips; repeated
variables inside a clause are allowed, matching the sampling model where
every literal is drawn independently and uniformly from the 2n candidates.

Large instances (more than FIXSAT_MEMMAP_THRESHOLD literals, default 3e8)
are generated straight into a read-only on-disk memmap so the literal table
never has to fit in RAM; the occurrence index stays in memory either way.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
import weakref

import numpy as np

from . import _kernels
from ._rng import DOMAIN_GENERATION, philox

_GEN_BLOCK = 4096
_DEFAULT_MEMMAP_THRESHOLD = 300_000_000


def _memmap_threshold() -> int:
    raw = os.environ.get("FIXSAT_MEMMAP_THRESHOLD", "")
    if raw.strip():
        return int(float(raw))
    return _DEFAULT_MEMMAP_THRESHOLD


@dataclasses.dataclass(frozen=True)
class GeneratorConfig:
    """Sampling parameters. Give either m directly or a density r with
    m = floor(r * n). Identical configs produce bit-identical formulas."""

    n: int
    k: int
    seed: int
    m: int | None = None
    density: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if (self.m is None) == (self.density is None):
            raise ValueError("give exactly one of m and density")
        if self.m is not None and self.m < 0:
            raise ValueError("m must be >= 0")
        if self.density is not None and self.density < 0:
            raise ValueError("density must be >= 0")

    @property
    def clause_total(self) -> int:
        if self.m is not None:
            return int(self.m)
        return int(math.floor(self.density * self.n))

    def to_json(self) -> str:
        d = {"n": self.n, "k": self.k, "seed": self.seed}
        if self.m is not None:
            d["m"] = self.m
        else:
            d["density"] = self.density
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorConfig":
        d = json.loads(text)
        return cls(n=d["n"], k=d["k"], seed=d["seed"],
                   m=d.get("m"), density=d.get("density"))


class Assignment:
    """Total truth assignment over variables 1..n.

    values is a uint8 array of length n+1 (slot 0 unused), 1 for true.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.uint8)
        if values.shape != (n + 1,):
            raise ValueError("values must have shape (n+1,)")
        self.n = n
        self.values = values

    @classmethod
    def all_true(cls, n: int) -> "Assignment":
        v = np.ones(n + 1, np.uint8)
        v[0] = 0
        return cls(n, v)

    @classmethod
    def all_false(cls, n: int) -> "Assignment":
        return cls(n, np.zeros(n + 1, np.uint8))

    @classmethod
    def from_dict(cls, n: int, mapping) -> "Assignment":
        v = np.zeros(n + 1, np.uint8)
        for var, val in mapping.items():
            if not 1 <= var <= n:
                raise ValueError(f"variable {var} out of range")
            v[var] = 1 if val else 0
        return cls(n, v)

    def with_values(self, mapping) -> "Assignment":
        v = self.values.copy()
        for var, val in mapping.items():
            v[var] = 1 if val else 0
        return Assignment(self.n, v)

    def __getitem__(self, var: int) -> bool:
        if not 1 <= var <= self.n:
            raise IndexError(f"variable {var} out of range")
        return bool(self.values[var])

    def __eq__(self, other):
        return (isinstance(other, Assignment) and self.n == other.n
                and np.array_equal(self.values[1:], other.values[1:]))

    def to_dict(self) -> dict:
        return {v: bool(self.values[v]) for v in range(1, self.n + 1)}

    def __repr__(self):
        return f"Assignment(n={self.n})"


class OccurrenceIndex:
    """Per-variable occurrence lists in CSR layout.

    Entries for variable v are occ[indptr[v]:indptr[v+1]], each the signed
    1-based clause id (+/- for polarity), ascending by clause and position.
    """

    __slots__ = ("indptr", "occ")

    def __init__(self, indptr: np.ndarray, occ: np.ndarray):
        self.indptr = indptr
        self.occ = occ

    @classmethod
    def build(cls, formula: "Formula") -> "OccurrenceIndex":
        n = formula.n
        counts = np.zeros(n + 1, np.int64)
        _kernels.count_occurrences(formula.lits, counts)
        indptr = np.empty(n + 2, np.int64)
        indptr[0] = 0
        np.cumsum(counts, out=indptr[1:])
        occ = np.empty(indptr[-1], np.int32)
        cursor = indptr[:-1].copy()
        _kernels.fill_occurrences(formula.lits, cursor, occ)
        return cls(indptr, occ)

    def occurrences(self, var: int) -> np.ndarray:
        return self.occ[self.indptr[var]:self.indptr[var + 1]]


class Formula:
    """k-uniform CNF over variables 1..n with m ordered clauses."""

    __slots__ = ("n", "k", "m", "lits", "config", "_occ", "__weakref__")

    def __init__(self, n: int, k: int, lits: np.ndarray,
                 config: GeneratorConfig | None = None, validate: bool = True):
        if lits.ndim != 2 or lits.shape[1] != k:
            raise ValueError("lits must be an (m, k) array")
        if lits.dtype != np.int32:
            lits = lits.astype(np.int32)
        if validate and lits.size:
            a = np.abs(lits)
            if a.min() < 1 or a.max() > n:
                raise ValueError("literal variable out of range")
        self.n = int(n)
        self.k = int(k)
        self.m = int(lits.shape[0])
        self.lits = lits
        self.config = config
        self._occ = None

    @property
    def clauses(self):
        """Iterate clauses as tuples of signed ints."""
        for i in range(self.m):
            yield tuple(int(x) for x in self.lits[i])

    def clause(self, i: int) -> tuple:
        """0-based clause accessor."""
        return tuple(int(x) for x in self.lits[i])

    def occurrence_index(self) -> OccurrenceIndex:
        if self._occ is None:
            self._occ = OccurrenceIndex.build(self)
        return self._occ

    def __eq__(self, other):
        return (isinstance(other, Formula) and self.n == other.n
                and self.k == other.k
                and np.array_equal(self.lits, other.lits))

    def __repr__(self):
        return f"Formula(n={self.n}, k={self.k}, m={self.m})"


def from_clauses(n: int, clauses) -> Formula:
    """Build a formula from an iterable of equal-width literal tuples."""
    rows = [tuple(c) for c in clauses]
    if not rows:
        raise ValueError("need at least one clause")
    k = len(rows[0])
    if any(len(r) != k for r in rows):
        raise ValueError("non-uniform clause width")
    if k == 0:
        raise ValueError("empty clauses not allowed")
    lits = np.array(rows, dtype=np.int32)
    if np.any(lits == 0):
        raise ValueError("literal 0 is not allowed")
    return Formula(n, k, lits)


def _unlink_quietly(path):
    try:
        os.unlink(path)
    except OSError:
        pass


def sample_formula(config: GeneratorConfig) -> Formula:
    """Draw each of the k*m literals independently and uniformly.

    Literals are drawn clause-major in blocks of 4096 clauses, each block
    from its own keyed Philox stream, so the output depends only on the
    config and disjoint blocks could be produced in parallel.
    """
    n, k = config.n, config.k
    m = config.clause_total
    total = m * k
    if total > _memmap_threshold():
        fd, path = tempfile.mkstemp(prefix="fixsat-lits-", suffix=".npy",
                                    dir=os.environ.get("FIXSAT_TMPDIR") or None)
        os.close(fd)
        lits = np.lib.format.open_memmap(path, mode="w+", dtype=np.int32,
                                         shape=(m, k))
    else:
        path = None
        lits = np.empty((m, k), np.int32)
    seed = int(config.seed) & ((1 << 64) - 1)
    for b, lo in enumerate(range(0, m, _GEN_BLOCK)):
        hi = min(lo + _GEN_BLOCK, m)
        g = philox(seed, DOMAIN_GENERATION, b)
        codes = g.integers(0, 2 * n, size=(hi - lo, k), dtype=np.int64)
        variables = (codes >> 1).astype(np.int32) + 1
        negative = (codes & 1).astype(np.int32)
        lits[lo:hi] = variables * (1 - 2 * negative)
    if path is not None:
        lits.flush()
        del lits
        lits = np.load(path, mmap_mode="r")
        f = Formula(n, k, lits, config=config, validate=False)
        weakref.finalize(f, _unlink_quietly, path)
        return f
    return Formula(n, k, lits, config=config, validate=False)


def _values_of(assignment, n: int) -> np.ndarray:
    if isinstance(assignment, Assignment):
        if assignment.n != n:
            raise ValueError("assignment is over a different variable count")
        return assignment.values
    values = np.ascontiguousarray(assignment, dtype=np.uint8)
    if values.shape != (n + 1,):
        raise ValueError("values must have shape (n+1,)")
    return values


def evaluate(formula: Formula, assignment) -> bool:
    """True iff every clause has at least one true literal."""
    values = _values_of(assignment, formula.n)
    return _kernels.first_unsatisfied(formula.lits, values) < 0


def unsatisfied_indices(formula: Formula, assignment) -> list:
    """Ascending 1-based indices of unsatisfied clauses."""
    values = _values_of(assignment, formula.n)
    out = np.empty(formula.m, np.int32)
    cnt = _kernels.collect_unsatisfied(formula.lits, values, out)
    return [int(i) + 1 for i in out[:cnt]]


def parse_dimacs(text: str) -> Formula:
    """Parse DIMACS CNF. Clause width must be uniform; the solver's window
    arithmetic requires it. Literal order and duplicates are preserved."""
    n = m = None
    body = []
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        if s.startswith("p"):
            if n is not None:
                raise ValueError("duplicate DIMACS header")
            parts = s.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"malformed header: {s!r}")
            n, m = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ValueError("clause data before header")
        body.append(s)
    if n is None:
        raise ValueError("missing DIMACS header")
    tokens = " ".join(body).split()
    clauses = []
    cur = []
    for tok in tokens:
        lit = int(tok)
        if lit == 0:
            if not cur:
                raise ValueError("empty clause")
            clauses.append(tuple(cur))
            cur = []
        else:
            if not 1 <= abs(lit) <= n:
                raise ValueError(f"literal {lit} out of range for n={n}")
            cur.append(lit)
    if cur:
        raise ValueError("unterminated clause")
    if len(clauses) != m:
        raise ValueError(f"header says {m} clauses, found {len(clauses)}")
    widths = {len(c) for c in clauses}
    if len(widths) > 1:
        raise ValueError(f"non-uniform clause width: {sorted(widths)}")
    k = widths.pop() if widths else 1
    lits = np.array(clauses, dtype=np.int32).reshape(m, k)
    return Formula(n, k, lits, validate=False)


def write_dimacs(formula: Formula) -> str:
    out = [f"p cnf {formula.n} {formula.m}"]
    for i in range(formula.m):
        row = formula.lits[i]
        out.append(" ".join(str(int(x)) for x in row) + " 0")
    return "\n".join(out) + "\n"


def duplicate_stats(formula: Formula) -> dict:
    """Collision diagnostics: clauses with a repeated variable, clauses
    sharing two or more variables with some other clause, and the largest
    number of clauses any single variable appears in. O(m k^2); meant for
    inspection, not hot paths."""
    va = np.abs(formula.lits.astype(np.int64))
    sva = np.sort(va, axis=1)
    repeat = int(np.count_nonzero((sva[:, 1:] == sva[:, :-1]).any(axis=1)))
    first = np.ones_like(sva, dtype=bool)
    first[:, 1:] = sva[:, 1:] != sva[:, :-1]
    degrees = np.bincount(sva[first], minlength=formula.n + 1)
    max_degree = int(degrees[1:].max()) if formula.n else 0
    pair_owner = {}
    shared = set()
    for i in range(formula.m):
        vs = sorted(set(int(v) for v in va[i]))
        for a_i in range(len(vs)):
            for b_i in range(a_i + 1, len(vs)):
                key = (vs[a_i], vs[b_i])
                prev = pair_owner.get(key)
                if prev is None:
                    pair_owner[key] = i
                else:
                    shared.add(prev)
                    shared.add(i)
    return {
        "repeat_var_clauses": repeat,
        "shared_pair_clauses": len(shared),
        "max_var_degree": max_degree,
    }
