"""Per-run process statistics and the reference whp-style bounds.

The bounds here are asymptotic statements evaluated at finite sizes, so
check_bounds only reports ratios and statuses; callers decide what counts
as failure. Slack defaults are pilot-calibrated, recorded in the report.
"""

from __future__ import annotations

import dataclasses
import json
import math


@dataclasses.dataclass(frozen=True)
class TraceRecord:
    """One Phase-1 selection step: after step t the selection set has
    exactly t variables."""

    t: int
    clause_index: int      # 1-based scanned clause
    variable: int          # variable added at this step
    used_fallback: bool
    z_unique_count: int


@dataclasses.dataclass(frozen=True)
class PhaseStats:
    z_size: int
    z_unique_count: int
    unsat_after_phase1: int
    z_prime_size: int
    endangered_count: int
    phase2_iterations: int
    matching_covered: bool
    fallback_1e_count: int
    anomaly_flags: tuple = ()

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["anomaly_flags"] = list(self.anomaly_flags)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PhaseStats":
        d = json.loads(text)
        d["anomaly_flags"] = tuple(d.get("anomaly_flags", ()))
        return cls(**d)


@dataclasses.dataclass(frozen=True)
class ReferenceBounds:
    """Reference quantities computed from (n, k, m) only.

    epsilon inverts density = (1-eps) * 2^k * ln(k) / k; omega is then
    (1-eps) * ln k = density * k / 2^k. z_bound is defined only for
    omega > 1; epsilon <= 0 means the density sits outside the analyzed
    regime and the dependent bounds are not applicable.
    """

    n: int
    k: int
    m: int
    epsilon: float
    omega: float
    z_bound: float | None
    z_unique_bound: float | None
    unsat_bound: float | None
    z_prime_bound: float | None

    @classmethod
    def from_params(cls, n: int, k: int, m: int) -> "ReferenceBounds":
        density = m / n
        omega = density * k / (2.0 ** k)
        epsilon = 1.0 - density * k / (2.0 ** k * math.log(k)) if k > 1 else float("-inf")
        in_regime = epsilon > 0
        z_bound = 4.0 * n * math.log(omega) / k if omega > 1 else None
        z_unique_bound = (1 + epsilon / 3) * omega * n if in_regime else None
        unsat_bound = math.exp(-(k ** (epsilon / 8))) * n if in_regime else None
        z_prime_bound = n * float(k) ** -12 if in_regime else None
        return cls(n=n, k=k, m=m, epsilon=epsilon, omega=omega,
                   z_bound=z_bound, z_unique_bound=z_unique_bound,
                   unsat_bound=unsat_bound, z_prime_bound=z_prime_bound)


def collect_stats(formula, phase1, phase2, matching_covered: bool,
                  anomaly_flags=()) -> PhaseStats:
    """Assemble PhaseStats from completed phase states."""
    flags = tuple(anomaly_flags)
    if phase2.anomaly_clause is not None and "degenerate-clause" not in flags:
        flags = flags + ("degenerate-clause",)
    return PhaseStats(
        z_size=len(phase1.z),
        z_unique_count=phase1.z_unique_count,
        unsat_after_phase1=len(phase2.q_init),
        z_prime_size=len(phase2.z_prime),
        endangered_count=phase2.endangered_count,
        phase2_iterations=phase2.iterations,
        matching_covered=bool(matching_covered),
        fallback_1e_count=phase1.fallback_1e_count,
        anomaly_flags=flags,
    )


def check_bounds(stats: PhaseStats, bounds: ReferenceBounds,
                 slack: float = 1.5) -> dict:
    """Compare observed quantities against slack * bound.

    Returns {name: {observed, bound, limit, ratio, status}} with status one
    of "pass", "fail", "not-applicable". Purely informational; the unsat
    bound in particular is vacuous at desk-scale k, so downstream checks
    usually compare unsat_after_phase1 against 2^-k * m instead.
    """
    if slack < 1:
        raise ValueError("slack must be >= 1")
    checks = {
        "z_size": (stats.z_size, bounds.z_bound),
        "z_unique_count": (stats.z_unique_count, bounds.z_unique_bound),
        "unsat_after_phase1": (stats.unsat_after_phase1, bounds.unsat_bound),
        "z_prime_size": (stats.z_prime_size, bounds.z_prime_bound),
    }
    report = {"slack": slack, "epsilon": bounds.epsilon, "omega": bounds.omega}
    for name, (observed, bound) in checks.items():
        if bound is None:
            report[name] = {"observed": observed, "bound": None,
                            "limit": None, "ratio": None,
                            "status": "not-applicable"}
            continue
        limit = slack * bound
        ratio = observed / bound if bound > 0 else math.inf
        status = "pass" if observed <= limit else "fail"
        report[name] = {"observed": observed, "bound": bound,
                        "limit": limit, "ratio": ratio, "status": status}
    return report
