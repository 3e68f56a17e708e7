"""Experiment driver: generate instances, solve them, sweep density grids.

Sweep seeds are derived per (point, rep) from the base seed, never from
scheduler order, so a sweep is reproducible at any parallelism and any
single point can be re-run in isolation. Rows are emitted in deterministic
(point, rep, algorithm) order and flushed as they complete.

Exit codes for solve/validate: 10 = satisfied, 20 = solver reported fail /
assignment does not satisfy; any other nonzero is a usage or internal error.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from . import baselines, solver
from .formula import (
    Assignment,
    Formula,
    GeneratorConfig,
    evaluate,
    parse_dimacs,
    sample_formula,
    unsatisfied_indices,
    write_dimacs,
)

CSV_HEADER = ("k,n,m,density,algorithm,seed,success,runtime_ms,"
              "assignment_sha256,failure_reason,phase_stats")

_MASK64 = (1 << 64) - 1
_Z95 = 1.959963984540054


def _blake64(text: str) -> int:
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(),
                          "big")


def derive_formula_seed(base_seed: int, k: int, n: int, density: float,
                        rep: int) -> int:
    """base_seed XOR hash(point, rep): the formula at a grid point is shared
    by every algorithm and independent of scheduling."""
    h = _blake64(f"formula|{k}|{n}|{float(density)!r}|{rep}")
    return (int(base_seed) ^ h) & _MASK64


def derive_solver_seed(formula_seed: int, algorithm: str) -> int:
    return (int(formula_seed) ^ _blake64(f"solver|{algorithm}")) & _MASK64


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    k: int
    n: int
    density_grid: tuple
    repetitions: int
    algorithms: tuple
    base_seed: int
    parallelism: int = 1
    out_path: str | None = None
    fmt: str = "csv"
    max_flips: int | None = None

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.density_grid or any(d <= 0 for d in self.density_grid):
            raise ValueError("densities must be positive")
        bad = [a for a in self.algorithms if a not in baselines.ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms: {bad}")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


@dataclasses.dataclass(frozen=True)
class ResultRow:
    k: int
    n: int
    m: int
    density: float
    algorithm: str
    seed: int
    success: bool
    runtime_ms: float
    assignment_sha256: str
    failure_reason: str
    phase_stats: str

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="")
        w.writerow([self.k, self.n, self.m, repr(float(self.density)),
                    self.algorithm, self.seed,
                    "true" if self.success else "false",
                    f"{self.runtime_ms:.3f}", self.assignment_sha256,
                    self.failure_reason, self.phase_stats])
        return buf.getvalue()

    def to_json(self) -> str:
        d = dataclasses.asdict(self)
        d["phase_stats"] = json.loads(self.phase_stats) if self.phase_stats else None
        d["failure_reason"] = self.failure_reason or None
        return json.dumps(d, sort_keys=True)


def assignment_sha256(assignment: Assignment) -> str:
    return hashlib.sha256(assignment.values[1:].tobytes()).hexdigest()


def _solve_one(formula: Formula, algorithm: str, seed: int,
               max_flips: int | None):
    """Returns (success, assignment, failure_reason, phase_stats_json)."""
    if algorithm == "FIX":
        out = solver.fix_solve(formula)
        return out.success, out.assignment, out.failure_reason or "", \
            out.stats.to_json()
    if algorithm == "UC":
        r = baselines.unit_clause_solve(formula, seed)
    elif algorithm == "SC":
        r = baselines.shortest_clause_solve(formula, seed)
    elif algorithm == "WALKSAT":
        r = baselines.walksat_solve(formula, seed, max_flips)
    elif algorithm == "PL":
        r = baselines.pure_literal_solve(formula, seed)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return r.success, r.assignment, r.failure_reason or "", ""


def _run_task(task):
    """One (point, rep): generate the shared formula, run every algorithm.
    Module-level for pickling into worker processes."""
    (k, n, density, rep, base_seed, algorithms, max_flips) = task
    fseed = derive_formula_seed(base_seed, k, n, density, rep)
    cfg = GeneratorConfig(n=n, k=k, seed=fseed, density=density)
    f = sample_formula(cfg)
    rows = []
    for algo in algorithms:
        sseed = derive_solver_seed(fseed, algo)
        t0 = time.perf_counter()
        success, assignment, reason, stats = _solve_one(f, algo, sseed,
                                                        max_flips)
        ms = (time.perf_counter() - t0) * 1000.0
        if success and not evaluate(f, assignment):
            raise RuntimeError(f"{algo} returned a non-satisfying assignment")
        digest = assignment_sha256(assignment) if success else ""
        rows.append(ResultRow(k=k, n=n, m=f.m, density=float(density),
                              algorithm=algo, seed=sseed, success=success,
                              runtime_ms=ms, assignment_sha256=digest,
                              failure_reason=reason, phase_stats=stats))
    return rows


def run_sweep(config: SweepConfig, sink=None):
    """Execute the sweep; returns (rows, summary).

    summary is a list of dicts per (density, algorithm) with the success
    fraction and Wilson 95% interval. When config.out_path is set, rows are
    streamed there in deterministic order and flushed per task so a crash
    preserves the completed prefix. sink overrides the output stream (for
    tests)."""
    tasks = [(config.k, config.n, d, rep, config.base_seed,
              config.algorithms, config.max_flips)
             for d in config.density_grid
             for rep in range(config.repetitions)]
    close_sink = False
    if sink is None and config.out_path:
        sink = open(config.out_path, "w", encoding="utf-8", newline="")
        close_sink = True
    try:
        if sink is not None and config.fmt == "csv":
            sink.write(CSV_HEADER + "\n")
            sink.flush()
        rows = []

        def emit(task_rows):
            for row in task_rows:
                rows.append(row)
                if sink is not None:
                    line = row.to_csv() if config.fmt == "csv" else row.to_json()
                    sink.write(line + "\n")
            if sink is not None:
                sink.flush()

        if config.parallelism == 1:
            for t in tasks:
                emit(_run_task(t))
        else:
            # executor.map preserves task order, so emission order stays
            # deterministic regardless of completion order
            with ProcessPoolExecutor(max_workers=config.parallelism) as ex:
                for task_rows in ex.map(_run_task, tasks):
                    emit(task_rows)
    finally:
        if close_sink:
            sink.close()
    summary = summarize(rows)
    return rows, summary


def wilson_interval(successes: int, total: int):
    """95% Wilson score interval for a binomial fraction."""
    if total < 1:
        raise ValueError("need at least one observation")
    p = successes / total
    z2 = _Z95 * _Z95
    denom = 1 + z2 / total
    center = (p + z2 / (2 * total)) / denom
    half = _Z95 * math.sqrt(p * (1 - p) / total + z2 / (4 * total * total)) / denom
    # the interval endpoints are exactly 0/1 at the extremes; rounding in
    # the sqrt otherwise leaves a stray ulp
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == total else min(1.0, center + half)
    return lo, hi


def estimate_success_rate(rows, density: float, algorithm: str):
    """(fraction, (lo, hi)) over the rows at one grid point."""
    hits = [r for r in rows
            if r.algorithm == algorithm and float(r.density) == float(density)]
    if not hits:
        raise ValueError(f"no rows at density={density} algorithm={algorithm}")
    s = sum(1 for r in hits if r.success)
    return s / len(hits), wilson_interval(s, len(hits))


def summarize(rows):
    points = {}
    for r in rows:
        points.setdefault((r.density, r.algorithm), []).append(r)
    out = []
    for (density, algo), rs in sorted(points.items(),
                                      key=lambda kv: (kv[0][0], kv[0][1])):
        s = sum(1 for r in rs if r.success)
        lo, hi = wilson_interval(s, len(rs))
        out.append({"density": density, "algorithm": algo,
                    "successes": s, "total": len(rs),
                    "fraction": s / len(rs), "wilson_lo": lo, "wilson_hi": hi})
    return out


# ----------------------------------------------------------------- CLI

@click.group()
def main():
    """Random k-SAT workbench: generate, solve, sweep, validate."""


@main.command("gen")
@click.option("--n", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--m", type=int, default=None)
@click.option("--density", type=float, default=None)
@click.option("--seed", type=int, required=True)
@click.option("--force", is_flag=True, help="overwrite an existing file")
@click.argument("out_path", type=click.Path(dir_okay=False))
def cmd_gen(n, k, m, density, seed, force, out_path):
    """Sample a formula and write it as DIMACS CNF."""
    if os.path.exists(out_path) and not force:
        raise click.UsageError(f"{out_path} exists; pass --force to overwrite")
    try:
        cfg = GeneratorConfig(n=n, k=k, seed=seed, m=m, density=density)
    except ValueError as e:
        raise click.UsageError(str(e))
    f = sample_formula(cfg)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"c generator {cfg.to_json()}\n")
        fh.write(write_dimacs(f))
    click.echo(f"wrote {out_path}: n={f.n} k={f.k} m={f.m}")


def _read_formula(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_dimacs(fh.read())
    except (OSError, ValueError) as e:
        raise click.ClickException(f"cannot read {path}: {e}")


@main.command("solve")
@click.option("--algo", type=click.Choice(["fix", "uc", "sc", "walksat", "pl"],
                                          case_sensitive=False), default="fix")
@click.option("--seed", type=int, default=0)
@click.option("--max-flips", type=int, default=None)
@click.option("--trace-out", type=click.Path(dir_okay=False), default=None,
              help="write solver stats (and Phase-1 trace for fix) as JSON")
@click.argument("in_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def cmd_solve(ctx, algo, seed, max_flips, trace_out, in_path):
    """Solve a DIMACS file. Exit 10 on SAT, 20 on solver failure."""
    f = _read_formula(in_path)
    algorithm = algo.upper()
    report = {}
    if algorithm == "FIX":
        out = solver.fix_solve(f, trace=trace_out is not None)
        success, assignment = out.success, out.assignment
        reason = out.failure_reason
        report["phase_stats"] = json.loads(out.stats.to_json())
        if out.trace is not None:
            report["phase1_trace"] = [dataclasses.asdict(t) for t in out.trace]
    else:
        success, assignment, reason, stats = _solve_one(f, algorithm, seed,
                                                        max_flips)
        reason = reason or None
        if stats:
            report["phase_stats"] = json.loads(stats)
    if trace_out is not None:
        report["algorithm"] = algorithm
        report["success"] = bool(success)
        with open(trace_out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    if success:
        click.echo("SAT")
        vals = [str(v if assignment[v] else -v) for v in range(1, f.n + 1)]
        for i in range(0, len(vals), 20):
            click.echo("v " + " ".join(vals[i:i + 20]))
        click.echo("v 0")
        ctx.exit(10)
    click.echo(f"FAIL {reason}")
    ctx.exit(20)


@main.command("sweep")
@click.option("--k", type=int, required=True)
@click.option("--n", type=int, required=True)
@click.option("--densities", type=str, default=None,
              help="comma-separated density grid")
@click.option("--density-from", type=float, default=None)
@click.option("--density-to", type=float, default=None)
@click.option("--density-step", type=float, default=None)
@click.option("--reps", type=int, default=5)
@click.option("--algos", type=str, default="FIX,UC,SC,WALKSAT,PL")
@click.option("--base-seed", type=int, default=0)
@click.option("-j", "--parallelism", type=int,
              default=lambda: int(os.environ.get("FIXSAT_PARALLELISM", "1")))
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv")
@click.option("--max-flips", type=int, default=None)
def cmd_sweep(k, n, densities, density_from, density_to, density_step, reps,
              algos, base_seed, parallelism, out_path, fmt, max_flips):
    """Run a density sweep and print the per-point summary table."""
    if densities:
        grid = tuple(float(d) for d in densities.split(","))
    elif density_from is not None and density_to is not None and density_step:
        grid = []
        d = density_from
        while d <= density_to + 1e-9:
            grid.append(round(d, 10))
            d += density_step
        grid = tuple(grid)
    else:
        raise click.UsageError("give --densities or --density-from/to/step")
    algorithms = tuple(a.strip().upper() for a in algos.split(",") if a.strip())
    try:
        config = SweepConfig(k=k, n=n, density_grid=grid, repetitions=reps,
                             algorithms=algorithms, base_seed=base_seed,
                             parallelism=parallelism, out_path=out_path,
                             fmt=fmt, max_flips=max_flips)
    except ValueError as e:
        raise click.UsageError(str(e))
    rows, summary = run_sweep(config)
    click.echo(f"{'density':>10} {'algorithm':>9} {'succ':>5} {'total':>5} "
               f"{'fraction':>8} {'wilson95':>17}")
    for s in summary:
        click.echo(f"{s['density']:>10.3f} {s['algorithm']:>9} "
                   f"{s['successes']:>5} {s['total']:>5} "
                   f"{s['fraction']:>8.3f} "
                   f"[{s['wilson_lo']:.3f}, {s['wilson_hi']:.3f}]")
    if out_path:
        click.echo(f"rows written to {out_path}")


def _parse_assignment_file(text: str, n: int) -> Assignment:
    """Signed ints set variables; 0 and non-integer tokens (v markers,
    status words) are ignored; unmentioned variables stay true."""
    values = np.ones(n + 1, np.uint8)
    values[0] = 0
    seen = 0
    for tok in text.split():
        try:
            lit = int(tok)
        except ValueError:
            continue
        if lit == 0:
            continue
        var = abs(lit)
        if not 1 <= var <= n:
            raise ValueError(f"variable {var} out of range")
        values[var] = 1 if lit > 0 else 0
        seen += 1
    if seen == 0:
        raise ValueError("no literals found in assignment file")
    return Assignment(n, values)


@main.command("validate")
@click.argument("cnf_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("assignment_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def cmd_validate(ctx, cnf_path, assignment_path):
    """Check an assignment file (signed ints or DIMACS v-lines; variables
    not mentioned default to true) against a CNF. Exit 10/20."""
    f = _read_formula(cnf_path)
    try:
        with open(assignment_path, encoding="utf-8") as fh:
            text = fh.read()
        a = _parse_assignment_file(text, f.n)
    except (OSError, ValueError) as e:
        raise click.ClickException(f"cannot read assignment: {e}")
    if evaluate(f, a):
        click.echo("SATISFIED")
        ctx.exit(10)
    bad = unsatisfied_indices(f, a)
    click.echo(f"UNSATISFIED {len(bad)} clauses, first: {bad[:10]}")
    ctx.exit(20)


if __name__ == "__main__":
    main()
