"""Bound checks and the reproducible experiment suite.

Every check produces an :class:`ExperimentRecord`; a suite is a list of
blocks, each expanding to records that are written as one CSV row apiece.
Only ``wall_ms`` varies between reruns with the same seeds.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ._io import atomic_write_text, dump_json
from .configuration import (Configuration, config_ref, generate_collinear, generate_grid,
                            generate_nested_rings, generate_random)
from .geometry import RIGHT_ANGLE, AnglePolicy
from .monotone import es_trajectory, lower_bound
from .solver import (Budget, SolveReport, beam_longest, brute_force_longest,
                     exact_longest, validate_trajectory)

CSV_COLUMNS = ["experiment_id", "generator", "n", "m", "seed", "alpha_deg", "lower_bound",
               "upper_bound", "es_len", "solver_mode", "solver_len", "status", "nodes",
               "wall_ms", "pass"]
TIMING_COLUMNS = ("wall_ms",)


@dataclass(frozen=True)
class BoundPair:
    n: int
    lower: int
    upper: int


def upper_bound(n: int) -> int:
    """3 * ceil(sqrt(n)), in integer arithmetic."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = isqrt(n)
    return 3 * (r if r * r == n else r + 1)


def bounds(n: int) -> BoundPair:
    if n < 1:
        raise ValueError("n must be >= 1")
    return BoundPair(n, lower_bound(n), upper_bound(n))


@dataclass
class ExperimentRecord:
    experiment_id: str
    generator: str
    n: int
    m: Optional[int]
    seed: Optional[int]
    alpha_deg: str
    lower_bound: int
    upper_bound: int
    es_len: Optional[int] = None
    solver_mode: str = ""
    solver_len: Optional[int] = None
    status: str = ""
    nodes: Optional[int] = None
    wall_ms: float = 0.0
    passed: bool = True
    config_ref: str = ""
    trajectories: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def fail(self, reason: str):
        self.passed = False
        self.notes.append(reason)

    def row(self) -> dict:
        def cell(v):
            return "" if v is None else v
        return {
            "experiment_id": self.experiment_id, "generator": self.generator, "n": self.n,
            "m": cell(self.m), "seed": cell(self.seed), "alpha_deg": self.alpha_deg,
            "lower_bound": self.lower_bound, "upper_bound": self.upper_bound,
            "es_len": cell(self.es_len), "solver_mode": self.solver_mode,
            "solver_len": cell(self.solver_len), "status": self.status, "nodes": cell(self.nodes),
            "wall_ms": f"{self.wall_ms:.3f}", "pass": "PASS" if self.passed else "FAIL",
        }


def _record(config: Configuration, experiment_id: str, policy: AnglePolicy = RIGHT_ANGLE,
            m: Optional[int] = None) -> ExperimentRecord:
    b = bounds(len(config))
    return ExperimentRecord(experiment_id, config.meta.generator, len(config),
                            m if m is not None else config.meta.params.get("m"),
                            config.meta.seed, policy.label, b.lower, b.upper,
                            config_ref=config_ref(config))


def _attach(record: ExperimentRecord, config: Configuration, report: SolveReport):
    record.solver_mode = report.mode
    record.solver_len = report.best_length
    record.status = report.status.value
    record.nodes = report.nodes_expanded
    record.wall_ms += report.wall_ms
    record.trajectories["solver"] = report.best_indices
    if not validate_trajectory(config, report.best_indices, report.policy):
        record.fail("solver trajectory does not validate")
    if not validate_trajectory(config, report.best_indices[::-1], report.policy):
        record.fail("reversed solver trajectory does not validate")


def _run_solver(config, mode, policy, budget, seed=0, jobs=1) -> SolveReport:
    if mode == "exact":
        return exact_longest(config, policy, budget, jobs)
    if mode == "oracle":
        return brute_force_longest(config, policy)
    if mode == "beam":
        n = len(config)
        return beam_longest(config, policy, beam_width=max(64, n * n), restarts=2, seed=seed or 0)
    raise ValueError(f"unknown solver mode {mode!r}")


def verify_lower_bound(config: Configuration, experiment_id: str = "lower",
                       solver_mode: Optional[str] = None, budget: Optional[Budget] = None) -> ExperimentRecord:
    """Run the monotone-chain construction and check it reaches the lower bound.

    With ``solver_mode`` set, the configuration is also solved and the
    construction must not beat a proved optimum.
    """
    rec = _record(config, experiment_id)
    start = time.perf_counter()
    traj = es_trajectory(config)
    rec.wall_ms = (time.perf_counter() - start) * 1000
    rec.es_len = traj.length
    rec.trajectories["es"] = traj.indices
    if not validate_trajectory(config, traj.indices):
        rec.fail("monotone trajectory does not validate")
    if traj.length < rec.lower_bound:
        rec.fail(f"monotone trajectory has {traj.length} < {rec.lower_bound} vertices")
    if solver_mode:
        report = _run_solver(config, solver_mode, RIGHT_ANGLE, budget, config.meta.seed)
        _attach(rec, config, report)
        if report.optimal and traj.length > report.best_length:
            rec.fail("monotone trajectory longer than proved optimum")
    return rec


def verify_upper_bound(m: int, budget: Optional[Budget] = None, mode: str = "exact",
                       experiment_id: str = "upper", jobs: int = 1) -> ExperimentRecord:
    """Solve the certified nested-ring configuration and check length <= 3m.

    A bound violation by any trajectory, proved optimal or not, is a failure.
    """
    config = generate_nested_rings(m)
    rec = _record(config, experiment_id, m=m)
    rec.upper_bound = 3 * m
    traj = es_trajectory(config)
    rec.es_len = traj.length
    rec.trajectories["es"] = traj.indices
    report = _run_solver(config, mode, RIGHT_ANGLE, budget, jobs=jobs)
    _attach(rec, config, report)
    if report.best_length > 3 * m:
        rec.fail(f"trajectory of length {report.best_length} exceeds 3m = {3 * m}")
    if report.optimal:
        if report.best_length < rec.lower_bound:
            rec.fail("proved optimum below the lower bound")
        if traj.length > report.best_length:
            rec.fail("monotone trajectory longer than proved optimum")
    return rec


def oracle_equivalence(config: Configuration, experiment_id: str = "oracle",
                       policy: AnglePolicy = RIGHT_ANGLE) -> ExperimentRecord:
    """Exact branch-and-bound against exhaustive enumeration on one configuration."""
    rec = _record(config, experiment_id, policy)
    exact = exact_longest(config, policy)
    oracle = brute_force_longest(config, policy)
    _attach(rec, config, exact)
    rec.wall_ms += oracle.wall_ms
    if not exact.optimal:
        rec.fail("exact search did not complete")
    if exact.best_length != oracle.best_length:
        rec.fail(f"exact {exact.best_length} != oracle {oracle.best_length}")
    return rec


def alpha_sweep(config: Configuration, alphas: Sequence[float], budget: Optional[Budget] = None,
                experiment_id: str = "sweep", mode: str = "exact") -> list[ExperimentRecord]:
    """Solve under each lower turn angle (degrees, ascending) and check monotonicity.

    Proved-optimal lengths must not increase as the angle grows; a violation
    marks the later row as failed.
    """
    alphas = list(alphas)
    if alphas != sorted(alphas):
        raise ValueError("alphas must be sorted ascending")
    for a in alphas:
        if not 0 <= a < 180:
            raise ValueError(f"alpha must lie in [0, 180) degrees, got {a}")
    es = es_trajectory(config)
    records = []
    optimal_rows: list[tuple[str, int]] = []
    for a in alphas:
        policy = AnglePolicy.from_degrees(a)
        rec = _record(config, f"{experiment_id}/alpha={policy.label}", policy)
        if a <= 90:
            # obtuse chains are admissible for every alpha <= 90 degrees
            rec.es_len = es.length
            rec.trajectories["es"] = es.indices
        report = _run_solver(config, mode, policy, budget, config.meta.seed)
        _attach(rec, config, report)
        if report.optimal:
            for label, length in optimal_rows:
                if report.best_length > length:
                    rec.fail(f"length {report.best_length} at alpha={rec.alpha_deg} exceeds "
                             f"{length} at alpha={label}")
            optimal_rows.append((rec.alpha_deg, report.best_length))
            if rec.es_len is not None and rec.es_len > report.best_length:
                rec.fail("monotone trajectory longer than proved optimum")
        records.append(rec)
    return records


# --- suites ---------------------------------------------------------------

DEFAULT_SUITE = {
    "name": "default",
    "experiments": [
        {"id": "lower-random", "kind": "lower", "generator": "random", "n": [10, 25, 50],
         "seeds": {"start": 0, "count": 20}},
        {"id": "lower-collinear", "kind": "lower", "generator": "collinear", "n": [1, 2, 10],
         "solver": "exact"},
        {"id": "lower-grid", "kind": "lower", "generator": "grid", "n": [4, 9, 16], "solver": "exact"},
        {"id": "upper-nested", "kind": "upper", "m": [1, 2, 3, 4, 5], "budget": {"time_ms": 60000}},
        {"id": "oracle", "kind": "oracle", "n": [4, 5, 6, 7, 8], "seeds": {"start": 0, "count": 10}},
        {"id": "sweep", "kind": "sweep", "n": [6, 8], "seeds": {"start": 0, "count": 5},
         "alphas": [0, 30, 60, 90, 120, 150, 179]},
    ],
}


class SuiteError(ValueError):
    pass


def _seeds(block) -> list[int]:
    raw = block.get("seeds", [0])
    if isinstance(raw, dict):
        return list(range(int(raw.get("start", 0)), int(raw.get("start", 0)) + int(raw["count"])))
    if isinstance(raw, list) and all(isinstance(s, int) for s in raw):
        return raw
    raise SuiteError(f"{block.get('id')}: seeds must be a list of integers or {{start, count}}")


def _make_config(generator: str, n: int, seed: int) -> Configuration:
    if generator == "random":
        return generate_random(n, seed)
    if generator == "collinear":
        return generate_collinear(n)
    if generator == "grid":
        k = isqrt(n)
        if k * k != n:
            raise SuiteError(f"grid generator needs a square n, got {n}")
        return generate_grid(k)
    if generator == "nested":
        k = isqrt(n)
        return generate_nested_rings(k if k * k == n else k + 1, trim_to=n)
    raise SuiteError(f"unknown generator {generator!r}")


def _tasks(suite: dict) -> list[tuple]:
    """Expand a suite document into ``(sort_key, kind, kwargs)`` tasks."""
    blocks = suite.get("experiments")
    if not isinstance(blocks, list):
        raise SuiteError("suite: 'experiments' must be a list")
    tasks = []
    for b_index, block in enumerate(blocks):
        kind = block.get("kind")
        bid = block.get("id", f"block{b_index}")
        budget = block.get("budget") or {}
        budget = {"nodes": budget.get("nodes"), "time_ms": budget.get("time_ms")}
        if kind == "upper":
            for m in block.get("m", []):
                tasks.append(((b_index, m, 0), "upper",
                              {"m": m, "budget": budget, "mode": block.get("solver", "exact"),
                               "experiment_id": f"{bid}/m={m}"}))
            continue
        if kind not in ("lower", "oracle", "sweep"):
            raise SuiteError(f"{bid}: unknown experiment kind {kind!r}")
        generator = block.get("generator", "random")
        seeds = _seeds(block) if generator == "random" else [None]
        for n in block.get("n", []):
            for seed in seeds:
                eid = f"{bid}/n={n}" + (f"/seed={seed}" if seed is not None else "")
                kwargs = {"generator": generator, "n": n, "seed": seed, "experiment_id": eid,
                          "budget": budget}
                if kind == "lower":
                    kwargs["solver"] = block.get("solver")
                elif kind == "sweep":
                    kwargs["alphas"] = block.get("alphas", [30, 60, 90, 120, 150])
                elif kind == "oracle":
                    kwargs["alpha"] = block.get("alpha", 90)
                tasks.append(((b_index, n, -1 if seed is None else seed), kind, kwargs))
    return tasks


def _run_task(task) -> list[ExperimentRecord]:
    _, kind, kw = task
    budget = Budget(**kw["budget"])
    if kind == "upper":
        return [verify_upper_bound(kw["m"], budget, kw["mode"], kw["experiment_id"])]
    config = _make_config(kw["generator"], kw["n"], kw["seed"] if kw["seed"] is not None else 0)
    if kind == "lower":
        return [verify_lower_bound(config, kw["experiment_id"], kw["solver"], budget)]
    if kind == "oracle":
        return [oracle_equivalence(config, kw["experiment_id"], AnglePolicy.from_degrees(kw["alpha"]))]
    return alpha_sweep(config, kw["alphas"], budget, kw["experiment_id"])


@dataclass
class SuiteResult:
    name: str
    records: list[ExperimentRecord]

    @property
    def failures(self) -> list[ExperimentRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def csv_text(self, include_timing: bool = True) -> str:
        cols = [c for c in CSV_COLUMNS if include_timing or c not in TIMING_COLUMNS]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow(rec.row())
        return buf.getvalue()

    def summary(self) -> dict:
        blocks: dict[str, dict] = {}
        for rec in self.records:
            b = blocks.setdefault(rec.experiment_id.split("/")[0], {"rows": 0, "failures": 0})
            b["rows"] += 1
            b["failures"] += not rec.passed
        return {
            "suite": self.name,
            "rows": len(self.records),
            "failures": len(self.failures),
            "pass": self.ok,
            "blocks": blocks,
            "failed_ids": [{"experiment_id": r.experiment_id, "notes": r.notes} for r in self.failures],
        }


def run_suite(suite: Optional[dict] = None, jobs: int = 1) -> SuiteResult:
    suite = DEFAULT_SUITE if suite is None else suite
    tasks = sorted(_tasks(suite), key=lambda t: t[0])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    records = [r for chunk in chunks for r in chunk]
    return SuiteResult(suite.get("name", "suite"), records)


def load_suite(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SuiteError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SuiteError(f"{path}: suite document must be an object")
    return doc


def write_suite_reports(result: SuiteResult, out_dir) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    csv_path = atomic_write_text(out_dir / "report.csv", result.csv_text())
    summary_path = atomic_write_text(out_dir / "summary.json", dump_json(result.summary()))
    return csv_path, summary_path


def records_csv(records: Iterable[ExperimentRecord]) -> str:
    return SuiteResult("records", list(records)).csv_text()
