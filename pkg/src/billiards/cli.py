"""Command-line interface: ``billiards <subcommand> ...``.

Exit codes: 0 on success, 1 when a check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from ._io import atomic_write_text, dump_json
from .configuration import (ConfigurationError, config_ref, generate_collinear, generate_grid,
                            generate_nested_rings, generate_random, load_configuration,
                            save_configuration)
from .experiments import (SuiteError, alpha_sweep, load_suite, records_csv, run_suite,
                          verify_lower_bound, verify_upper_bound, write_suite_reports)
from .geometry import AnglePolicy
from .monotone import lower_bound, monotone_witness, trajectory_to_document
from .render import render_svg
from .solver import Budget, SolverError, Trajectory, solve, validate_trajectory


class InputError(click.ClickException):
    exit_code = 2


def _load(path):
    try:
        return load_configuration(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except ConfigurationError as exc:
        raise InputError(str(exc)) from None


def _budget(node_budget, time_budget_ms) -> Budget:
    try:
        return Budget(nodes=node_budget, time_ms=time_budget_ms)
    except SolverError as exc:
        raise InputError(str(exc)) from None


def _policy(alpha: float) -> AnglePolicy:
    try:
        return AnglePolicy.from_degrees(alpha)
    except ValueError as exc:
        raise InputError(f"--alpha: {exc}") from None


def _emit(doc, out):
    text = dump_json(doc)
    if out:
        atomic_write_text(out, text)
    else:
        click.echo(text, nl=False)


in_option = click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False),
                         help="Configuration document.")
out_option = click.option("--out", type=click.Path(dir_okay=False), default=None,
                          help="Output file (stdout when omitted).")
alpha_option = click.option("--alpha", type=float, default=90.0, show_default=True,
                            help="Lower turn angle in degrees; 90 uses the exact predicate.")
budget_options = [
    click.option("--node-budget", type=int, default=None, help="Node limit for exact search."),
    click.option("--time-budget-ms", type=int, default=None, help="Time limit for exact search."),
]
jobs_option = click.option("--jobs", type=int, default=1, show_default=True,
                           help="Worker processes.")


def with_budget(fn):
    for opt in reversed(budget_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Longest obtuse-turn trajectories through planar point sets."""


@main.command()
@click.option("--kind", type=click.Choice(["nested", "random", "collinear", "grid"]), required=True)
@click.option("--m", type=int, help="Ring count for nested configurations.")
@click.option("--a", "scale", default="auto", show_default=True,
              help="Ring scale factor (rational) or 'auto'.")
@click.option("--trim-to", type=int, default=None, help="Keep only this many nested points.")
@click.option("--n", type=int, help="Point count (random, collinear).")
@click.option("--k", type=int, help="Grid side length.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def generate(kind, m, scale, trim_to, n, k, seed, out):
    """Write a generated configuration document."""
    def need(value, flag):
        if value is None:
            raise click.UsageError(f"--kind {kind} requires {flag}")
        return value

    try:
        if kind == "nested":
            config = generate_nested_rings(need(m, "--m"), scale, trim_to=trim_to)
        elif kind == "random":
            config = generate_random(need(n, "--n"), seed)
        elif kind == "collinear":
            config = generate_collinear(need(n, "--n"))
        else:
            config = generate_grid(need(k, "--k"))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from None
    save_configuration(config, out)
    click.echo(f"wrote {len(config)} points to {out}", err=True)


@main.command("solve")
@in_option
@out_option
@click.option("--mode", type=click.Choice(["exact", "beam", "oracle"]), default="exact", show_default=True)
@alpha_option
@with_budget
@jobs_option
@click.option("--beam-width", type=int, default=64, show_default=True)
@click.option("--restarts", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def solve_cmd(in_path, out, mode, alpha, node_budget, time_budget_ms, jobs, beam_width, restarts, seed):
    """Find the longest admissible trajectory."""
    config = _load(in_path)
    policy = _policy(alpha)
    try:
        report = solve(config, mode, policy, _budget(node_budget, time_budget_ms), jobs,
                       beam_width, restarts, seed)
    except SolverError as exc:
        raise InputError(str(exc)) from None
    _emit(report.to_document(config), out)
    click.echo(f"{report.mode}: best_length={report.best_length} status={report.status}", err=True)
    if not validate_trajectory(config, report.best_indices, policy):
        raise click.ClickException("emitted trajectory failed validation")


@main.command()
@in_option
@out_option
def lowerbound(in_path, out):
    """Construct a monotone-chain trajectory meeting the lower bound."""
    config = _load(in_path)
    witness = monotone_witness(config)
    traj = Trajectory(witness.indices)
    _emit(trajectory_to_document(config, traj, witness), out)
    bound = lower_bound(len(config))
    ok = bool(validate_trajectory(config, traj.indices)) and traj.length >= bound
    click.echo(f"length={traj.length} bound={bound} {'PASS' if ok else 'FAIL'}", err=True)
    if not ok:
        raise SystemExit(1)


@main.command()
@click.option("--upper", "what", flag_value="upper", help="Check the nested-ring upper bound.")
@click.option("--lower", "what", flag_value="lower", help="Check the lower bound on --in.")
@click.option("--suite", "suite", default=None,
              help="Run a suite document, or 'default' for the built-in suite.")
@click.option("--m", type=int, default=None)
@click.option("--in", "in_path", type=click.Path(dir_okay=False), default=None)
@click.option("--out", type=click.Path(), default=None,
              help="CSV file, or directory for suite reports.")
@click.option("--mode", type=click.Choice(["exact", "beam"]), default="exact", show_default=True)
@with_budget
@jobs_option
def verify(what, suite, m, in_path, out, mode, node_budget, time_budget_ms, jobs):
    """Check the trajectory-length bounds; non-zero exit on any failure."""
    if suite is not None:
        try:
            doc = None if suite == "default" else load_suite(suite)
            result = run_suite(doc, jobs=jobs)
        except (SuiteError, FileNotFoundError) as exc:
            raise InputError(str(exc)) from None
        if out:
            csv_path, summary_path = write_suite_reports(result, out)
            click.echo(f"wrote {csv_path} and {summary_path}", err=True)
        else:
            click.echo(result.csv_text(), nl=False)
        summary = result.summary()
        click.echo(f"{summary['rows']} rows, {summary['failures']} failures", err=True)
        raise SystemExit(0 if result.ok else 1)
    budget = _budget(node_budget, time_budget_ms)
    if what == "upper":
        if m is None:
            raise click.UsageError("--upper requires --m")
        records = [verify_upper_bound(m, budget, mode, f"upper/m={m}", jobs)]
    elif what == "lower":
        if in_path is None:
            raise click.UsageError("--lower requires --in")
        records = [verify_lower_bound(_load(in_path), "lower")]
    else:
        raise click.UsageError("choose one of --upper, --lower or --suite")
    text = records_csv(records)
    if out:
        atomic_write_text(out, text)
    else:
        click.echo(text, nl=False)
    for rec in records:
        verdict = "PASS" if rec.passed else "FAIL"
        length = rec.solver_len if rec.solver_len is not None else rec.es_len
        click.echo(f"{rec.experiment_id}: length={length} bounds=[{rec.lower_bound}, "
                   f"{rec.upper_bound}] {verdict} {'; '.join(rec.notes)}".rstrip(), err=True)
    raise SystemExit(0 if all(r.passed for r in records) else 1)


@main.command("sweep-alpha")
@in_option
@out_option
@click.option("--alphas", default="30,60,90,120,150", show_default=True,
              help="Comma-separated ascending angles in degrees.")
@with_budget
def sweep_alpha(in_path, out, alphas, node_budget, time_budget_ms):
    """Solve under several lower turn angles and check monotonicity."""
    config = _load(in_path)
    try:
        values = [float(a) for a in alphas.split(",") if a.strip()]
        records = alpha_sweep(config, values, _budget(node_budget, time_budget_ms))
    except ValueError as exc:
        raise InputError(f"--alphas: {exc}") from None
    text = records_csv(records)
    if out:
        atomic_write_text(out, text)
    else:
        click.echo(text, nl=False)
    raise SystemExit(0 if all(r.passed for r in records) else 1)


def _trajectory_indices(path, config) -> list[int]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    key = "indices" if "indices" in doc else "best_indices"
    indices = doc.get(key)
    if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
        raise InputError(f"{path}: field '{key}' must be an array of integers")
    ref = doc.get("config_ref")
    if ref is not None and ref != config_ref(config):
        raise InputError(f"{path}: config_ref does not match the configuration")
    if any(not 0 <= i < len(config) for i in indices):
        raise InputError(f"{path}: field '{key}' references points outside the configuration")
    return indices


@main.command()
@in_option
@click.option("--trajectory", type=click.Path(dir_okay=False), default=None,
              help="Trajectory or solve-report document to draw.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def render(in_path, trajectory, out):
    """Draw a configuration (and optionally a trajectory) as SVG."""
    config = _load(in_path)
    indices = _trajectory_indices(trajectory, config) if trajectory else None
    atomic_write_text(out, render_svg(config, indices))
    click.echo(f"wrote {out}", err=True)


if __name__ == "__main__":
    main()
