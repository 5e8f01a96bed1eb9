from __future__ import annotations

import platform
from pathlib import Path
from typing import List, Optional

import psutil
import typer
from rich.console import Console
from rich.table import Table

from . import __version__
from .bench.cases import collect_failing_seeds, get_case
from .bench.harness import (
    expand_benchmarks,
    run_matrix,
    summarize,
    summary_path,
    summary_table,
    write_rows_csv,
    write_summary_csv,
)
from .core.models import Config, ParqcError, ShrinkStrategy, SizeStrategy, Verdict
from .core.report import RunStats, console_sink, render_run_report
from .core.rng import Seed
from .runner.check import quick_check
from .utils.config import get_settings
from .utils.log import setup_logging

app = typer.Typer(add_completion=False, help="""
Parallel property-based testing benchmarks.

Examples:
  parqc bench --bench constant --cores 1 --reps 5
  parqc bench --bench expr_bug --plant-bug --shrink det --cores 1,4 --csv out/expr.csv
  parqc replay --bench expr_bug --seed 123:4567 --size 42
""")
console = Console()


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG|INFO|WARNING|ERROR"),
    log_file: bool = typer.Option(False, "--log-file/--no-log-file", help="Also write logs under ./logs"),
) -> None:
    setup_logging((log_level or get_settings().log_level).upper(), log_file=log_file)


def _parse_cores(raw: str) -> List[int]:
    try:
        cores = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"Expected a comma-separated list of integers, got {raw!r}", param_hint="--cores")
    if not cores or any(c < 1 for c in cores):
        raise typer.BadParameter("Core counts must be positive", param_hint="--cores")
    return cores


def _parse_seed(raw: Optional[str], required: bool = False) -> Optional[Seed]:
    raw = raw or get_settings().seed
    if raw is None:
        if required:
            raise typer.BadParameter("A seed is required (or set PARQC_SEED)", param_hint="--seed")
        return None
    try:
        return Seed.parse(raw)
    except ParqcError as exc:
        raise typer.BadParameter(exc.message, param_hint="--seed")


def _benchmarks(name: str) -> List[str]:
    try:
        return expand_benchmarks(name)
    except ParqcError as exc:
        raise typer.BadParameter(f"{exc.message}. {exc.hint or ''}".strip(), param_hint="--bench")


@app.command(help="""
Run the benchmark matrix and print per-cell medians.

Every repetition uses its own seed, shared across core counts. With --plant-bug,
failing (seed, size) pairs are collected first so every strategy and core count
shrinks the same inputs.
""")
def bench(
    bench_name: str = typer.Option("all", "--bench", help="constant|slow_pure|expr_bug|effectful_tmp|all"),
    cores: str = typer.Option("1", "--cores", help="Comma-separated core counts, e.g. 1,2,4"),
    shrink: ShrinkStrategy = typer.Option(ShrinkStrategy.SEQUENTIAL, "--shrink", help="seq|det|greedy"),
    size: SizeStrategy = typer.Option(SizeStrategy.STRIDE, "--size", help="stride|offset"),
    reps: int = typer.Option(5, "--reps", min=1, help="Repetitions per cell"),
    seed: Optional[str] = typer.Option(None, "--seed", help="Root seed as state:gamma (default: PARQC_SEED)"),
    plant_bug: bool = typer.Option(False, "--plant-bug", help="Enable the planted bug and time find_bug/shrink"),
    max_success: int = typer.Option(100, "--max-success", min=1, help="Passing tests per run"),
    csv_path: Optional[Path] = typer.Option(None, "--csv", help="Write rows here and medians to <stem>_summary.csv"),
    chatty: bool = typer.Option(False, "--chatty", help="Print periodic progress lines"),
) -> None:
    names = _benchmarks(bench_name)
    core_counts = _parse_cores(cores)
    if max(core_counts) > max_success:
        raise typer.BadParameter("Core counts must not exceed --max-success", param_hint="--cores")
    settings = get_settings()
    root = _parse_seed(seed) or Seed.fresh()
    console.print(f"Seed: {root}", highlight=False)

    try:
        result = run_matrix(
            names,
            core_counts,
            shrink_strategy=shrink,
            size_strategy=size,
            reps=reps,
            seed=root,
            plant_bug=plant_bug,
            max_success=max_success,
            chatty=chatty or settings.chatty,
            progress_period_ms=settings.progress_period_ms,
            console=console,
        )
    except ParqcError as exc:
        console.print(f"[red]{exc.code.value}[/red] {exc.message}")
        if exc.hint:
            console.print(exc.hint)
        raise typer.Exit(1)

    summary = summarize(result.rows)
    console.print(summary_table(summary))
    if csv_path is not None:
        write_rows_csv(result.rows, csv_path)
        write_summary_csv(summary, summary_path(csv_path))
        console.print(f"Wrote {len(result.rows)} rows to {csv_path}")
    for err in result.errors:
        console.print(f"[red]Internal error[/red] {err}")
    if result.errors:
        raise typer.Exit(1)


@app.command()
def replay(
    bench_name: str = typer.Option(..., "--bench", help="constant|slow_pure|expr_bug|effectful_tmp"),
    seed: Optional[str] = typer.Option(None, "--seed", help="Recorded seed as state:gamma"),
    size: int = typer.Option(..., "--size", min=0, help="Recorded size"),
    plant_bug: bool = typer.Option(True, "--plant-bug/--no-plant-bug", help="Replay against the buggy variant"),
    shrink: ShrinkStrategy = typer.Option(ShrinkStrategy.SEQUENTIAL, "--shrink", help="seq|det|greedy"),
    cores: int = typer.Option(1, "--cores", min=1, help="Shrink workers"),
) -> None:
    """Re-run one recorded test and shrink it if it fails."""
    names = _benchmarks(bench_name)
    if len(names) != 1:
        raise typer.BadParameter("replay needs a single benchmark", param_hint="--bench")
    replay_seed = _parse_seed(seed, required=True)
    case = get_case(names[0], plant_bug)
    cfg = Config(shrink_strategy=shrink, shrink_workers=cores, replay=(replay_seed, size))
    report = quick_check(case.prop, case.gen, case.shrinker, cfg, RunStats(), console_sink(console))
    render_run_report(report, console, case.pretty)
    if report.verdict is Verdict.INTERNAL_ERROR:
        raise typer.Exit(1)


@app.command()
def seeds(
    bench_name: str = typer.Option("expr_bug", "--bench", help="slow_pure|expr_bug|effectful_tmp"),
    count: int = typer.Option(5, "-n", "--count", min=0, help="How many failing pairs to collect"),
    seed: Optional[str] = typer.Option(None, "--seed", help="Root seed as state:gamma (default: PARQC_SEED)"),
    timeout: float = typer.Option(60.0, "--timeout", help="Give up after this many seconds"),
) -> None:
    """List (seed, size) pairs that falsify the planted bug; feed them to `replay`."""
    names = _benchmarks(bench_name)
    if len(names) != 1:
        raise typer.BadParameter("seeds needs a single benchmark", param_hint="--bench")
    case = get_case(names[0], planted_bug=True)
    try:
        pairs = collect_failing_seeds(case, count, _parse_seed(seed), timeout_s=timeout)
    except ParqcError as exc:
        console.print(f"[red]{exc.code.value}[/red] {exc.message}")
        raise typer.Exit(1)
    for found, found_size in pairs:
        console.print(f"{found} {found_size}", highlight=False)


@app.command()
def version() -> None:
    """Show version."""
    console.print(f"parqc v{__version__}")


@app.command()
def doctor() -> None:
    """Report the cores available to testers."""
    physical = psutil.cpu_count(logical=False)
    logical = psutil.cpu_count(logical=True)
    table = Table(title="Environment")
    table.add_column("check")
    table.add_column("value", justify="right")
    table.add_row("python", platform.python_version())
    table.add_row("physical cores", str(physical or "unknown"))
    table.add_row("logical cores", str(logical or "unknown"))
    table.add_row("tmp root", get_settings().tmp_root or "(system temp)/parqc")
    console.print(table)
    if not physical or physical < 4:
        console.print("[yellow]WARN[/yellow] fewer than 4 physical cores; speedup numbers will be flat")
    else:
        console.print("Environment looks good.")


if __name__ == "__main__":
    app()
