from __future__ import annotations

import csv
import hashlib
import statistics
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from ..core.gen import shrink_nothing
from ..core.models import Config, ErrorCode, ParqcError, RunReport, ShrinkStrategy, SizeStrategy, Verdict
from ..core.report import RunStats, console_sink
from ..core.rng import Seed, split_n
from ..runner.check import quick_check
from .cases import BENCHMARKS, BenchCase, collect_failing_seeds, get_case

CSV_FIELDS = (
    "benchmark",
    "cores",
    "size_strategy",
    "shrink_strategy",
    "repetition",
    "phase",
    "wall_ms",
    "tests_run",
    "shrink_steps",
    "candidates_evaluated",
    "abandoned",
    "efficiency",
    "result_size",
)

SUMMARY_FIELDS = ("benchmark", "cores", "size_strategy", "shrink_strategy", "phase", "reps", "median_wall_ms")


class BenchRow(BaseModel):
    benchmark: str
    cores: int
    size_strategy: str
    shrink_strategy: str
    repetition: int
    phase: str
    wall_ms: float
    tests_run: Optional[int] = None
    shrink_steps: Optional[int] = None
    candidates_evaluated: Optional[int] = None
    abandoned: Optional[int] = None
    efficiency: Optional[float] = None
    result_size: Optional[int] = None
    final_digest: Optional[str] = Field(default=None, exclude=True)

    def csv_values(self) -> List[str]:
        data = self.model_dump()
        return ["" if data[name] is None else str(data[name]) for name in CSV_FIELDS]


class BenchResult(BaseModel):
    rows: List[BenchRow] = Field(default_factory=list)
    errors: List[str] = Field(default_factory=list)


def median(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("median of an empty sequence")
    return float(statistics.median(values))


def final_digest(case: BenchCase, report: RunReport) -> str:
    return hashlib.sha256(case.pretty(report.final).encode("utf-8")).hexdigest()[:16]


def _base_row(case: BenchCase, cfg: Config, rep: int, phase: str) -> dict:
    return {
        "benchmark": case.name,
        "cores": cfg.num_testers,
        "size_strategy": cfg.size_strategy.value,
        "shrink_strategy": cfg.shrink_strategy.value,
        "repetition": rep,
        "phase": phase,
    }


def _test_row(case: BenchCase, cfg: Config, rep: int, phase: str, report: RunReport) -> BenchRow:
    return BenchRow(**_base_row(case, cfg, rep, phase), wall_ms=round(report.test_ms, 3), tests_run=report.tests_run)


def _shrink_row(case: BenchCase, cfg: Config, rep: int, report: RunReport) -> BenchRow:
    shrink = report.shrink
    eff = shrink.efficiency if shrink is not None else None
    return BenchRow(
        **_base_row(case, cfg, rep, "shrink"),
        wall_ms=round(report.shrink_ms, 3),
        shrink_steps=shrink.successful_shrinks if shrink else None,
        candidates_evaluated=shrink.candidates_evaluated if shrink else None,
        abandoned=shrink.abandoned_evaluations if shrink else None,
        efficiency=round(float(eff), 6) if eff is not None else None,
        result_size=case.size_of(report.final) if report.failure is not None else None,
        final_digest=final_digest(case, report) if report.failure is not None else None,
    )


def run_matrix(
    benchmarks: Iterable[str],
    cores: Sequence[int],
    shrink_strategy: ShrinkStrategy = ShrinkStrategy.SEQUENTIAL,
    size_strategy: SizeStrategy = SizeStrategy.STRIDE,
    reps: int = 5,
    seed: Optional[Seed] = None,
    plant_bug: bool = False,
    max_success: int = 100,
    chatty: bool = False,
    progress_period_ms: int = 200,
    console: Optional[Console] = None,
    tmp_root: Optional[Path] = None,
    on_row: Optional[Callable[[BenchRow], None]] = None,
) -> BenchResult:
    """Run every (benchmark, cores, repetition) cell; one repetition seed per rep, shared by all core counts."""
    root = seed or Seed.fresh()
    rep_seeds = split_n(root, reps)
    sink = console_sink(console) if (chatty and console is not None) else None
    result = BenchResult()

    def emit(row: BenchRow) -> None:
        result.rows.append(row)
        if on_row is not None:
            on_row(row)

    def note(report: RunReport, where: str) -> None:
        if report.verdict is Verdict.INTERNAL_ERROR:
            msg = f"{where}: {report.error}"
            logger.error(msg)
            result.errors.append(msg)

    for name in benchmarks:
        case = get_case(name, plant_bug, tmp_root)
        failing: Optional[List[Tuple[Seed, int]]] = None
        if plant_bug and case.has_bug:
            failing = collect_failing_seeds(case, reps, root, max_size=100)
        elif plant_bug:
            logger.warning(f"{name} has no bug to plant; timing the test loop only")
        logger.info(f"bench {name}: cores={list(cores)} reps={reps} seed={root}")

        for k in cores:
            for rep in range(reps):
                cfg = Config(
                    max_success=max_success,
                    num_testers=k,
                    size_strategy=size_strategy,
                    shrink_strategy=shrink_strategy,
                    shrink_workers=k,
                    seed=rep_seeds[rep],
                    chatty=chatty,
                    progress_period_ms=progress_period_ms,
                )
                where = f"{name} cores={k} rep={rep}"
                if failing is None:
                    report = quick_check(case.prop, case.gen, case.shrinker, cfg, RunStats(), sink)
                    note(report, where)
                    emit(_test_row(case, cfg, rep, "test", report))
                    continue

                # find_bug times the test loop only; shrinking happens on the collected pair below
                report = quick_check(case.prop, case.gen, shrink_nothing, cfg, RunStats(), sink)
                note(report, where)
                emit(_test_row(case, cfg, rep, "find_bug", report))

                replay_cfg = cfg.model_copy(update={"replay": failing[rep]})
                report = quick_check(case.prop, case.gen, case.shrinker, replay_cfg, RunStats(), sink)
                note(report, where)
                emit(_shrink_row(case, cfg, rep, report))
    return result


def summarize(rows: Iterable[BenchRow]) -> List[dict]:
    """Median wall time per (benchmark, cores, size_strategy, shrink_strategy, phase)."""
    groups: Dict[Tuple[str, int, str, str, str], List[float]] = {}
    for row in rows:
        key = (row.benchmark, row.cores, row.size_strategy, row.shrink_strategy, row.phase)
        groups.setdefault(key, []).append(row.wall_ms)
    summary = []
    for key, walls in groups.items():
        benchmark, cores, size_strategy, shrink_strategy, phase = key
        summary.append(
            {
                "benchmark": benchmark,
                "cores": cores,
                "size_strategy": size_strategy,
                "shrink_strategy": shrink_strategy,
                "phase": phase,
                "reps": len(walls),
                "median_wall_ms": round(median(walls), 3),
            }
        )
    return summary


def write_rows_csv(rows: Iterable[BenchRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for row in rows:
            writer.writerow(row.csv_values())


def write_summary_csv(summary: Iterable[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        writer.writerows(summary)


def summary_path(csv_path: Path) -> Path:
    return csv_path.with_name(f"{csv_path.stem}_summary.csv")


def summary_table(summary: Iterable[dict]) -> Table:
    table = Table(title="Median wall time")
    for name in SUMMARY_FIELDS:
        table.add_column(name, justify="right" if name in ("cores", "reps", "median_wall_ms") else "left")
    for item in summary:
        table.add_row(*(str(item[name]) for name in SUMMARY_FIELDS))
    return table


def expand_benchmarks(name: str) -> List[str]:
    if name == "all":
        return list(BENCHMARKS)
    if name not in BENCHMARKS:
        raise ParqcError(
            code=ErrorCode.UNKNOWN_BENCHMARK,
            message=f"Unknown benchmark: {name}",
            hint=f"Choose one of: {', '.join(BENCHMARKS)} or 'all'",
        )
    return [name]
