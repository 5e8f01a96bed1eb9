"""Periodic progress lines and final result rendering."""

from __future__ import annotations

import threading
import time
from typing import Any, Callable, List, Optional

from loguru import logger
from rich.console import Console

from ..utils.text_utils import format_reason
from .models import Phase, ProgressSnapshot, RunReport, Verdict

LineSink = Callable[[str], None]
SnapshotSource = Callable[[], ProgressSnapshot]


class RunStats:
    """Live counters of one run.

    Writers are the testers and shrink workers; each counter is a single int
    updated under its own lock, so readers may see a tuple torn across counters.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._passed = 0
        self._discarded = 0
        self._shrink_steps = 0
        self.phase = Phase.TESTING
        self.started = time.monotonic()

    def add_pass(self) -> None:
        with self._lock:
            self._passed += 1

    def add_discard(self) -> None:
        with self._lock:
            self._discarded += 1

    def add_shrink_step(self) -> None:
        with self._lock:
            self._shrink_steps += 1

    def enter_shrinking(self) -> None:
        self.phase = Phase.SHRINKING

    def snapshot(self) -> ProgressSnapshot:
        return ProgressSnapshot(
            tests_passed=self._passed,
            tests_discarded=self._discarded,
            phase=self.phase,
            shrink_steps=self._shrink_steps,
            elapsed_ms=int((time.monotonic() - self.started) * 1000),
        )


def format_status(snap: ProgressSnapshot) -> str:
    return (
        f"[{snap.elapsed_ms}ms] {snap.phase.value}: {snap.tests_passed} passed, "
        f"{snap.tests_discarded} discarded, {snap.shrink_steps} shrinks"
    )


class ProgressReporter:
    """Dedicated thread printing one status line per period."""

    def __init__(self, source: SnapshotSource, period_ms: int, sink: LineSink) -> None:
        if period_ms <= 0:
            raise ValueError("period_ms must be > 0")
        self._source = source
        self._period = period_ms / 1000.0
        self._sink = sink
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self.emitted = 0
        self.disabled = False

    def start(self) -> "ProgressReporter":
        self._thread = threading.Thread(target=self._loop, name="parqc-progress", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "ProgressReporter":
        return self.start()

    def __exit__(self, exc_type, exc, tb) -> None:  # type: ignore[no-untyped-def]
        self.stop()

    def _loop(self) -> None:
        while not self._stop.wait(self._period):
            try:
                self._sink(format_status(self._source()))
                self.emitted += 1
            except Exception as exc:
                self.disabled = True
                logger.warning(f"progress reporting disabled: {format_reason(exc)}")
                return


def run_progress_reporter(
    source: SnapshotSource,
    period_ms: int,
    sink: LineSink,
    chatty: bool = True,
) -> Optional[ProgressReporter]:
    """Start a reporter; ``None`` when ``chatty`` is off. Call ``stop()`` when the run ends."""
    if not chatty:
        return None
    return ProgressReporter(source, period_ms, sink).start()


def console_sink(console: Console) -> LineSink:
    lock = threading.Lock()

    def write(line: str) -> None:
        with lock:
            console.print(line, highlight=False, markup=False)

    return write


def verdict_line(report: RunReport) -> str:
    if report.verdict is Verdict.SUCCESS:
        return f"+++ OK, passed {report.tests_run} tests."
    if report.verdict is Verdict.GAVE_UP:
        return f"*** Gave up! Passed only {report.tests_run} tests; {report.discarded} discarded tests."
    if report.verdict is Verdict.FAILURE:
        shrinks = report.shrink.successful_shrinks if report.shrink else 0
        return f"*** Failed! Falsified (after {report.tests_run} tests and {shrinks} shrinks):"
    return f"*** Internal error: {report.error or 'unknown'}"


def render_run_report(
    report: RunReport,
    console: Console,
    pretty: Callable[[Any], str] = repr,
    chatty: bool = False,
) -> List[str]:
    """Print the final report; returns the printed lines."""
    lines = [verdict_line(report)]
    if report.verdict is Verdict.FAILURE and report.failure is not None:
        lines.append(pretty(report.final))
        if report.failure.reason:
            lines.append(report.failure.reason)
        lines.append(f"Replay: {report.failure.seed} size {report.failure.size}")
    if chatty and report.verdict is Verdict.SUCCESS:
        lines.extend(f"tester {i}: {n}" for i, n in enumerate(report.per_tester_counts))
    for line in lines:
        console.print(line, highlight=False, markup=False)
    return lines
