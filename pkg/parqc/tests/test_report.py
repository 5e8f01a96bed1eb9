import threading
import time
from typing import List

import pytest
from rich.console import Console

from ..src.core.gen import gen_int, gen_list, shrink_int, shrink_list
from ..src.core.models import Config, FailureInfo, Phase, RunReport, ShrinkStrategy, Verdict
from ..src.core.prop import DISCARD
from ..src.core.report import (
    ProgressReporter,
    RunStats,
    format_status,
    render_run_report,
    run_progress_reporter,
    verdict_line,
)
from ..src.core.rng import Seed
from ..src.runner.check import quick_check

INTS = gen_list(gen_int(0, 9))
SHRINK_INTS = lambda xs: shrink_list(xs, shrink_int)  # noqa: E731


def test_run_stats_snapshot() -> None:
    stats = RunStats()
    stats.add_pass()
    stats.add_pass()
    stats.add_discard()
    stats.enter_shrinking()
    stats.add_shrink_step()
    snap = stats.snapshot()
    assert (snap.tests_passed, snap.tests_discarded, snap.shrink_steps) == (2, 1, 1)
    assert snap.phase is Phase.SHRINKING
    line = format_status(snap)
    assert "Shrinking: 2 passed, 1 discarded, 1 shrinks" in line


@pytest.mark.slow
def test_reporter_cadence_over_one_second() -> None:
    lines: List[str] = []
    stats = RunStats()
    reporter = run_progress_reporter(stats.snapshot, 200, lines.append)
    assert reporter is not None
    time.sleep(1.0)
    reporter.stop()
    assert 3 <= reporter.emitted <= 7
    assert len(lines) == reporter.emitted


def test_chatty_off_emits_nothing() -> None:
    lines: List[str] = []
    assert run_progress_reporter(RunStats().snapshot, 10, lines.append, chatty=False) is None
    time.sleep(0.05)
    assert lines == []


def test_failing_sink_disables_reporter() -> None:
    def sink(_: str) -> None:
        raise OSError("closed")

    with ProgressReporter(RunStats().snapshot, 10, sink) as reporter:
        time.sleep(0.1)
    assert reporter.disabled
    assert reporter.emitted == 0


def test_reporter_rejects_bad_period() -> None:
    with pytest.raises(ValueError):
        ProgressReporter(RunStats().snapshot, 0, lambda _: None)


def test_reporter_does_not_change_results() -> None:
    lines: List[str] = []
    lock = threading.Lock()

    def sink(line: str) -> None:
        with lock:
            lines.append(line)

    def prop(xs: list) -> bool:
        time.sleep(0.002)
        return sum(xs) < 30

    base = Config(seed=Seed.from_int(77), progress_period_ms=20)
    quiet = quick_check(prop, INTS, SHRINK_INTS, base)
    chatty = quick_check(prop, INTS, SHRINK_INTS, base.model_copy(update={"chatty": True}), sink=sink)
    assert quiet.verdict is chatty.verdict is Verdict.FAILURE
    assert quiet.failure.counterexample == chatty.failure.counterexample
    assert quiet.shrink.committed_path == chatty.shrink.committed_path
    assert lines


def test_render_failure_report() -> None:
    report = RunReport(
        verdict=Verdict.FAILURE,
        tests_run=4,
        failure=FailureInfo(seed=Seed(5, 7), size=3, counterexample=[1, 2], reason="Falsified"),
    )
    console = Console(record=True, width=120)
    lines = render_run_report(report, console)
    assert lines == [
        "*** Failed! Falsified (after 4 tests and 0 shrinks):",
        "[1, 2]",
        "Falsified",
        "Replay: 5:7 size 3",
    ]


def test_render_success_lists_testers_when_chatty() -> None:
    report = RunReport(verdict=Verdict.SUCCESS, tests_run=100, per_tester_counts=[50, 50])
    lines = render_run_report(report, Console(record=True), chatty=True)
    assert lines == ["+++ OK, passed 100 tests.", "tester 0: 50", "tester 1: 50"]


def test_verdict_lines() -> None:
    assert verdict_line(RunReport(verdict=Verdict.GAVE_UP, tests_run=3, discarded=1000)).startswith("*** Gave up!")
    assert "boom" in verdict_line(RunReport(verdict=Verdict.INTERNAL_ERROR, error="boom"))


@pytest.mark.slow
def test_snapshot_counters_never_decrease_under_load() -> None:
    stats = RunStats()
    snaps = []
    done = threading.Event()

    def poll() -> None:
        while not done.is_set():
            snaps.append(stats.snapshot())
            time.sleep(0.001)

    def prop(xs: list) -> object:
        time.sleep(0.0005)
        if xs and xs[0] == 0:
            return DISCARD
        return sum(xs) < 120

    poller = threading.Thread(target=poll)
    poller.start()
    try:
        for rep in range(5):
            cfg = Config(
                max_success=2000, num_testers=4, shrink_strategy=ShrinkStrategy.GREEDY, seed=Seed.from_int(300 + rep)
            )
            quick_check(prop, INTS, SHRINK_INTS, cfg, stats)
    finally:
        done.set()
        poller.join()

    assert len(snaps) > 10
    for before, after in zip(snaps, snaps[1:]):
        assert after.tests_passed >= before.tests_passed
        assert after.tests_discarded >= before.tests_discarded
        assert after.shrink_steps >= before.shrink_steps
