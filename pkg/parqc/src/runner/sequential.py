"""Sequential test loop: the reference behavior for every parallel mode."""

from __future__ import annotations

import time
from typing import Any, Callable, List, Optional

from loguru import logger

from ..core.gen import Gen, Shrinker
from ..core.models import Config, ErrorCode, FailureInfo, ParqcError, RunReport, Verdict
from ..core.prop import evaluate
from ..core.report import RunStats
from ..core.rng import Seed, split
from ..shrink.strategy import run_shrink
from ..utils.log import log_run_end, log_run_start
from ..utils.text_utils import format_reason

PropertyFn = Callable[[Any], Any]


def compute_size(passed: int, discards_since_last_pass: int, cfg: Config) -> int:
    """Size for the next test; grows with passes, bumped by 1 per 10 consecutive discards."""
    grown = passed * cfg.max_size // cfg.max_success + discards_since_last_pass // 10
    return min(cfg.max_size - 1, grown)


def _elapsed_ms(started: float) -> float:
    return (time.monotonic() - started) * 1000.0


def conclude_failure(
    prop: PropertyFn,
    shrinker: Shrinker[Any],
    cfg: Config,
    failure: FailureInfo,
    report: RunReport,
    stats: RunStats,
) -> RunReport:
    """Shrink the published counterexample and fill the failure fields of ``report``."""
    report.verdict = Verdict.FAILURE
    report.failure = failure
    stats.enter_shrinking()
    started = time.monotonic()
    try:
        report.shrink = run_shrink(prop, shrinker, failure.counterexample, cfg.shrink_strategy, cfg.workers, stats)
    except ParqcError as exc:
        report.verdict = Verdict.INTERNAL_ERROR
        report.error = exc.message
    report.shrink_ms = _elapsed_ms(started)
    return report


def run_sequential(
    prop: PropertyFn,
    gen: Gen[Any],
    shrinker: Shrinker[Any],
    cfg: Config,
    stats: Optional[RunStats] = None,
) -> RunReport:
    if cfg.replay is not None:
        return replay(prop, gen, shrinker, cfg, stats)
    stats = stats or RunStats()
    seed = cfg.seed or Seed.fresh()
    name = getattr(prop, "__name__", repr(prop))
    log_run_start(name, "sequential", 1, seed)

    passed = discards_since_pass = total_discards = 0
    sizes: List[int] = []
    report = RunReport(verdict=Verdict.SUCCESS, per_tester_counts=[0], stolen_runs=[0])
    started = time.monotonic()

    while passed < cfg.max_success:
        size = compute_size(passed, discards_since_pass, cfg)
        seed, test_seed = split(seed)
        try:
            value = gen.run(test_seed, size)
        except Exception as exc:
            report.verdict = Verdict.INTERNAL_ERROR
            report.error = f"generator crashed: {format_reason(exc)}"
            break
        outcome = evaluate(prop, value)

        if outcome.passed:
            passed += 1
            discards_since_pass = 0
            sizes.append(size)
            stats.add_pass()
        elif outcome.discarded:
            discards_since_pass += 1
            total_discards += 1
            stats.add_discard()
            if total_discards >= cfg.discard_limit:
                report.verdict = Verdict.GAVE_UP
                break
        else:
            sizes.append(size)
            report.tests_run = passed + 1
            report.per_tester_counts = [passed + 1]
            report.discarded = total_discards
            report.sizes_used = sizes
            report.test_ms = _elapsed_ms(started)
            logger.info(f"Counterexample found at size={size} seed={test_seed}")
            failure = FailureInfo(seed=test_seed, size=size, counterexample=value, reason=outcome.reason)
            conclude_failure(prop, shrinker, cfg, failure, report, stats)
            log_run_end(name, report.verdict.value, report.tests_run, outcome.reason)
            return report

    report.tests_run = passed
    report.per_tester_counts = [passed]
    report.discarded = total_discards
    report.sizes_used = sizes
    report.test_ms = _elapsed_ms(started)
    log_run_end(name, report.verdict.value, passed, report.error)
    return report


def replay(
    prop: PropertyFn,
    gen: Gen[Any],
    shrinker: Shrinker[Any],
    cfg: Config,
    stats: Optional[RunStats] = None,
) -> RunReport:
    """Run exactly one test from the recorded ``(seed, size)`` pair."""
    if cfg.replay is None:
        raise ParqcError(code=ErrorCode.INVALID_CONFIG, message="replay requested without a (seed, size) pair")
    stats = stats or RunStats()
    seed, size = cfg.replay
    started = time.monotonic()
    report = RunReport(verdict=Verdict.SUCCESS, per_tester_counts=[0], stolen_runs=[0], sizes_used=[size])
    try:
        value = gen.run(seed, size)
    except Exception as exc:
        report.verdict = Verdict.INTERNAL_ERROR
        report.error = f"generator crashed: {format_reason(exc)}"
        report.sizes_used = []
        return report
    outcome = evaluate(prop, value)

    if outcome.passed:
        stats.add_pass()
        report.tests_run = 1
        report.per_tester_counts = [1]
    elif outcome.discarded:
        stats.add_discard()
        report.verdict = Verdict.GAVE_UP
        report.discarded = 1
        report.sizes_used = []
    else:
        report.tests_run = 1
        report.per_tester_counts = [1]
        report.test_ms = _elapsed_ms(started)
        failure = FailureInfo(seed=seed, size=size, counterexample=value, reason=outcome.reason)
        return conclude_failure(prop, shrinker, cfg, failure, report, stats)
    report.test_ms = _elapsed_ms(started)
    return report
