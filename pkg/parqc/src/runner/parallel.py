"""Parallel test loop.

The coordinator splits the test budget between ``k`` testers, starts one
thread per tester and sleeps until every tester has returned. A tester runs
the sequential per-test step with its private seed; when its own budget is
exhausted it may steal single tests from siblings. The first failing tester
publishes an :class:`AbortSignal` and cancels the shared token; in-flight
evaluations observe the token at :func:`~..core.prop.checkpoint` and
:func:`~..core.prop.graceful` boundaries.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Any, List, Optional

from loguru import logger

from ..core.gen import Gen, Shrinker
from ..core.models import Config, FailureInfo, RunReport, SizeStrategy, Verdict
from ..core.prop import CancellationToken, TestAborted, evaluate
from ..core.report import RunStats
from ..core.rng import Seed, split, split_n
from ..utils.log import log_run_end, log_run_start
from ..utils.text_utils import format_reason
from .sequential import PropertyFn, compute_size, conclude_failure, replay


class BudgetCell:
    """Remaining tests of one tester; decremented by its owner or a thief."""

    def __init__(self, remaining: int) -> None:
        self._lock = threading.Lock()
        self._remaining = remaining

    @property
    def remaining(self) -> int:
        return self._remaining

    def try_take(self) -> bool:
        with self._lock:
            if self._remaining <= 0:
                return False
            self._remaining -= 1
            return True

    def give_back(self) -> None:
        with self._lock:
            self._remaining += 1


@dataclass
class TesterState:
    __test__ = False

    index: int
    seed: Seed
    budget: BudgetCell
    block_start: int = 0
    local_passed: int = 0
    local_discards_since_pass: int = 0
    stolen_runs: int = 0
    count: int = 0
    sizes: List[int] = field(default_factory=list)


@dataclass(frozen=True)
class AbortSignal:
    origin: int
    seed: Seed
    size: int
    counterexample: Any
    reason: str


class AbortCell:
    """Single-assignment cell; the first writer wins."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._signal: Optional[AbortSignal] = None

    @property
    def signal(self) -> Optional[AbortSignal]:
        return self._signal

    def try_commit(self, signal: AbortSignal) -> bool:
        with self._lock:
            if self._signal is not None:
                return False
            self._signal = signal
            return True


def split_budget(total: int, k: int) -> List[int]:
    """Even split; the first ``total % k`` testers get one extra test."""
    base, extra = divmod(total, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def assign_size(
    i: int,
    local_passed: int,
    local_discards: int,
    cfg: Config,
    block_start: Optional[int] = None,
) -> int:
    k = cfg.num_testers
    if cfg.size_strategy is SizeStrategy.STRIDE:
        effective = i + local_passed * k
    else:
        start = block_start if block_start is not None else i * (cfg.max_success // k)
        effective = start + local_passed
    return compute_size(effective, local_discards, cfg)


def steal_one(me: TesterState, siblings: List[TesterState]) -> bool:
    """Take one test from the first sibling with budget left, scanning from ``me.index + 1``."""
    k = len(siblings)
    for step in range(1, k):
        victim = siblings[(me.index + step) % k]
        if victim.budget.try_take():
            me.stolen_runs += 1
            return True
    return False


class _ParallelRun:
    def __init__(self, prop: PropertyFn, gen: Gen[Any], cfg: Config, testers: List[TesterState], stats: RunStats):
        self.prop = prop
        self.gen = gen
        self.cfg = cfg
        self.testers = testers
        self.stats = stats
        self.token = CancellationToken()
        self.abort = AbortCell()
        self.gave_up = False
        self.crash: Optional[str] = None
        self._discard_lock = threading.Lock()
        self.total_discards = 0

    def _add_discard(self) -> bool:
        with self._discard_lock:
            self.total_discards += 1
            if self.total_discards >= self.cfg.discard_limit:
                self.gave_up = True
                self.token.cancel()
                return True
        return False

    def tester_loop(self, me: TesterState) -> None:
        cfg = self.cfg
        try:
            while not self.token.is_cancelled:
                if not me.budget.try_take():
                    if not (cfg.steal_enabled and steal_one(me, self.testers)):
                        return
                size = assign_size(me.index, me.local_passed, me.local_discards_since_pass, cfg, me.block_start)
                me.seed, test_seed = split(me.seed)
                value = self.gen.run(test_seed, size)
                if self.token.is_cancelled:
                    return
                try:
                    outcome = evaluate(self.prop, value, self.token)
                except TestAborted:
                    return
                if self.token.is_cancelled:
                    return

                if outcome.passed:
                    me.local_passed += 1
                    me.local_discards_since_pass = 0
                    me.count += 1
                    me.sizes.append(size)
                    self.stats.add_pass()
                elif outcome.discarded:
                    me.local_discards_since_pass += 1
                    me.budget.give_back()
                    self.stats.add_discard()
                    if self._add_discard():
                        return
                else:
                    signal = AbortSignal(me.index, test_seed, size, value, outcome.reason)
                    if self.abort.try_commit(signal):
                        me.count += 1
                        me.sizes.append(size)
                        logger.info(f"Tester {me.index} found a counterexample at size={size}; aborting siblings")
                    self.token.cancel()
                    return
        except BaseException as exc:  # noqa: BLE001 (tester crash ends the run)
            self.crash = f"tester {me.index} crashed: {format_reason(exc)}"
            self.token.cancel()


def run_parallel(
    prop: PropertyFn,
    gen: Gen[Any],
    shrinker: Shrinker[Any],
    cfg: Config,
    stats: Optional[RunStats] = None,
) -> RunReport:
    if cfg.replay is not None:
        return replay(prop, gen, shrinker, cfg, stats)
    stats = stats or RunStats()
    k = cfg.num_testers
    root = cfg.seed or Seed.fresh()
    name = getattr(prop, "__name__", repr(prop))
    log_run_start(name, "parallel", k, root)

    seeds = [root] if k == 1 else split_n(root, k)
    budgets = split_budget(cfg.max_success, k)
    testers: List[TesterState] = []
    start = 0
    for i in range(k):
        testers.append(TesterState(index=i, seed=seeds[i], budget=BudgetCell(budgets[i]), block_start=start))
        start += budgets[i]

    run = _ParallelRun(prop, gen, cfg, testers, stats)
    started = time.monotonic()
    threads = [
        threading.Thread(target=run.tester_loop, args=(t,), name=f"parqc-tester-{t.index}", daemon=True)
        for t in testers
    ]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    test_ms = (time.monotonic() - started) * 1000.0

    counts = [t.count for t in testers]
    report = RunReport(
        verdict=Verdict.SUCCESS,
        tests_run=sum(counts),
        discarded=run.total_discards,
        per_tester_counts=counts,
        stolen_runs=[t.stolen_runs for t in testers],
        sizes_used=[s for t in testers for s in t.sizes],
        test_ms=test_ms,
    )

    signal = run.abort.signal
    if run.crash is not None:
        report.verdict = Verdict.INTERNAL_ERROR
        report.error = run.crash
    elif signal is not None:
        failure = FailureInfo(
            seed=signal.seed,
            size=signal.size,
            counterexample=signal.counterexample,
            reason=signal.reason,
            tester=signal.origin,
        )
        conclude_failure(prop, shrinker, cfg, failure, report, stats)
    elif run.gave_up:
        report.verdict = Verdict.GAVE_UP
    log_run_end(name, report.verdict.value, report.tests_run, report.error or (signal.reason if signal else None))
    return report
