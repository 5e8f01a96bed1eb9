"""Parallel shrink strategies over a shared candidate board.

All board mutation happens under one condition variable; property
evaluations run outside it. A commit kills the current board, which cancels
the tokens of its running evaluations, and installs the board of the new
counterexample. Results that come back from a dead board are counted as
abandoned and never touch a live one.

Greedy commits whichever failure is reported first. Deterministic commits
index ``j`` only once every earlier index passed; while it waits, idle
workers speculate on the candidates of the lowest known failure, and that
speculation board is promoted on commit or dropped when an earlier failure
shows up.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from loguru import logger

from ..core.gen import Shrinker
from ..core.models import ErrorCode, ParqcError, ShrinkReport
from ..core.prop import CancellationToken, Outcome, TestAborted, evaluate
from ..core.report import RunStats
from ..utils.text_utils import format_reason


class Slot(str, Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    PASSED = "Passed"
    FAILED = "Failed"
    ABANDONED = "Abandoned"


class CandidateBoard:
    def __init__(self, owner: Any, candidates: List[Any], generation: int, anchor: Optional[int] = None) -> None:
        self.owner = owner
        self.candidates = candidates
        self.slots: List[Slot] = [Slot.PENDING] * len(candidates)
        self.tokens: Dict[int, CancellationToken] = {}
        self.cursor = 0
        self.running = 0
        self.generation = generation
        self.anchor = anchor
        self.alive = True

    def __len__(self) -> int:
        return len(self.candidates)

    def claim(self, limit: Optional[int] = None) -> Optional[int]:
        bound = len(self.candidates) if limit is None else min(limit, len(self.candidates))
        if self.cursor >= bound:
            return None
        idx = self.cursor
        self.cursor += 1
        self.slots[idx] = Slot.RUNNING
        self.tokens[idx] = CancellationToken()
        self.running += 1
        return idx

    def settle(self, idx: int, slot: Slot) -> None:
        self.slots[idx] = slot
        self.tokens.pop(idx, None)
        self.running -= 1

    def lowest_failure(self) -> Optional[int]:
        for i, slot in enumerate(self.slots):
            if slot is Slot.FAILED:
                return i
        return None

    def passed_before(self, j: int) -> bool:
        return all(slot is Slot.PASSED for slot in self.slots[:j])

    def exhausted(self) -> bool:
        return self.cursor >= len(self.candidates) and self.running == 0

    def cancel_after(self, j: int) -> None:
        for idx, token in self.tokens.items():
            if idx > j:
                token.cancel()

    def kill(self) -> None:
        self.alive = False
        for token in self.tokens.values():
            token.cancel()


@dataclass(frozen=True)
class _Job:
    board: CandidateBoard
    idx: int
    candidate: Any
    token: CancellationToken


class _ShrinkSearch:
    def __init__(
        self,
        prop: Callable[[Any], Any],
        shrinker: Shrinker[Any],
        c0: Any,
        stats: Optional[RunStats],
    ) -> None:
        self.prop = prop
        self.shrinker = shrinker
        self.stats = stats
        self.cond = threading.Condition()
        self.current = c0
        self.path: List[Any] = []
        self.evaluated = 0
        self.abandoned = 0
        self.generation = 0
        self.done = False
        self.error: Optional[str] = None
        self.board = CandidateBoard(c0, list(shrinker(c0)), 0)

    # -- hooks, called with the lock held --

    def next_job(self) -> Optional[_Job]:
        raise NotImplementedError

    def on_result(self, job: _Job, outcome: Outcome) -> None:
        raise NotImplementedError

    # -- shared machinery --

    def _job(self, board: CandidateBoard, idx: int) -> _Job:
        return _Job(board, idx, board.candidates[idx], board.tokens[idx])

    def _commit(self, candidate: Any, successor: Optional[CandidateBoard] = None) -> None:
        self.board.kill()
        self.generation += 1
        self.current = candidate
        self.path.append(candidate)
        if self.stats is not None:
            self.stats.add_shrink_step()
        if successor is None:
            successor = CandidateBoard(candidate, list(self.shrinker(candidate)), self.generation)
        successor.generation = self.generation
        successor.anchor = None
        self.board = successor

    def _finish(self) -> None:
        self.done = True
        self.cond.notify_all()

    def _report(self, job: _Job, outcome: Optional[Outcome]) -> None:
        board = job.board
        if not board.alive:
            self.abandoned += 1
            return
        if outcome is None:
            if not job.token.is_cancelled:
                self.error = "shrink evaluation raised the runtime abort signal on its own"
                self._finish()
                return
            board.settle(job.idx, Slot.ABANDONED)
            self.abandoned += 1
            return
        board.settle(job.idx, Slot.FAILED if outcome.failed else Slot.PASSED)
        self.evaluated += 1
        self.on_result(job, outcome)

    def _worker(self) -> None:
        try:
            while True:
                with self.cond:
                    job = self.next_job()
                    if job is None:
                        return
                try:
                    outcome: Optional[Outcome] = evaluate(self.prop, job.candidate, job.token)
                except TestAborted:
                    outcome = None
                with self.cond:
                    self._report(job, outcome)
                    self.cond.notify_all()
        except BaseException as exc:  # noqa: BLE001 (a crashed worker fails the search)
            with self.cond:
                self.error = f"shrink worker crashed: {format_reason(exc)}"
                self._finish()

    def run(self, workers: int) -> ShrinkReport:
        if workers < 1:
            raise ValueError("workers must be >= 1")
        threads = [
            threading.Thread(target=self._worker, name=f"parqc-shrink-{i}", daemon=True) for i in range(workers)
        ]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        if self.error is not None:
            raise ParqcError(code=ErrorCode.INTERNAL, message=self.error)
        logger.debug(
            f"{type(self).__name__} done: {len(self.path)} shrinks, {self.evaluated} evaluated, "
            f"{self.abandoned} abandoned"
        )
        return ShrinkReport(
            final=self.current,
            successful_shrinks=len(self.path),
            candidates_evaluated=self.evaluated,
            abandoned_evaluations=self.abandoned,
            committed_path=list(self.path),
        )


class _GreedySearch(_ShrinkSearch):
    def next_job(self) -> Optional[_Job]:
        while True:
            if self.done:
                return None
            idx = self.board.claim()
            if idx is not None:
                return self._job(self.board, idx)
            if self.board.exhausted():
                self._finish()
                return None
            self.cond.wait()

    def on_result(self, job: _Job, outcome: Outcome) -> None:
        if outcome.failed:
            self._commit(job.candidate)


class _DeterministicSearch(_ShrinkSearch):
    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.speculation: Optional[CandidateBoard] = None

    def _drop_speculation(self) -> None:
        if self.speculation is not None:
            self.speculation.kill()
            self.speculation = None

    def next_job(self) -> Optional[_Job]:
        while True:
            if self.done:
                return None
            main = self.board
            j = main.lowest_failure()
            idx = main.claim(limit=j)
            if idx is not None:
                return self._job(main, idx)
            if j is None:
                if main.exhausted():
                    self._finish()
                    return None
            else:
                if self.speculation is None or self.speculation.anchor != j:
                    self._drop_speculation()
                    owner = main.candidates[j]
                    self.speculation = CandidateBoard(owner, list(self.shrinker(owner)), self.generation, anchor=j)
                idx = self.speculation.claim()
                if idx is not None:
                    return self._job(self.speculation, idx)
            self.cond.wait()

    def on_result(self, job: _Job, outcome: Outcome) -> None:
        if job.board is not self.board:
            # speculative result; kept on the speculation board until promoted or dropped
            return
        if outcome.failed and self.board.lowest_failure() == job.idx:
            if self.speculation is not None and self.speculation.anchor != job.idx:
                self._drop_speculation()
            self.board.cancel_after(job.idx)
        self._try_commit()

    def _try_commit(self) -> None:
        while True:
            main = self.board
            j = main.lowest_failure()
            if j is None or not main.passed_before(j):
                return
            successor = None
            if self.speculation is not None and self.speculation.anchor == j:
                successor = self.speculation
            else:
                self._drop_speculation()
            self.speculation = None
            self._commit(main.candidates[j], successor)


def shrink_greedy(
    prop: Callable[[Any], Any],
    shrinker: Shrinker[Any],
    c0: Any,
    workers: int,
    stats: Optional[RunStats] = None,
) -> ShrinkReport:
    return _GreedySearch(prop, shrinker, c0, stats).run(workers)


def shrink_deterministic(
    prop: Callable[[Any], Any],
    shrinker: Shrinker[Any],
    c0: Any,
    workers: int,
    stats: Optional[RunStats] = None,
) -> ShrinkReport:
    return _DeterministicSearch(prop, shrinker, c0, stats).run(workers)
