import threading
import time
from collections import Counter

import pytest

from ..src.core.gen import Gen, gen_int, gen_list, shrink_int, shrink_list, shrink_nothing
from ..src.core.models import Config, ShrinkStrategy, SizeStrategy, Verdict
from ..src.core.prop import DISCARD
from ..src.core.rng import Seed
from ..src.runner.check import quick_check
from ..src.runner.parallel import BudgetCell, TesterState, assign_size, run_parallel, split_budget, steal_one
from ..src.runner.sequential import replay, run_sequential

INTS = gen_list(gen_int(0, 9))
SHRINK_INTS = lambda xs: shrink_list(xs, shrink_int)  # noqa: E731


def _tester(i: int, remaining: int) -> TesterState:
    return TesterState(index=i, seed=Seed.from_int(i), budget=BudgetCell(remaining))


def test_stride_sizes() -> None:
    cfg = Config(num_testers=2)
    assert [assign_size(0, p, 0, cfg) for p in range(3)] == [0, 2, 4]
    assert [assign_size(1, p, 0, cfg) for p in range(3)] == [1, 3, 5]


def test_offset_first_size_is_block_start() -> None:
    cfg = Config(num_testers=2, size_strategy=SizeStrategy.OFFSET)
    assert assign_size(1, 0, 0, cfg) == 50
    assert assign_size(0, 0, 0, cfg) == 0


def test_k1_assign_size_is_the_sequential_schedule() -> None:
    for strategy in SizeStrategy:
        cfg = Config(num_testers=1, size_strategy=strategy)
        assert [assign_size(0, p, 0, cfg) for p in range(100)] == list(range(100))


def test_tester_state_is_not_collected_as_a_test() -> None:
    assert TesterState.__test__ is False
    assert _tester(0, 3).budget.remaining == 3


def test_split_budget() -> None:
    assert split_budget(100, 2) == [50, 50]
    assert split_budget(10, 4) == [3, 3, 2, 2]


def test_steal_one_single_threaded() -> None:
    me = _tester(0, 0)
    empty = [me, _tester(1, 0), _tester(2, 0)]
    assert steal_one(me, empty) is False

    victim = _tester(2, 3)
    siblings = [me, _tester(1, 0), victim]
    assert steal_one(me, siblings) is True
    assert victim.budget.remaining == 2
    assert me.stolen_runs == 1


def test_two_testers_split_the_budget_evenly() -> None:
    cfg = Config(num_testers=2, steal_enabled=False, seed=Seed.from_int(1))
    report = run_parallel(lambda _: True, INTS, SHRINK_INTS, cfg)
    assert report.verdict is Verdict.SUCCESS
    assert report.per_tester_counts == [50, 50]
    assert report.tests_run == 100


@pytest.mark.parametrize("k", [1, 2, 4, 5])
def test_stride_covers_every_size_once(k: int) -> None:
    cfg = Config(num_testers=k, steal_enabled=False, seed=Seed.from_int(k))
    report = run_parallel(lambda _: True, INTS, SHRINK_INTS, cfg)
    assert Counter(report.sizes_used) == Counter(range(100))


def test_offset_covers_every_size_once() -> None:
    cfg = Config(num_testers=4, steal_enabled=False, size_strategy=SizeStrategy.OFFSET, seed=Seed.from_int(3))
    report = run_parallel(lambda _: True, INTS, SHRINK_INTS, cfg)
    assert Counter(report.sizes_used) == Counter(range(100))


def test_k1_matches_the_sequential_runner() -> None:
    for prop in (lambda _: True, lambda xs: sum(xs) < 15):
        cfg = Config(num_testers=1, seed=Seed.from_int(21))
        seq = run_sequential(prop, INTS, SHRINK_INTS, cfg)
        par = run_parallel(prop, INTS, SHRINK_INTS, cfg)
        assert par.verdict is seq.verdict
        assert par.sizes_used == seq.sizes_used
        assert par.tests_run == seq.tests_run
        assert par.final == seq.final


def test_stealing_conserves_the_budget() -> None:
    def prop(_: object) -> bool:
        if threading.current_thread().name == "parqc-tester-0":
            time.sleep(0.02)
        return True

    cfg = Config(num_testers=4, seed=Seed.from_int(5))
    report = run_parallel(prop, INTS, SHRINK_INTS, cfg)
    assert report.verdict is Verdict.SUCCESS
    assert report.tests_run == 100
    assert sum(report.per_tester_counts) == 100
    assert sum(report.stolen_runs) > 0
    assert report.per_tester_counts[0] < 25


def test_discards_do_not_consume_budget() -> None:
    calls = Counter()
    lock = threading.Lock()

    def prop(_: object) -> object:
        name = threading.current_thread().name
        with lock:
            calls[name] += 1
            n = calls[name]
        return DISCARD if n % 2 else True

    cfg = Config(num_testers=4, steal_enabled=False, seed=Seed.from_int(6))
    report = run_parallel(prop, INTS, SHRINK_INTS, cfg)
    assert report.verdict is Verdict.SUCCESS
    assert report.tests_run == 100
    assert report.discarded == 100


def test_global_discard_limit_gives_up() -> None:
    report = run_parallel(lambda _: DISCARD, INTS, SHRINK_INTS, Config(num_testers=4, seed=Seed.from_int(7)))
    assert report.verdict is Verdict.GAVE_UP
    assert report.discarded >= 1000
    assert report.tests_run == 0


@pytest.mark.parametrize("k", [2, 4, 8])
def test_failure_replays_to_the_same_counterexample(k: int) -> None:
    prop = lambda xs: sum(xs) < 25  # noqa: E731
    cfg = Config(num_testers=k, seed=Seed.from_int(100 + k))
    report = run_parallel(prop, INTS, SHRINK_INTS, cfg)
    assert report.verdict is Verdict.FAILURE
    failure = report.failure
    again = replay(prop, INTS, SHRINK_INTS, Config(replay=(Seed.parse(str(failure.seed)), failure.size)))
    assert again.failure.counterexample == failure.counterexample


def test_tester_crash_is_an_internal_error() -> None:
    def prop(_: object) -> bool:
        return True

    def crash(seed: Seed, size: int) -> int:
        if size > 10:
            raise RuntimeError("generator blew up")
        return size

    report = run_parallel(prop, Gen(crash), SHRINK_INTS, Config(num_testers=3, seed=Seed.from_int(8)))
    assert report.verdict is Verdict.INTERNAL_ERROR
    assert "generator blew up" in (report.error or "")


def test_quick_check_dispatch_with_parallel_shrinking() -> None:
    cfg = Config(num_testers=1, shrink_strategy=ShrinkStrategy.DETERMINISTIC, shrink_workers=4, seed=Seed.from_int(9))
    seq_cfg = Config(num_testers=1, seed=Seed.from_int(9))
    prop = lambda xs: len(xs) < 3  # noqa: E731
    det = quick_check(prop, INTS, SHRINK_INTS, cfg)
    seq = quick_check(prop, INTS, SHRINK_INTS, seq_cfg)
    assert det.verdict is Verdict.FAILURE
    assert det.final == seq.final == [0, 0, 0]


def test_every_test_gets_a_fresh_seed_across_testers() -> None:
    seen = []
    recording = Gen(lambda seed, size: seen.append(seed) or INTS.run(seed, size))
    cfg = Config(max_success=400, num_testers=4, seed=Seed.from_int(8))
    report = run_parallel(lambda _: True, recording, SHRINK_INTS, cfg)
    assert report.tests_run == 400
    assert len(seen) == 400
    assert len(set(seen)) == len(seen)


def test_no_tester_keeps_evaluating_after_the_abort() -> None:
    starts = []
    failed_at = []
    lock = threading.Lock()

    def prop(_: object) -> bool:
        name = threading.current_thread().name
        now = time.monotonic()
        with lock:
            starts.append((name, now))
            calls = sum(1 for n, _ in starts if n == name)
        if name == "parqc-tester-1" and calls == 20:
            failed_at.append(time.monotonic())
            return False
        time.sleep(0.001)
        return True

    cfg = Config(max_success=10_000, num_testers=4, seed=Seed.from_int(12), steal_enabled=False)
    report = run_parallel(prop, INTS, shrink_nothing, cfg)
    assert report.verdict is Verdict.FAILURE
    assert report.failure.tester == 1
    assert report.tests_run < 200
    late = Counter(name for name, at in starts if at > failed_at[0])
    # at most the evaluation a sibling had already been handed
    assert all(n <= 1 for n in late.values())
