from typing import List

import pytest

from ..src.core.gen import Gen, gen_int, gen_list, shrink_int, shrink_list
from ..src.core.models import Config, Verdict
from ..src.core.prop import DISCARD, fail
from ..src.core.rng import Seed
from ..src.runner.check import quick_check
from ..src.runner.sequential import compute_size, replay, run_sequential

INTS = gen_list(gen_int(0, 9))
SHRINK_INTS = lambda xs: shrink_list(xs, shrink_int)  # noqa: E731


@pytest.mark.parametrize(
    "passed,discards,expected",
    [(0, 0, 0), (99, 0, 99), (10, 25, 12), (50, 0, 50), (99, 30, 99)],
)
def test_compute_size(passed: int, discards: int, expected: int) -> None:
    assert compute_size(passed, discards, Config()) == expected


def test_constant_true_passes_with_every_size() -> None:
    report = run_sequential(lambda _: True, INTS, SHRINK_INTS, Config(seed=Seed.from_int(1)))
    assert report.verdict is Verdict.SUCCESS
    assert report.tests_run == 100
    assert sorted(report.sizes_used) == list(range(100))


def test_always_discard_gives_up_at_the_limit() -> None:
    report = run_sequential(lambda _: DISCARD, INTS, SHRINK_INTS, Config(seed=Seed.from_int(2)))
    assert report.verdict is Verdict.GAVE_UP
    assert report.discarded == 1000
    assert report.tests_run == 0


def test_nonempty_lists_fail_and_shrink_to_length_one() -> None:
    report = run_sequential(lambda xs: len(xs) < 1, INTS, SHRINK_INTS, Config(seed=Seed.from_int(3)))
    assert report.verdict is Verdict.FAILURE
    assert report.final == [0]
    assert report.tests_run == len(report.sizes_used)
    assert report.shrink is not None and report.shrink.final == [0]


def test_discards_below_ten_leave_the_size_schedule_unchanged() -> None:
    for gap in range(10):
        calls: List[int] = [0]

        def prop(_: object) -> object:
            calls[0] += 1
            if calls[0] % (gap + 1) != 0:
                return DISCARD
            return True

        report = run_sequential(prop, INTS, SHRINK_INTS, Config(seed=Seed.from_int(4)))
        assert report.verdict is Verdict.SUCCESS, gap
        assert report.sizes_used == list(range(100)), gap


def test_tenth_consecutive_discard_bumps_size_by_one() -> None:
    seen: List[int] = []
    calls = [0]

    def prop(xs: list) -> object:
        calls[0] += 1
        if calls[0] <= 10:
            return DISCARD
        return True

    def record(seed: Seed, size: int) -> list:
        seen.append(size)
        return []

    report = run_sequential(prop, Gen(record), SHRINK_INTS, Config(seed=Seed.from_int(5)))
    assert seen[:11] == [0] * 10 + [1]
    assert report.sizes_used[0] == 1
    assert report.sizes_used[1] == 1


def test_generator_crash_is_an_internal_error() -> None:
    report = run_sequential(lambda _: True, gen_int(0, 1).map(lambda n: 1 // 0), SHRINK_INTS, Config())
    assert report.verdict is Verdict.INTERNAL_ERROR
    assert "ZeroDivisionError" in (report.error or "")


def test_replay_reproduces_the_counterexample() -> None:
    prop = lambda xs: sum(xs) < 20  # noqa: E731
    report = run_sequential(prop, INTS, SHRINK_INTS, Config(seed=Seed.from_int(6)))
    assert report.verdict is Verdict.FAILURE
    failure = report.failure
    serialized = str(failure.seed)

    again = replay(prop, INTS, SHRINK_INTS, Config(replay=(serialized, failure.size)))
    assert again.verdict is Verdict.FAILURE
    assert again.failure.counterexample == failure.counterexample
    assert again.final == report.final


def test_replay_of_a_pass_runs_one_test() -> None:
    report = quick_check(lambda _: True, INTS, SHRINK_INTS, Config(replay=(Seed.from_int(9), 30)))
    assert report.verdict is Verdict.SUCCESS
    assert report.tests_run == 1


def test_failure_reason_is_kept() -> None:
    report = quick_check(lambda xs: fail("nope") if xs else True, INTS, SHRINK_INTS, Config(seed=Seed.from_int(7)))
    assert report.verdict is Verdict.FAILURE
    assert report.failure.reason == "nope"


def test_config_rejects_more_testers_than_tests() -> None:
    with pytest.raises(ValueError):
        Config(max_success=2, num_testers=3)


def test_replay_generator_crash_is_an_internal_error() -> None:
    def crash(seed: Seed, size: int) -> list:
        raise RuntimeError("gen broke")

    report = quick_check(lambda _: True, Gen(crash), SHRINK_INTS, Config(replay=(Seed.from_int(1), 3)))
    assert report.verdict is Verdict.INTERNAL_ERROR
    assert "gen broke" in (report.error or "")
    assert report.tests_run == 0


def test_every_test_gets_a_fresh_seed() -> None:
    seen: List[Seed] = []
    recording = Gen(lambda seed, size: seen.append(seed) or INTS.run(seed, size))
    report = run_sequential(lambda _: True, recording, SHRINK_INTS, Config(max_success=400, seed=Seed.from_int(8)))
    assert report.tests_run == 400
    assert len(seen) == 400
    assert len(set(seen)) == len(seen)
