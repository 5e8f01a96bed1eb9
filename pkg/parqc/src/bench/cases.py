"""Desk-scale benchmark properties.

``slow_pure`` burns CPU inside ``hashlib`` (which releases the GIL on large
buffers) so testers on separate cores really overlap; ``effectful_tmp``
creates a fresh directory per evaluation and relies on ``graceful`` for
cleanup when the runtime aborts it.
"""

from __future__ import annotations

import hashlib
import itertools
import os
import shutil
import tempfile
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from ..core import expr as ex
from ..core.gen import Arbitrary, Gen, Shrinker, constant, gen_int, gen_list, shrink_int, shrink_list
from ..core.models import ErrorCode, ParqcError
from ..core.prop import Outcome, checkpoint, evaluate, fail, graceful
from ..core.rng import Seed, split
from ..utils.config import get_default_tmp_root

BENCHMARKS = ("constant", "slow_pure", "expr_bug", "effectful_tmp")

_BLOCK = bytes(range(256)) * 4096  # 1 MiB


@dataclass
class BenchCase:
    name: str
    prop: Callable[[Any], Any]
    arb: Arbitrary[Any]
    size_of: Callable[[Any], int] = lambda _: 0
    planted_bug: bool = False
    has_bug: bool = False

    @property
    def gen(self) -> Gen[Any]:
        return self.arb.gen

    @property
    def shrinker(self) -> Shrinker[Any]:
        return self.arb.shrinker

    @property
    def pretty(self) -> Callable[[Any], str]:
        return self.arb.pretty


def burn(rounds: int) -> bytes:
    h = hashlib.blake2b()
    for _ in range(rounds):
        h.update(_BLOCK)
    return h.digest()


@lru_cache(maxsize=None)
def calibrate_rounds(target_ms: float = 5.0) -> int:
    """Hash rounds taking roughly ``target_ms`` on this machine."""
    trial_rounds = 4
    started = time.perf_counter()
    burn(trial_rounds)
    per_round = (time.perf_counter() - started) / trial_rounds
    return max(1, round(target_ms / 1000.0 / max(per_round, 1e-6)))


def _int_lists(hi: int) -> Arbitrary[List[int]]:
    return Arbitrary(gen_list(gen_int(0, hi)), lambda xs: shrink_list(xs, shrink_int))


def _list_size(xs: List[int]) -> int:
    # cons cells plus the terminating nil
    return len(xs) + 1


def constant_case() -> BenchCase:
    return BenchCase(name="constant", prop=lambda _: True, arb=Arbitrary(constant(())))


def slow_pure_case(planted_bug: bool = False, target_ms: float = 5.0) -> BenchCase:
    rounds = calibrate_rounds(target_ms)

    def sort_unique_safe(xs: List[int]) -> List[int]:
        if planted_bug and len(xs) > 5:
            return sorted(set(xs))
        return sorted(xs)

    def prop_sort(xs: List[int]) -> bool:
        burn(rounds)
        return sort_unique_safe(xs) == sorted(xs)

    return BenchCase(
        name="slow_pure",
        prop=prop_sort,
        arb=_int_lists(99),
        size_of=_list_size,
        planted_bug=planted_bug,
        has_bug=True,
    )


def expr_case(planted_bug: bool = False) -> BenchCase:
    def prop_simplify(e: ex.Expr) -> Outcome | bool:
        before = ex.evaluate(e)
        after = ex.evaluate(ex.simplify(e, planted_bug))
        if before != after:
            return fail(f"simplify changed the value: {before} != {after}")
        return True

    return BenchCase(
        name="expr_bug",
        prop=prop_simplify,
        arb=Arbitrary(ex.gen_expr(), ex.shrink_expr, ex.pretty),
        size_of=ex.node_count,
        planted_bug=planted_bug,
        has_bug=True,
    )


@dataclass
class EffectfulTmpCase(BenchCase):
    """Round-trips a list through files in a per-evaluation temporary directory.

    With the bug planted, files are named by value so duplicates overwrite each other.
    """

    root: Path = field(default_factory=lambda: Path(get_default_tmp_root()))
    write_delay_s: float = 0.0005
    handler_runs: Counter = field(default_factory=Counter)
    _ids: Any = field(default_factory=itertools.count)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def check(self, xs: List[int]) -> bool:
        with self._lock:
            eval_id = next(self._ids)
        created: Dict[str, Path] = {}

        def action() -> List[int]:
            workdir = Path(tempfile.mkdtemp(prefix=f"eval{eval_id}_", dir=self.root))
            created["dir"] = workdir
            for i, x in enumerate(xs):
                checkpoint()
                name = f"{x}.dat" if self.planted_bug else f"{i}_{x}.dat"
                (workdir / name).write_text(str(x), encoding="utf-8")
                if self.write_delay_s:
                    time.sleep(self.write_delay_s)
            found = sorted(int(p.read_text(encoding="utf-8")) for p in workdir.iterdir())
            shutil.rmtree(workdir)
            return found

        def handler() -> None:
            with self._lock:
                self.handler_runs[eval_id] += 1
            workdir = created.get("dir")
            if workdir is not None:
                shutil.rmtree(workdir, ignore_errors=True)

        return graceful(action, handler) == sorted(xs)

    def leftovers(self) -> List[str]:
        if not self.root.exists():
            return []
        return sorted(os.listdir(self.root))


def effectful_tmp_case(planted_bug: bool = False, root: Optional[Path] = None) -> EffectfulTmpCase:
    root = Path(root) if root is not None else Path(get_default_tmp_root())
    root.mkdir(parents=True, exist_ok=True)
    case = EffectfulTmpCase(
        name="effectful_tmp",
        prop=lambda xs: True,
        arb=_int_lists(9),
        size_of=_list_size,
        planted_bug=planted_bug,
        has_bug=True,
        root=root,
    )
    case.prop = case.check
    return case


def get_case(name: str, planted_bug: bool = False, tmp_root: Optional[Path] = None) -> BenchCase:
    if name == "constant":
        return constant_case()
    if name == "slow_pure":
        return slow_pure_case(planted_bug)
    if name == "expr_bug":
        return expr_case(planted_bug)
    if name == "effectful_tmp":
        return effectful_tmp_case(planted_bug, tmp_root)
    raise ParqcError(
        code=ErrorCode.UNKNOWN_BENCHMARK,
        message=f"Unknown benchmark: {name}",
        hint=f"Choose one of: {', '.join(BENCHMARKS)} or 'all'",
    )


def collect_failing_seeds(
    case: BenchCase,
    n: int,
    seed: Optional[Seed] = None,
    max_size: int = 100,
    timeout_s: float = 60.0,
) -> List[Tuple[Seed, int]]:
    """Find ``n`` distinct ``(seed, size)`` pairs that falsify ``case`` on replay."""
    if not (case.planted_bug and case.has_bug):
        raise ParqcError(code=ErrorCode.INVALID_CONFIG, message=f"{case.name} has no planted bug to reach")
    pairs: List[Tuple[Seed, int]] = []
    seen = set()
    seed = seed or Seed.fresh()
    deadline = time.monotonic() + timeout_s
    attempt = 0
    while len(pairs) < n:
        if time.monotonic() > deadline:
            raise ParqcError(
                code=ErrorCode.BUG_UNREACHABLE,
                message=f"Found only {len(pairs)}/{n} failing seeds for {case.name} within {timeout_s:.0f}s",
                hint="Raise the timeout or check that the planted bug is reachable at the configured sizes.",
            )
        seed, test_seed = split(seed)
        size = attempt % max_size
        attempt += 1
        if (test_seed, size) in seen:
            continue
        if evaluate(case.prop, case.gen.run(test_seed, size)).failed:
            seen.add((test_seed, size))
            pairs.append((test_seed, size))
    return pairs
