"""Sized generators and shrinkers.

A generator is a pure function of ``(seed, size)``; composite generators split
the seed for every sub-draw so results never depend on draw order elsewhere.
Shrinkers return candidates greedy-first: removals before element shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Generic, List, Sequence, Tuple, TypeVar

from .rng import Seed, bounded, split

T = TypeVar("T")
U = TypeVar("U")

Shrinker = Callable[[T], List[T]]


class Gen(Generic[T]):
    def __init__(self, run: Callable[[Seed, int], T]) -> None:
        self.run = run

    def __call__(self, seed: Seed, size: int) -> T:
        return self.run(seed, size)

    def map(self, fn: Callable[[T], U]) -> "Gen[U]":
        return Gen(lambda seed, size: fn(self.run(seed, size)))

    def bind(self, fn: Callable[[T], "Gen[U]"]) -> "Gen[U]":
        def run(seed: Seed, size: int) -> U:
            left, right = split(seed)
            return fn(self.run(left, size)).run(right, size)

        return Gen(run)

    def sample(self, seed: Seed, size: int, count: int = 10) -> List[T]:
        out: List[T] = []
        for _ in range(count):
            seed, child = split(seed)
            out.append(self.run(child, size))
        return out


def constant(value: T) -> Gen[T]:
    return Gen(lambda seed, size: value)


def sized(fn: Callable[[int], Gen[T]]) -> Gen[T]:
    return Gen(lambda seed, size: fn(size).run(seed, size))


def resize(new_size: int, gen: Gen[T]) -> Gen[T]:
    return Gen(lambda seed, size: gen.run(seed, new_size))


def gen_int(lo: int, hi: int) -> Gen[int]:
    if lo > hi:
        raise ValueError(f"empty range: lo={lo} > hi={hi}")
    return Gen(lambda seed, size: bounded(seed, lo, hi)[0])


def gen_bool() -> Gen[bool]:
    return gen_int(0, 1).map(bool)


def gen_list(elem: Gen[T]) -> Gen[List[T]]:
    """Lists whose length is bounded by the size."""

    def run(seed: Seed, size: int) -> List[T]:
        n, seed = bounded(seed, 0, max(0, size))
        out: List[T] = []
        for _ in range(n):
            seed, child = split(seed)
            out.append(elem.run(child, size))
        return out

    return Gen(run)


def gen_tuple(*gens: Gen[Any]) -> Gen[Tuple[Any, ...]]:
    def run(seed: Seed, size: int) -> Tuple[Any, ...]:
        out = []
        for g in gens:
            seed, child = split(seed)
            out.append(g.run(child, size))
        return tuple(out)

    return Gen(run)


def one_of(*gens: Gen[T]) -> Gen[T]:
    if not gens:
        raise ValueError("one_of needs at least one generator")

    def run(seed: Seed, size: int) -> T:
        idx, seed = bounded(seed, 0, len(gens) - 1)
        return gens[idx].run(seed, size)

    return Gen(run)


def frequency(weighted: Sequence[Tuple[int, Gen[T]]]) -> Gen[T]:
    total = sum(w for w, _ in weighted)
    if total <= 0:
        raise ValueError("frequency needs a positive total weight")

    def run(seed: Seed, size: int) -> T:
        pick, seed = bounded(seed, 1, total)
        for weight, g in weighted:
            pick -= weight
            if pick <= 0:
                return g.run(seed, size)
        raise AssertionError("unreachable")

    return Gen(run)


# ---------------- Shrinkers ----------------


def shrink_nothing(value: Any) -> List[Any]:
    return []


def shrink_int(n: int) -> List[int]:
    """Halve the distance to zero, ending with a single decrement."""
    out: List[int] = []
    if n < 0:
        out.append(-n)
    step = n
    while step != 0:
        cand = n - step
        if cand not in out:
            out.append(cand)
        step = step // 2 if step > 0 else -(-step // 2)
    return out


def _removes(k: int, xs: List[T]) -> List[List[T]]:
    out: List[List[T]] = []
    prefix: List[T] = []
    rest = xs
    while len(rest) >= k:
        head, tail = rest[:k], rest[k:]
        out.append(prefix + tail)
        if not tail:
            break
        prefix = prefix + head
        rest = tail
    return out


def shrink_list(xs: List[T], elem_shrinker: Shrinker[T] = shrink_nothing) -> List[List[T]]:
    n = len(xs)
    out: List[List[T]] = []
    k = n
    while k > 0:
        out.extend(_removes(k, xs))
        k //= 2
    for i, x in enumerate(xs):
        for smaller in elem_shrinker(x):
            out.append(xs[:i] + [smaller] + xs[i + 1:])
    return out


def shrink_tuple(*shrinkers: Shrinker[Any]) -> Shrinker[Tuple[Any, ...]]:
    def shrink(value: Tuple[Any, ...]) -> List[Tuple[Any, ...]]:
        out: List[Tuple[Any, ...]] = []
        for i, (part, sh) in enumerate(zip(value, shrinkers)):
            for smaller in sh(part):
                out.append(value[:i] + (smaller,) + value[i + 1:])
        return out

    return shrink


def int_measure(n: int) -> int:
    # positives rank below the negative of equal magnitude
    return 2 * abs(n) - (1 if n > 0 else 0)


def list_measure(xs: List[T], elem_measure: Callable[[T], int] = lambda _: 0) -> int:
    return len(xs) + sum(elem_measure(x) for x in xs)


@dataclass(frozen=True)
class Arbitrary(Generic[T]):
    gen: Gen[T]
    shrinker: Shrinker[T] = shrink_nothing
    pretty: Callable[[T], str] = repr
