from __future__ import annotations

from typing import Any, Callable, Optional

from ..core.gen import Shrinker
from ..core.models import ShrinkReport, ShrinkStrategy
from ..core.report import RunStats
from .parallel import shrink_deterministic, shrink_greedy
from .sequential import shrink_sequential


def run_shrink(
    prop: Callable[[Any], Any],
    shrinker: Shrinker[Any],
    c0: Any,
    strategy: ShrinkStrategy = ShrinkStrategy.SEQUENTIAL,
    workers: int = 1,
    stats: Optional[RunStats] = None,
) -> ShrinkReport:
    if strategy is ShrinkStrategy.GREEDY:
        return shrink_greedy(prop, shrinker, c0, workers, stats)
    if strategy is ShrinkStrategy.DETERMINISTIC:
        return shrink_deterministic(prop, shrinker, c0, workers, stats)
    return shrink_sequential(prop, shrinker, c0, stats)
