"""Left-to-right shrink loop and efficiency accounting."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Callable, List, Optional

from loguru import logger

from ..core.gen import Shrinker
from ..core.models import ShrinkReport
from ..core.prop import evaluate
from ..core.report import RunStats


def efficiency(successes: int, evaluated: int) -> Optional[Fraction]:
    """Fraction of completed evaluations that committed a shrink; ``None`` when nothing was evaluated."""
    if successes < 0 or evaluated < 0:
        raise ValueError("counts must be non-negative")
    if successes > evaluated:
        raise ValueError(f"successes ({successes}) exceed evaluated candidates ({evaluated})")
    if evaluated == 0:
        return None
    return Fraction(successes, evaluated)


def shrink_sequential(
    prop: Callable[[Any], Any],
    shrinker: Shrinker[Any],
    c0: Any,
    stats: Optional[RunStats] = None,
) -> ShrinkReport:
    """Commit the first failing candidate, restart on its candidates, stop at a local minimum.

    Discarded candidates count as evaluated and non-failing.
    """
    current = c0
    path: List[Any] = []
    evaluated = 0
    progressed = True
    while progressed:
        progressed = False
        for candidate in shrinker(current):
            outcome = evaluate(prop, candidate)
            evaluated += 1
            if outcome.failed:
                current = candidate
                path.append(candidate)
                if stats is not None:
                    stats.add_shrink_step()
                progressed = True
                break
    logger.debug(f"sequential shrink done: {len(path)} shrinks, {evaluated} evaluations")
    return ShrinkReport(
        final=current,
        successful_shrinks=len(path),
        candidates_evaluated=evaluated,
        committed_path=path,
    )
