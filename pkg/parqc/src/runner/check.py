from __future__ import annotations

from typing import Any, Optional

from ..core.gen import Gen, Shrinker, shrink_nothing
from ..core.models import Config, RunReport, ShrinkStrategy
from ..core.report import LineSink, RunStats, run_progress_reporter
from .parallel import run_parallel
from .sequential import PropertyFn, replay, run_sequential


def quick_check(
    prop: PropertyFn,
    gen: Gen[Any],
    shrinker: Shrinker[Any] = shrink_nothing,
    cfg: Optional[Config] = None,
    stats: Optional[RunStats] = None,
    sink: Optional[LineSink] = None,
) -> RunReport:
    """Run ``prop`` against ``gen`` with the mode selected by ``cfg``."""
    cfg = cfg or Config()
    stats = stats or RunStats()
    reporter = None
    if cfg.chatty and sink is not None:
        reporter = run_progress_reporter(stats.snapshot, cfg.progress_period_ms, sink, chatty=True)
    try:
        if cfg.replay is not None:
            return replay(prop, gen, shrinker, cfg, stats)
        if cfg.num_testers == 1 and cfg.shrink_strategy is ShrinkStrategy.SEQUENTIAL:
            return run_sequential(prop, gen, shrinker, cfg, stats)
        return run_parallel(prop, gen, shrinker, cfg, stats)
    finally:
        if reporter is not None:
            reporter.stop()
