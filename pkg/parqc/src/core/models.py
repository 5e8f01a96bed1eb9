from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator, model_validator

from .rng import Seed


class SizeStrategy(str, Enum):
    STRIDE = "stride"
    OFFSET = "offset"


class ShrinkStrategy(str, Enum):
    SEQUENTIAL = "seq"
    DETERMINISTIC = "det"
    GREEDY = "greedy"


class Verdict(str, Enum):
    SUCCESS = "SUCCESS"
    GAVE_UP = "GAVE_UP"
    FAILURE = "FAILURE"
    INTERNAL_ERROR = "INTERNAL_ERROR"


class Phase(str, Enum):
    TESTING = "Testing"
    SHRINKING = "Shrinking"


def _coerce_seed(value: Any) -> Any:
    if isinstance(value, str):
        return Seed.parse(value)
    return value


class Config(BaseModel):
    """Arguments of one property run."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    max_success: PositiveInt = 100
    max_size: PositiveInt = 100
    max_discard_ratio: PositiveInt = 10
    num_testers: PositiveInt = 1
    size_strategy: SizeStrategy = SizeStrategy.STRIDE
    shrink_strategy: ShrinkStrategy = ShrinkStrategy.SEQUENTIAL
    shrink_workers: Optional[PositiveInt] = None
    steal_enabled: bool = True
    seed: Optional[Seed] = None
    replay: Optional[Tuple[Seed, int]] = None
    chatty: bool = False
    progress_period_ms: PositiveInt = 200

    @field_validator("seed", mode="before")
    @classmethod
    def _parse_seed(cls, value: Any) -> Any:
        return _coerce_seed(value)

    @field_validator("replay", mode="before")
    @classmethod
    def _parse_replay(cls, value: Any) -> Any:
        if value is None:
            return None
        seed, size = value
        return (_coerce_seed(seed), size)

    @model_validator(mode="after")
    def _check_counts(self) -> "Config":
        if self.num_testers > self.max_success:
            raise ValueError("num_testers must not exceed max_success")
        if self.replay is not None and self.replay[1] < 0:
            raise ValueError("replay size must be non-negative")
        return self

    @property
    def workers(self) -> int:
        return self.shrink_workers or self.num_testers

    @property
    def discard_limit(self) -> int:
        return self.max_discard_ratio * self.max_success


class ShrinkReport(BaseModel):
    final: Any
    successful_shrinks: int = 0
    candidates_evaluated: int = 0
    abandoned_evaluations: int = 0
    committed_path: List[Any] = Field(default_factory=list)

    @property
    def efficiency(self) -> Optional[Fraction]:
        from ..shrink.sequential import efficiency

        return efficiency(self.successful_shrinks, self.candidates_evaluated)


class FailureInfo(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    seed: Seed
    size: int
    counterexample: Any
    reason: str = ""
    tester: int = 0


class RunReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    verdict: Verdict
    tests_run: int = 0
    discarded: int = 0
    per_tester_counts: List[int] = Field(default_factory=list)
    stolen_runs: List[int] = Field(default_factory=list)
    failure: Optional[FailureInfo] = None
    shrink: Optional[ShrinkReport] = None
    sizes_used: List[int] = Field(default_factory=list)
    error: Optional[str] = None
    test_ms: float = 0.0
    shrink_ms: float = 0.0

    @property
    def final(self) -> Any:
        if self.shrink is not None:
            return self.shrink.final
        return self.failure.counterexample if self.failure else None


class ProgressSnapshot(BaseModel):
    tests_passed: int
    tests_discarded: int
    phase: Phase
    shrink_steps: int
    elapsed_ms: int


class ErrorCode(str, Enum):
    INVALID_CONFIG = "INVALID_CONFIG"
    INVALID_SEED = "INVALID_SEED"
    UNKNOWN_BENCHMARK = "UNKNOWN_BENCHMARK"
    BUG_UNREACHABLE = "BUG_UNREACHABLE"
    INTERNAL = "INTERNAL"


class ParqcError(Exception):
    def __init__(self, code: ErrorCode, message: str, hint: Optional[str] = None):
        self.code = code
        self.message = message
        self.hint = hint
        super().__init__(message)
