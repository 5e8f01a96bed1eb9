"""Properties, test outcomes and cooperative abort of in-flight evaluations.

Each evaluation runs inside a worker-local ``EvaluationContext`` holding the
cancellation token the runtime uses to abort it and the stack of handlers
registered through :func:`graceful`.
"""

from __future__ import annotations

import threading
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Generic, List, Optional, TypeVar

from loguru import logger

from ..utils.text_utils import format_reason

T = TypeVar("T")
R = TypeVar("R")


class Tag(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    DISCARD = "Discard"


@dataclass(frozen=True)
class Outcome:
    tag: Tag
    reason: str = ""

    @property
    def failed(self) -> bool:
        return self.tag is Tag.FAIL

    @property
    def passed(self) -> bool:
        return self.tag is Tag.PASS

    @property
    def discarded(self) -> bool:
        return self.tag is Tag.DISCARD


PASS = Outcome(Tag.PASS)
DISCARD = Outcome(Tag.DISCARD)


def fail(reason: str = "Falsified") -> Outcome:
    return Outcome(Tag.FAIL, reason)


class TestAborted(BaseException):
    """Raised inside an evaluation the runtime decided to terminate.

    Derives from BaseException so ``except Exception`` in properties never sees it.
    """

    __test__ = False


class Discarded(Exception):
    """Raised by :func:`assume` when a precondition does not hold."""


class CancellationToken:
    """Cooperative cancellation token backed by ``threading.Event``."""

    def __init__(self) -> None:
        self._event = threading.Event()

    def cancel(self) -> None:
        self._event.set()

    @property
    def is_cancelled(self) -> bool:
        return self._event.is_set()

    def wait(self, timeout: Optional[float] = None) -> bool:
        return self._event.wait(timeout)

    def raise_if_cancelled(self) -> None:
        if self._event.is_set():
            raise TestAborted("evaluation aborted by the runtime")


class EvaluationContext:
    def __init__(self, token: Optional[CancellationToken] = None) -> None:
        self.token = token or CancellationToken()
        self.handlers: List[Callable[[], Any]] = []


_current: ContextVar[Optional[EvaluationContext]] = ContextVar("parqc_evaluation", default=None)


def checkpoint() -> None:
    """Abort point for effectful properties; no-op outside an evaluation."""
    ctx = _current.get()
    if ctx is not None:
        ctx.token.raise_if_cancelled()


def graceful(action: Callable[[], R], handler: Callable[[], Any]) -> R:
    """Run ``action``; run ``handler`` exactly once if the runtime aborts it mid-flight."""
    ctx = _current.get()
    if ctx is None:
        raise RuntimeError("graceful() used outside a property evaluation")
    ctx.token.raise_if_cancelled()
    ctx.handlers.append(handler)
    try:
        result = action()
    except TestAborted:
        ctx.handlers.pop()
        try:
            handler()
        except (Exception, TestAborted) as exc:
            logger.warning(f"graceful handler failed during abort: {format_reason(exc)}")
        raise
    except BaseException:
        ctx.handlers.pop()
        raise
    ctx.handlers.pop()
    return result


def precondition(cond: bool) -> Callable[[Outcome], Outcome]:
    """Modifier forcing ``Discard`` when ``cond`` is false."""

    def apply(body: Outcome) -> Outcome:
        return body if cond else DISCARD

    return apply


def assume(cond: bool) -> None:
    if not cond:
        raise Discarded()


class Property(Generic[T]):
    def __init__(self, check: Callable[[T], Any], name: Optional[str] = None) -> None:
        self.check = check
        self.name = name or getattr(check, "__name__", "property")

    def __call__(self, value: T) -> Any:
        return self.check(value)

    def __repr__(self) -> str:
        return f"Property({self.name})"


def to_outcome(result: Any) -> Outcome:
    if isinstance(result, Outcome):
        return result
    if result is None or result is True:
        return PASS
    if result is False:
        return fail("Falsified")
    raise TypeError(f"property returned unsupported value {result!r}")


def evaluate(prop: Callable[[T], Any], value: T, token: Optional[CancellationToken] = None) -> Outcome:
    """Evaluate one test case; ``TestAborted`` propagates after handlers ran."""
    ctx = EvaluationContext(token)
    reset = _current.set(ctx)
    try:
        return to_outcome(prop(value))
    except Discarded:
        return DISCARD
    except Exception as exc:
        return fail(format_reason(exc))
    finally:
        _current.reset(reset)
