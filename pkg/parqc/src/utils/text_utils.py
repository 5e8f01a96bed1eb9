"""Text helpers for failure reasons and console rendering."""

import re
from typing import Optional

_WS = re.compile(r"\s+")


def clean_control_chars(text: str) -> str:
    """Drop ANSI escape sequences and control characters."""
    if not text:
        return text
    text = re.sub(r"\x1b\[[0-9;]*[a-zA-Z]", "", text)
    text = re.sub(r"[\x00-\x08\x0b-\x1f\x7f-\x9f]", "", text)
    return text


def truncate_text(text: str, max_length: int = 100, suffix: str = "...") -> str:
    if not text or len(text) <= max_length:
        return text
    return text[: max_length - len(suffix)] + suffix


def format_reason(exc: BaseException, max_length: Optional[int] = 200) -> str:
    """Single-line ``"<ExcType>: <message>"`` used as a failure reason.

    Assertion errors without a message render as ``AssertionError``.
    """
    message = _WS.sub(" ", clean_control_chars(str(exc))).strip()
    reason = f"{type(exc).__name__}: {message}" if message else type(exc).__name__
    if max_length:
        reason = truncate_text(reason, max_length)
    return reason
