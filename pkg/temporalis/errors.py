from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

PARSE_ERROR = "PARSE_ERROR"
RATIONAL_TIMELINE = "RATIONAL_TIMELINE"
EMPTY_INTERVAL = "EMPTY_INTERVAL"
INVALID_INTERVAL = "INVALID_INTERVAL"
UNSAFE_RULE = "UNSAFE_RULE"
INVALID_HEAD = "INVALID_HEAD"
UNBOUNDED_DATASET = "UNBOUNDED_DATASET"
NOT_FORWARD_PROPAGATING = "NOT_FORWARD_PROPAGATING"
INCONSISTENT = "INCONSISTENT"
STABILIZATION_FAILED = "STABILIZATION_FAILED"
GUARD_EXCEEDED = "GUARD_EXCEEDED"
INVALID_ARGUMENT = "INVALID_ARGUMENT"
INPUT_NOT_FOUND = "INPUT_NOT_FOUND"
INTERNAL_ERROR = "INTERNAL_ERROR"

INPUT_ERRORS = frozenset(
    {
        PARSE_ERROR,
        RATIONAL_TIMELINE,
        EMPTY_INTERVAL,
        INVALID_INTERVAL,
        UNSAFE_RULE,
        INVALID_HEAD,
        UNBOUNDED_DATASET,
        NOT_FORWARD_PROPAGATING,
        INVALID_ARGUMENT,
        INPUT_NOT_FOUND,
    }
)


@dataclass
class TemporalisError(Exception):
    code: str
    message: str
    cause: Optional[BaseException] = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def temporalis_error(
    code: str, message: str, cause: Optional[BaseException] = None
) -> TemporalisError:
    return TemporalisError(code=code, message=message, cause=cause)


def exit_code_for(code: str) -> int:
    if code in INPUT_ERRORS:
        return 2
    if code == GUARD_EXCEEDED:
        return 3
    return 4
