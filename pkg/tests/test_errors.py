from __future__ import annotations

import pytest

from temporalis.errors import (
    GUARD_EXCEEDED,
    INCONSISTENT,
    INTERNAL_ERROR,
    PARSE_ERROR,
    UNBOUNDED_DATASET,
    TemporalisError,
    exit_code_for,
    temporalis_error,
)


def test_error_renders_code_and_message() -> None:
    error = temporalis_error(PARSE_ERROR, "unexpected token")
    assert str(error) == "PARSE_ERROR: unexpected token"
    assert error.cause is None


def test_error_keeps_cause() -> None:
    cause = ValueError("bad")
    with pytest.raises(TemporalisError) as exc:
        raise temporalis_error(INTERNAL_ERROR, "wrapped", cause)
    assert exc.value.code == INTERNAL_ERROR
    assert exc.value.cause is cause


@pytest.mark.parametrize(
    ("code", "expected"),
    [
        (PARSE_ERROR, 2),
        (UNBOUNDED_DATASET, 2),
        (GUARD_EXCEEDED, 3),
        (INCONSISTENT, 4),
        (INTERNAL_ERROR, 4),
        ("SOMETHING_ELSE", 4),
    ],
)
def test_exit_codes(code: str, expected: int) -> None:
    assert exit_code_for(code) == expected
