from __future__ import annotations

from pathlib import Path

import pytest

from temporalis.errors import GUARD_EXCEEDED, INVALID_ARGUMENT, TemporalisError
from temporalis.normalize import normalize_program
from temporalis.parser import parse_dataset, parse_program
from temporalis.syntax import SINCE, TOP, Binary, Interval, rel
from temporalis.temporal import Interpretation
from temporalis.windows import (
    LEFT,
    RIGHT,
    Window,
    WindowContext,
    canonicalize,
    decompose,
    enumerate_here_layers,
    enumerate_total_windows,
    fragment,
    next_there_columns,
    total_window,
    validate_window,
    window_context,
    window_to_json,
    window_union,
)

FIXTURES = Path(__file__).parent / "fixtures"

P, Q, R = rel("P"), rel("Q"), rel("R")
S = Binary(SINCE, Interval(1, 1), TOP, P)


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def make_context() -> WindowContext:
    program = normalize_program(parse_program(load_fixture("fix1.dmtl")))
    return window_context(program, parse_dataset(load_fixture("fix1.dfacts")))


def model_window() -> Window:
    return total_window(Interval(0, 1), [{P}, {P, S, R}])


def test_context_tracks_relational_and_body_atoms() -> None:
    context = make_context()
    assert context.tracked == frozenset({P, Q, R, S})
    assert context.t_pi == 1
    assert context.acceptance_atoms(RIGHT) == ()


def test_validate_window() -> None:
    context = make_context()
    assert validate_window(model_window(), context)
    missing_head = total_window(Interval(0, 1), [{P}, {P, S}])
    check = validate_window(missing_head, context)
    assert not check
    assert check.reason.startswith("rule 0 at 1")
    unknown = total_window(Interval(0, 0), [{rel("Z")}])
    assert "not a tracked atom" in validate_window(unknown, context).reason


def test_window_layers_must_nest() -> None:
    with pytest.raises(TemporalisError) as exc:
        Window(Interval(0, 0), (frozenset({P}),), (frozenset(),))
    assert exc.value.code == INVALID_ARGUMENT


def test_enumerate_total_windows() -> None:
    context = make_context()
    windows = enumerate_total_windows(context, Interval(0, 1))
    assert len(windows) == 21
    assert model_window() in windows
    assert all(window.total and not window.b for window in windows)
    assert all(validate_window(window, context) for window in windows)
    with pytest.raises(TemporalisError) as exc:
        enumerate_total_windows(context, Interval(0, 1), limit=5)
    assert exc.value.code == GUARD_EXCEEDED


def test_here_layers_under_a_model_window() -> None:
    assert enumerate_here_layers(make_context(), model_window()) == [model_window()]


def test_next_there_columns() -> None:
    columns = next_there_columns(model_window(), make_context().without_dataset(), RIGHT)
    assert len(columns) == 6
    assert all(S in column for column in columns)
    assert all(R in column or Q in column for column in columns)


def test_fragments_and_canonical_form() -> None:
    window = Window(Interval(0, 1), (frozenset({P}), frozenset({P})), (frozenset({P}), frozenset({P, R})))
    assert fragment(window, RIGHT, 0).b
    assert not fragment(model_window(), LEFT, 1).b
    with pytest.raises(TemporalisError):
        fragment(model_window(), LEFT, 2)
    assert canonicalize(model_window().shift(5)) == (model_window(), -5)


def test_window_union() -> None:
    window = model_window()
    assert window_union(window.restrict(0, 0), window) == window
    with pytest.raises(TemporalisError) as exc:
        window_union(window, window.shift(1))
    assert "disagree" in exc.value.message
    with pytest.raises(TemporalisError) as exc:
        window_union(window, window.shift(2))
    assert "do not overlap" in exc.value.message


def test_decompose_model_into_windows() -> None:
    model = Interpretation.from_runs({P: [Interval(0, 1)], R: [Interval(1, 2)]})
    windows = decompose(model, model, Interval(0, 1), range(0, 2), make_context())
    assert windows[0] == model_window()
    assert windows[1].there_at(2) == frozenset({R, S})


def test_window_json() -> None:
    assert window_to_json(model_window(), relational_only=True) == {
        "rho": [0, 1],
        "b": False,
        "here": {"0": ["P"], "1": ["P", "R"]},
        "there": {"0": ["P"], "1": ["P", "R"]},
    }


def test_successor_columns_are_shared_through_the_context_cache() -> None:
    context = make_context().without_dataset()
    assert context.without_dataset() is context
    window = model_window()
    columns = next_there_columns(window, context, RIGHT)
    assert context.cache.computed == 1
    assert next_there_columns(window.shift(7), context, RIGHT) is columns
    assert context.cache.computed == 1
    next_there_columns(window, context, LEFT)
    assert context.cache.computed == 2
    allowed = context.with_allowed(frozenset({P, R}))
    assert context.with_allowed(frozenset({P, R})) is allowed
    assert allowed.cache is not context.cache
