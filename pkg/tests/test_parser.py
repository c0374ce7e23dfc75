from __future__ import annotations

from pathlib import Path

import pytest

from temporalis.errors import INVALID_INTERVAL, PARSE_ERROR, RATIONAL_TIMELINE, UNSAFE_RULE, TemporalisError
from temporalis.parser import parse_atom, parse_dataset, parse_fact_query, parse_interpretation, parse_program
from temporalis.syntax import (
    BOTTOM,
    DIAMONDMINUS,
    INF,
    SINCE,
    TOP,
    Binary,
    Interval,
    Rule,
    Unary,
    format_dataset,
    format_program,
    rel,
)

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def test_parse_fixture_program() -> None:
    program = parse_program(load_fixture("fix1.dmtl"))
    assert program.rules == (
        Rule(rel("R"), (Unary(DIAMONDMINUS, Interval(1, 1), rel("P")),), (rel("Q"),)),
    )


def test_parse_dataset_with_punctual_and_interval_facts() -> None:
    dataset = parse_dataset(load_fixture("fix2.dfacts") + "S(a)@(0,inf) .\n")
    assert [fact.interval for fact in dataset.facts] == [Interval(0, 0), Interval(1, 1), Interval(1, INF)]
    assert not dataset.bounded


def test_program_round_trips_through_formatter() -> None:
    text = (
        "R(X) :- P(X) SINCE[0,2] Q(X), not BOXMINUS[1,inf) S(X) .\n"
        "BOXPLUS[0,1] T :- TOP UNTIL[1,1] (DIAMONDMINUS[0,0] U) .\n"
        "BOTTOM :- P(a), Q(a) .\n"
        "W(a) .\n"
    )
    program = parse_program(text)
    assert parse_program(format_program(program)) == program


def test_dataset_round_trips_through_formatter() -> None:
    dataset = parse_dataset("P(a)@[0,3] .\nQ@-2 .\n")
    assert parse_dataset(format_dataset(dataset)) == dataset


def test_rational_numbers_are_rejected() -> None:
    with pytest.raises(TemporalisError) as exc:
        parse_dataset(load_fixture("rational_bad.dfacts"))
    assert exc.value.code == RATIONAL_TIMELINE
    assert "rational" in exc.value.message


def test_negative_operator_interval_is_rejected() -> None:
    with pytest.raises(TemporalisError) as exc:
        parse_atom("DIAMONDMINUS[-1,1] P")
    assert exc.value.code == INVALID_INTERVAL


def test_syntax_errors_carry_position() -> None:
    with pytest.raises(TemporalisError) as exc:
        parse_program("R :- P,, Q .")
    assert exc.value.code == PARSE_ERROR
    assert "line 1" in exc.value.message


def test_unsafe_rule_is_rejected_on_parse() -> None:
    with pytest.raises(TemporalisError) as exc:
        parse_program("R(X) :- not P(X) .")
    assert exc.value.code == UNSAFE_RULE


def test_non_ground_fact_is_rejected() -> None:
    with pytest.raises(TemporalisError) as exc:
        parse_dataset("P(X)@0 .")
    assert exc.value.code == PARSE_ERROR


def test_fact_query_and_atoms() -> None:
    atom, interval = parse_fact_query("R(a)@[1,2]")
    assert atom == rel("R", "a")
    assert interval == Interval(1, 2)
    assert parse_atom("TOP SINCE[1,1] P") == Binary(SINCE, Interval(1, 1), TOP, rel("P"))
    assert parse_atom("BOTTOM") == BOTTOM


def test_interpretation_tails() -> None:
    interp = parse_interpretation("P@(-inf,3] .\nQ@[5,inf) .\n")
    assert interp.holds(rel("P"), -100)
    assert not interp.holds(rel("P"), 4)
    assert interp.holds(rel("Q"), 10**6)
