from __future__ import annotations

import pytest

from temporalis.errors import EMPTY_INTERVAL, INVALID_HEAD, INVALID_INTERVAL, UNSAFE_RULE, TemporalisError
from temporalis.syntax import (
    BOXMINUS,
    BOXPLUS,
    DIAMONDMINUS,
    DIAMONDPLUS,
    INF,
    SINCE,
    TOP,
    UNTIL,
    Binary,
    Const,
    Dataset,
    Fact,
    Interval,
    Program,
    Rule,
    Unary,
    Var,
    atom_universe,
    data_extent,
    depth,
    format_atom,
    ground,
    is_forward_propagating,
    make_term,
    rel,
    safe_variables,
)


def test_interval_make_normalizes_open_brackets() -> None:
    assert Interval.make(0, 3, lo_closed=False) == Interval(1, 3)
    assert Interval.make(0, 3, hi_closed=False) == Interval(0, 2)
    assert Interval.make(2, INF, hi_closed=False) == Interval(2, INF)


def test_interval_make_rejects_empty_and_closed_infinity() -> None:
    with pytest.raises(TemporalisError) as exc:
        Interval.make(1, 2, lo_closed=False, hi_closed=False)
    assert exc.value.code == EMPTY_INTERVAL
    with pytest.raises(TemporalisError) as exc:
        Interval.make(0, INF)
    assert exc.value.code == INVALID_INTERVAL


def test_interval_operations() -> None:
    interval = Interval(0, 3)
    assert interval.contains(3)
    assert not interval.contains(4)
    assert interval.shift(2) == Interval(2, 5)
    assert interval.intersect(Interval(5, 6)) is None
    assert interval.hull(Interval(5, 6)) == Interval(0, 6)
    assert list(interval.points()) == [0, 1, 2, 3]
    assert str(Interval(-INF, 2)) == "(-inf,2]"
    assert not Interval(0, INF).bounded


def test_terms_follow_case_convention() -> None:
    assert make_term("X") == Var("X")
    assert make_term("_y") == Var("_y")
    assert make_term("alice") == Const("alice")


def test_format_atom_parenthesizes_nested_operands() -> None:
    p, q = rel("P"), rel("Q")
    atom = Binary(SINCE, Interval(0, 2), Unary(BOXMINUS, Interval(1, 1), p), q)
    assert format_atom(atom) == "(BOXMINUS[1,1] P) SINCE[0,2] Q"
    assert depth(atom) == 2


def test_left_operands_bind_no_variables() -> None:
    atom = Binary(UNTIL, Interval(0, 1), rel("P", "X"), rel("Q", "Y"))
    assert safe_variables(atom) == frozenset({Var("Y")})


def test_t_pi_is_largest_positive_endpoint() -> None:
    program = Program(
        (
            Rule(rel("R"), (Unary(DIAMONDMINUS, Interval(1, 4), rel("P")),)),
            Rule(rel("S"), (Unary(BOXPLUS, Interval(2, INF), rel("P")),)),
        )
    )
    assert program.t_pi == 4
    assert Program((Rule(rel("R"), (rel("P"),)),)).t_pi == 1


def test_check_rejects_unsafe_rules_and_bad_heads() -> None:
    unsafe = Program((Rule(rel("R", "X"), (Binary(SINCE, Interval(0, 1), rel("P", "X"), TOP),)),))
    with pytest.raises(TemporalisError) as exc:
        unsafe.check()
    assert exc.value.code == UNSAFE_RULE
    bad_head = Program((Rule(Unary(DIAMONDPLUS, Interval(1, 1), rel("R")), (rel("P"),)),))
    with pytest.raises(TemporalisError) as exc:
        bad_head.check()
    assert exc.value.code == INVALID_HEAD


def test_ground_uses_program_and_data_constants() -> None:
    program = Program((Rule(rel("R", "X"), (rel("P", "X"),)),))
    dataset = Dataset((Fact(rel("P", "a"), Interval(0, 0)), Fact(rel("P", "b"), Interval(1, 1))))
    grounded = ground(program, dataset)
    assert [rule.head for rule in grounded] == [rel("R", "a"), rel("R", "b")]
    assert all(rule.is_ground() for rule in grounded)


def test_forward_propagation() -> None:
    past = Program((Rule(Unary(BOXPLUS, Interval(0, 1), rel("R")), (Unary(DIAMONDMINUS, Interval(1, 1), rel("P")),)),))
    future_body = Program((Rule(rel("R"), (Unary(DIAMONDPLUS, Interval(1, 1), rel("P")),)),))
    past_head = Program((Rule(Unary(BOXMINUS, Interval(0, 1), rel("R")), (rel("P"),)),))
    assert is_forward_propagating(past)
    assert not is_forward_propagating(future_body)
    assert not is_forward_propagating(past_head)


def test_dataset_extent_and_universe() -> None:
    dataset = Dataset((Fact(rel("P"), Interval(0, 1)), Fact(rel("Q"), Interval(3, 3))))
    assert (dataset.t_min, dataset.t_max) == (0, 3)
    assert dataset.bounded
    program = Program((Rule(rel("R"), (Unary(DIAMONDMINUS, Interval(1, 1), rel("P")),)),))
    universe = atom_universe(program, dataset)
    assert rel("Q") in universe
    assert Unary(DIAMONDMINUS, Interval(1, 1), rel("P")) in universe
    assert Unary(BOXMINUS, Interval(0, INF), rel("R")) in universe


def test_data_extent() -> None:
    dataset = Dataset((Fact(rel("P"), Interval(0, 1)), Fact(rel("Q", "a"), Interval(3, 3))))
    assert data_extent(dataset) == (0, 3)
    assert data_extent(Dataset()) == (0, 0)


def test_program_vocabulary() -> None:
    program = Program(
        (Rule(rel("R", "X"), (Binary(SINCE, Interval(0, 1), rel("P", "X"), rel("Q", "X", "a")),), (rel("S", "b"),)),)
    )
    assert program.predicates == frozenset({"R", "P", "Q", "S"})
    assert program.constants == frozenset({Const("a"), Const("b")})
