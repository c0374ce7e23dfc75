from __future__ import annotations

import random

import pytest

from temporalis.errors import INVALID_ARGUMENT, TemporalisError
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
    Dataset,
    Fact,
    Interval,
    Unary,
    rel,
)
from temporalis.temporal import (
    Evaluator,
    Interpretation,
    build_interpretation,
    coalesce,
    dataset_entails,
    eval_metric_atom,
    format_interpretation,
    models_fact,
    stabilization_bounds,
)

P = rel("P")
Q = rel("Q")


def make_interp(**runs: list) -> Interpretation:
    return Interpretation.from_runs({rel(name): intervals for name, intervals in runs.items()})


def test_coalesce_merges_adjacent_and_overlapping_runs() -> None:
    merged = coalesce([Interval(0, 1), Interval(2, 3), Interval(5, 6), Interval(6, INF)])
    assert list(merged) == [Interval(0, 3), Interval(5, INF)]
    assert merged.right_tail
    assert not merged.left_tail


def test_unary_operators_on_bounded_runs() -> None:
    interp = make_interp(P=[Interval(0, 1)])
    assert eval_metric_atom(interp, Unary(DIAMONDMINUS, Interval(1, 1), P), 2)
    assert not eval_metric_atom(interp, Unary(DIAMONDMINUS, Interval(1, 1), P), 3)
    assert eval_metric_atom(interp, Unary(BOXMINUS, Interval(0, 1), P), 1)
    assert not eval_metric_atom(interp, Unary(BOXMINUS, Interval(0, 1), P), 2)
    assert eval_metric_atom(interp, Unary(DIAMONDPLUS, Interval(2, 3), P), -2)
    assert not eval_metric_atom(interp, Unary(BOXPLUS, Interval(0, 2), P), 0)


def test_unbounded_operators_use_tails() -> None:
    interp = make_interp(P=[Interval(5, INF)])
    assert eval_metric_atom(interp, Unary(BOXPLUS, Interval(0, INF), P), 5)
    assert not eval_metric_atom(interp, Unary(BOXPLUS, Interval(0, INF), P), 4)
    assert eval_metric_atom(interp, Unary(DIAMONDPLUS, Interval(0, INF), P), -1000)
    assert not eval_metric_atom(interp, Unary(DIAMONDMINUS, Interval(0, INF), P), 4)
    assert not eval_metric_atom(interp, Unary(BOXMINUS, Interval(1, INF), P), 2000)


def test_since_and_until() -> None:
    interp = make_interp(P=[Interval(1, 3)], Q=[Interval(0, 0)])
    since = Binary(SINCE, Interval(1, 3), P, Q)
    assert since.op == SINCE
    assert eval_metric_atom(interp, since, 3)
    assert not eval_metric_atom(interp, since, 0)
    assert not eval_metric_atom(interp, since, 5)
    until = Binary(UNTIL, Interval(1, 1), TOP, P)
    assert eval_metric_atom(interp, until, 0)
    assert not eval_metric_atom(interp, until, 3)


def test_models_fact_over_unbounded_rho() -> None:
    interp = make_interp(P=[Interval(-INF, 3)])
    assert models_fact(interp, P, Interval(-INF, 3))
    assert not models_fact(interp, P, Interval(-INF, 4))
    assert models_fact(interp, Unary(DIAMONDPLUS, Interval(0, INF), P), Interval(-INF, 3))


def test_stabilization_bounds_cover_the_support() -> None:
    interp = make_interp(P=[Interval(2, 4)])
    left, right = stabilization_bounds(interp, Unary(DIAMONDMINUS, Interval(0, 2), P))
    assert left <= 2
    assert right >= 6


def test_persistence_from_here_to_there() -> None:
    rng = random.Random(7)
    atoms = [
        Unary(BOXMINUS, Interval(0, 2), P),
        Unary(DIAMONDPLUS, Interval(1, INF), Q),
        Binary(SINCE, Interval(0, 3), P, Q),
        Binary(UNTIL, Interval(1, INF), Q, P),
        Unary(BOXPLUS, Interval(1, 2), Binary(SINCE, Interval(0, 1), TOP, P)),
    ]
    for _ in range(200):
        there_points = {atom: {t for t in range(-3, 4) if rng.random() < 0.6} for atom in (P, Q)}
        here_points = {atom: {t for t in points if rng.random() < 0.6} for atom, points in there_points.items()}
        there = build_interpretation(there_points)
        here = build_interpretation(here_points)
        assert here.issubset(there)
        here_values, there_values = Evaluator(here), Evaluator(there)
        for atom in atoms:
            for t in range(-6, 7):
                if here_values.value(atom, t):
                    assert there_values.value(atom, t)


def test_build_interpretation_with_tails() -> None:
    interp = build_interpretation({P: [0, 1, 3]}, left_tails=[Q], right_tails=[P], box=Interval(0, 4))
    assert list(interp.get(P)) == [Interval(0, 1), Interval(3, 3), Interval(5, INF)]
    assert list(interp.get(Q)) == [Interval(-INF, -1)]
    with pytest.raises(TemporalisError) as exc:
        build_interpretation({}, left_tails=[Q])
    assert exc.value.code == INVALID_ARGUMENT


def test_interpretation_facts_and_union() -> None:
    first = make_interp(P=[Interval(0, 1)])
    second = make_interp(P=[Interval(2, 2)], Q=[Interval(4, INF)])
    merged = first.union(second)
    assert list(merged.get(P)) == [Interval(0, 2)]
    assert format_interpretation(merged) == "P@[0,2] .\nQ@[4,inf) .\n"
    assert merged.restrict(lambda atom: atom.predicate == "Q") == make_interp(Q=[Interval(4, INF)])


def reference_value(interp: Interpretation, atom, t: int) -> bool:
    """Direct reading of the point semantics for atoms with bounded operator intervals."""
    if atom == TOP:
        return True
    if isinstance(atom, Unary):
        lo, hi = int(atom.interval.lo), int(atom.interval.hi)
        sign = -1 if atom.op in (BOXMINUS, DIAMONDMINUS) else 1
        values = [reference_value(interp, atom.operand, t + sign * d) for d in range(lo, hi + 1)]
        return all(values) if atom.op in (BOXMINUS, BOXPLUS) else any(values)
    if isinstance(atom, Binary):
        lo, hi = int(atom.interval.lo), int(atom.interval.hi)
        sign = -1 if atom.op == SINCE else 1
        return any(
            reference_value(interp, atom.right, t + sign * d)
            and all(reference_value(interp, atom.left, t + sign * u) for u in range(1, d))
            for d in range(lo, hi + 1)
        )
    return interp.holds(atom, t)


def test_evaluator_matches_point_semantics() -> None:
    rng = random.Random(11)
    atoms = [
        Binary(SINCE, Interval(0, 2), P, Q),
        Binary(UNTIL, Interval(0, 2), P, Q),
        Binary(SINCE, Interval(1, 3), P, Q),
        Binary(UNTIL, Interval(2, 3), Q, P),
        Unary(BOXMINUS, Interval(0, 2), P),
        Unary(DIAMONDPLUS, Interval(1, 2), Q),
        Unary(BOXPLUS, Interval(0, 1), Binary(SINCE, Interval(0, 1), P, Q)),
        Unary(DIAMONDMINUS, Interval(1, 1), Binary(UNTIL, Interval(0, 1), TOP, P)),
    ]
    for _ in range(150):
        interp = build_interpretation({atom: {t for t in range(0, 6) if rng.random() < 0.5} for atom in (P, Q)})
        values = Evaluator(interp)
        for atom in atoms:
            for t in range(-4, 10):
                assert values.value(atom, t) == reference_value(interp, atom, t), (atom, t, interp)


def test_zero_distance_since_needs_no_left_operand_now() -> None:
    interp = make_interp(P=[Interval(0, 0)])
    assert eval_metric_atom(interp, Binary(SINCE, Interval(0, 1), Q, P), 1)
    assert eval_metric_atom(interp, Binary(UNTIL, Interval(0, 1), Q, P), -1)


def test_dataset_entails_metric_atoms() -> None:
    dataset = Dataset((Fact(P, Interval(0, 1)),))
    assert dataset_entails(dataset, Unary(DIAMONDMINUS, Interval(1, 1), P), 2)
    assert not dataset_entails(dataset, Unary(DIAMONDMINUS, Interval(1, 1), P), 3)
    assert dataset_entails(dataset, Unary(BOXPLUS, Interval(0, 1), P), 0)
