from __future__ import annotations

import random
import time
from pathlib import Path

import pytest

from temporalis.buchi import LassoWord, accepts_lasso, is_empty
from temporalis.config import Settings
from temporalis.errors import (
    GUARD_EXCEEDED,
    INTERNAL_ERROR,
    INVALID_ARGUMENT,
    NOT_FORWARD_PROPAGATING,
    UNBOUNDED_DATASET,
    TemporalisError,
)
from temporalis.oracle import SearchBox, has_stable_model_oracle
from temporalis.parser import parse_dataset, parse_program
from temporalis.stablecheck import (
    AUTO,
    FP,
    GENERAL,
    KIND_B,
    KIND_F,
    ORACLE,
    StableWitness,
    WindowAutomatonSpec,
    automaton_dot,
    build_window_automaton,
    enumerate_initial_windows,
    has_stable_model,
    has_stable_model_fp,
    has_stable_model_general,
    is_tail_constant,
    least_here_column,
    resolve_mode,
    stable_context,
    triple_set,
    validate_witness,
    witness_to_interpretation,
    witness_to_json,
)
from temporalis.syntax import INF, SINCE, TOP, Binary, Dataset, Interval, is_forward_propagating, rel
from temporalis.temporal import Interpretation
from temporalis.windows import LEFT, RIGHT, fragment, total_window

FIXTURES = Path(__file__).parent / "fixtures"

P, Q, R = rel("P"), rel("Q"), rel("R")
S = Binary(SINCE, Interval(1, 1), TOP, P)

# R is derived at 1 exactly when it is absent there
ODD_AT_ONE = "R :- DIAMONDMINUS[1,1] P, not R ."


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def make_settings(**overrides: object) -> Settings:
    values = dict(
        threads=1,
        max_states=200_000,
        max_candidates=10_000,
        oracle_max_candidates=2**16,
        witness_margin=3,
        validate_witnesses=True,
        log_level="WARNING",
    )
    values.update(overrides)
    return Settings(**values)


def fix1():
    return parse_program(load_fixture("fix1.dmtl")), parse_dataset(load_fixture("fix1.dfacts"))


def make_interp(**runs: list) -> Interpretation:
    return Interpretation.from_runs({rel(name): intervals for name, intervals in runs.items()})


def test_resolve_mode() -> None:
    program, _ = fix1()
    assert resolve_mode(program, AUTO) == FP
    assert resolve_mode(parse_program(load_fixture("fix2.dmtl")), AUTO) == GENERAL
    assert resolve_mode(program, ORACLE) == ORACLE
    with pytest.raises(TemporalisError) as exc:
        resolve_mode(program, "sometimes")
    assert exc.value.code == INVALID_ARGUMENT


def test_fp_mode_reconstructs_the_unique_model() -> None:
    program, dataset = fix1()
    result = has_stable_model(program, dataset, AUTO, make_settings())
    assert result.exists
    assert result.mode == FP
    assert result.witness is not None
    assert is_tail_constant(result.witness)
    assert result.model == make_interp(P=[Interval(0, 1)], R=[Interval(1, 2)])


def test_oracle_mode_agrees() -> None:
    program, dataset = fix1()
    result = has_stable_model(program, dataset, ORACLE, make_settings())
    assert result.exists
    assert result.witness is None
    assert result.model == make_interp(P=[Interval(0, 1)], R=[Interval(1, 2)])


def test_odd_loop_has_no_model_in_either_mode() -> None:
    program = parse_program(load_fixture("fix4.dmtl"))
    assert has_stable_model_fp(program, Dataset(), make_settings()) is None
    assert has_stable_model_general(program, Dataset(), make_settings()) is None
    assert not has_stable_model(program, Dataset(), GENERAL, make_settings()).exists


def test_choice_program_has_a_model() -> None:
    program = parse_program(load_fixture("fix3.dmtl"))
    result = has_stable_model(program, Dataset(), FP, make_settings())
    assert result.exists
    assert result.model.holds(P, 0) != result.model.holds(Q, 0)


def test_general_mode_finds_a_model() -> None:
    program = parse_program("P :- Q .")
    dataset = parse_dataset("Q@0 .")
    result = has_stable_model(program, dataset, GENERAL, make_settings())
    assert result.exists
    assert result.mode == GENERAL
    assert result.model.holds(P, 0)
    assert result.model.holds(Q, 0)


def test_forward_minimality_rejects_unsupported_letters() -> None:
    program = parse_program(ODD_AT_ONE)
    dataset = parse_dataset("P@0 .")
    assert has_stable_model_fp(program, dataset, make_settings()) is None
    unchecked = has_stable_model_fp(program, dataset, make_settings(), minimality=False, validate=False)
    assert unchecked is not None


def test_unsupported_witness_fails_validation() -> None:
    program = parse_program(ODD_AT_ONE)
    dataset = parse_dataset("P@0 .")
    witness = StableWitness(
        total_window(Interval(0, 0), [{P}]),
        LassoWord((), (frozenset(),)),
        LassoWord((frozenset({R}),), (frozenset(),)),
        FP,
    )
    with pytest.raises(TemporalisError) as exc:
        validate_witness(stable_context(program, dataset), witness, make_settings())
    assert exc.value.code == INTERNAL_ERROR
    validate_witness(stable_context(program, dataset), witness, make_settings(validate_witnesses=False))


def test_fp_mode_rejects_future_operators() -> None:
    program = parse_program(load_fixture("fix2.dmtl"))
    with pytest.raises(TemporalisError) as exc:
        has_stable_model_fp(program, parse_dataset(load_fixture("fix2.dfacts")))
    assert exc.value.code == NOT_FORWARD_PROPAGATING


def test_unbounded_dataset_is_rejected() -> None:
    program, _ = fix1()
    with pytest.raises(TemporalisError) as exc:
        has_stable_model(program, parse_dataset("P@[0,inf) ."), AUTO, make_settings())
    assert exc.value.code == UNBOUNDED_DATASET


def test_initial_windows_cover_the_data() -> None:
    program, dataset = fix1()
    sc = stable_context(program, dataset)
    assert sc.rho == Interval(0, 2)
    assert sc.fp_rho == Interval(-2, -1)
    windows = enumerate_initial_windows(sc, GENERAL)
    assert windows
    assert all(P in window.there_at(0) and P in window.there_at(1) for window in windows)
    assert all(window.total for window in enumerate_initial_windows(sc, FP))


def test_least_here_column() -> None:
    program, dataset = fix1()
    context = stable_context(program, dataset).context
    window = total_window(Interval(-1, 0), [set(), {P}])
    letter = frozenset({P, S, R})
    assert least_here_column(window, letter, context, False) == frozenset({R})
    assert least_here_column(window, letter, context, True) == frozenset({P, R})
    assert least_here_column(window, frozenset({P, S, Q}), context, False) == frozenset()


def test_automaton_spec_validation() -> None:
    program, dataset = fix1()
    context = stable_context(program, dataset).context
    empty = total_window(Interval(0, 1), [set(), set()])
    with pytest.raises(TemporalisError) as exc:
        build_window_automaton(WindowAutomatonSpec("Z", RIGHT, empty, context))
    assert exc.value.code == INVALID_ARGUMENT
    with pytest.raises(TemporalisError) as exc:
        build_window_automaton(WindowAutomatonSpec(KIND_F, LEFT, empty, context))
    assert exc.value.code == INVALID_ARGUMENT
    with pytest.raises(TemporalisError) as exc:
        build_window_automaton(WindowAutomatonSpec(KIND_B, RIGHT, empty.with_flag(True), context))
    assert exc.value.code == INVALID_ARGUMENT
    fix2_context = stable_context(parse_program(load_fixture("fix2.dmtl")), Dataset()).context
    with pytest.raises(TemporalisError) as exc:
        build_window_automaton(WindowAutomatonSpec(KIND_F, RIGHT, empty, fix2_context))
    assert exc.value.code == NOT_FORWARD_PROPAGATING


def test_automaton_dot_export() -> None:
    program, dataset = fix1()
    sc = stable_context(program, dataset)
    empty = total_window(Interval(0, 1), [set(), set()])
    assert automaton_dot(sc, KIND_B, RIGHT, empty, max_states=10_000).startswith("digraph")


def test_witness_replay() -> None:
    window = total_window(Interval(0, 0), [{P}])
    witness = StableWitness(
        window,
        LassoWord((), (frozenset(),)),
        LassoWord((frozenset({Q}),), (frozenset({P}),)),
        FP,
    )
    assert is_tail_constant(witness)
    assert witness_to_interpretation(witness) == make_interp(
        P=[Interval(0, 0), Interval(2, INF)], Q=[Interval(1, 1)]
    )
    hidden = StableWitness(window, witness.left, witness.right, FP, frozenset({"Q"}))
    assert not witness_to_interpretation(hidden).get(Q)
    payload = witness_to_json(witness)
    assert payload["mode"] == FP
    assert payload["tail_constant"] is True
    assert payload["right"] == {"prefix": [["Q"]], "loop": [["P"]]}
    assert len(payload["reconstructed_facts"]) == 3


def test_triples_split_initial_windows_into_fragments() -> None:
    program, dataset = fix1()
    triples = triple_set(stable_context(program, dataset))
    assert len(triples) > 0
    assert all(triple.left.rho == Interval(0, 1) and triple.right.rho == Interval(1, 2) for triple in triples)
    assert all(P in triple.left.here_at(0) and P in triple.left.here_at(1) for triple in triples)
    assert any(not triple.b and triple.left.total and triple.right.total for triple in triples)


def test_forward_checker_agrees_with_the_oracle_on_constraints() -> None:
    cases = [
        ("P :- Q .", "Q@0 .", True),
        ("BOTTOM :- P .", "P@0 .", False),
        ("Q :- DIAMONDMINUS[1,1] P .\nBOTTOM :- Q, not P .", "P@0 .", False),
        ("Q :- DIAMONDMINUS[1,1] P .\nBOTTOM :- Q, not R .\nR :- Q .", "P@0 .", True),
    ]
    for source, data, expected in cases:
        program, dataset = parse_program(source), parse_dataset(data)
        for mode in (FP, ORACLE):
            assert has_stable_model(program, dataset, mode, make_settings()).exists is expected, (source, mode)


def timed(check) -> tuple:
    start = time.perf_counter()
    result = check()
    return result, time.perf_counter() - start


def test_forward_mode_finishes_quickly_on_fix1() -> None:
    program, dataset = fix1()
    witness, elapsed = timed(lambda: has_stable_model_fp(program, dataset, make_settings()))
    assert witness is not None
    assert witness_to_interpretation(witness, Interval(0, 2)) == make_interp(P=[Interval(0, 1)], R=[Interval(1, 2)])
    assert elapsed < 5.0


def test_general_mode_finishes_quickly_on_fix2() -> None:
    program = parse_program(load_fixture("fix2.dmtl"))
    dataset = parse_dataset(load_fixture("fix2.dfacts"))
    result, elapsed = timed(lambda: has_stable_model(program, dataset, AUTO, make_settings()))
    assert result.exists
    assert result.mode == GENERAL
    assert result.model.holds(P, 0) and result.model.holds(Q, 1)
    assert result.model.holds(R, 0) != result.model.holds(R, 1)
    assert elapsed < 5.0


@pytest.mark.parametrize("mode", [FP, GENERAL, ORACLE])
def test_odd_loop_is_refuted_quickly(mode: str) -> None:
    program = parse_program(load_fixture("fix4.dmtl"))
    result, elapsed = timed(lambda: has_stable_model(program, Dataset(), mode, make_settings()))
    assert not result.exists
    assert elapsed < 5.0


def test_transition_guard_stops_the_search() -> None:
    program, dataset = fix1()
    with pytest.raises(TemporalisError) as exc:
        has_stable_model_fp(program, dataset, make_settings(max_states=3))
    assert exc.value.code == GUARD_EXCEEDED


def test_short_and_shifted_initial_windows_give_the_same_automaton_language() -> None:
    compared = 0
    for name in ("fix1", "fix2"):
        program = parse_program(load_fixture(f"{name}.dmtl"))
        dataset = parse_dataset(load_fixture(f"{name}.dfacts"))
        sc = stable_context(program, dataset)
        context = sc.context.without_dataset()
        for window in enumerate_initial_windows(sc, GENERAL)[:3]:
            assert window.length > sc.t_pi
            for direction in (LEFT, RIGHT):
                automata = [
                    build_window_automaton(WindowAutomatonSpec(KIND_B, direction, start, context))
                    for start in (window, fragment(window, direction, sc.t_pi), window.shift(5))
                ]
                words = [is_empty(automaton, max_states=50_000) for automaton in automata]
                assert len({word is None for word in words}) == 1, (name, window, direction)
                for word in words:
                    if word is not None:
                        assert all(accepts_lasso(automaton, word) for automaton in automata), (name, direction)
                compared += 1
    assert compared >= 5


# programs whose derived atoms only depend on data around the same point: stable models are
# chosen point by point, so a model exists exactly when a tail-constant one does
FP_LITERALS = ("A", "P", "Q", "DIAMONDMINUS[1,1] A")
GENERAL_LITERALS = FP_LITERALS + ("DIAMONDPLUS[1,1] A",)


def pointwise_program(rng: random.Random, literals: tuple) -> str:
    rules = []
    for _ in range(rng.randint(1, 3)):
        head = rng.choice(("P", "Q", "BOTTOM"))
        body = [f"not {atom}" if rng.random() < 0.4 else atom for atom in rng.sample(literals, rng.randint(1, 2))]
        rules.append(f"{head} :- {', '.join(body)} .")
    return "\n".join(rules)


def pointwise_dataset(rng: random.Random) -> Dataset:
    points = [t for t in (0, 1) if rng.random() < 0.6]
    return parse_dataset(" ".join(f"A@{t} ." for t in points)) if points else Dataset()


def test_checkers_agree_with_the_oracle_on_pointwise_programs() -> None:
    rng = random.Random(11)
    settings = make_settings()
    found = 0
    for index in range(30):
        source = pointwise_program(rng, FP_LITERALS if index % 2 == 0 else GENERAL_LITERALS)
        program, dataset = parse_program(source), pointwise_dataset(rng)
        model = has_stable_model_oracle(program, dataset, SearchBox(Interval(-1, 2)), max_candidates=2**16)
        expected = model is not None
        found += expected
        assert (has_stable_model_general(program, dataset, settings) is not None) is expected, source
        if is_forward_propagating(program):
            assert (has_stable_model_fp(program, dataset, settings) is not None) is expected, source
    assert 0 < found < 30
