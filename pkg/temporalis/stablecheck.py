"""Deciding stable model existence with window automata.

The timeline is cut at an initial window over the data. Automata read the rest of the
there-interpretation one column at a time, leftwards and rightwards, and a candidate is stable
when both sides are accepted by the B-automata while no here-interpretation below it survives
on both sides at once.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .buchi import (
    GNBA,
    LassoWord,
    accepting_components,
    complement,
    component_hits,
    component_lasso,
    explore,
    family_ranges,
    intersect_all,
    is_empty,
    to_dot,
)
from .config import Settings, default_settings
from .errors import (
    GUARD_EXCEEDED,
    INTERNAL_ERROR,
    INVALID_ARGUMENT,
    NOT_FORWARD_PROPAGATING,
    UNBOUNDED_DATASET,
    temporalis_error,
)
from .normalize import NormalizationReport, normalize
from .oracle import SearchBox, check_stable_witness, has_stable_model_oracle
from .syntax import (
    BOXMINUS,
    INF,
    SINCE,
    Binary,
    Bottom,
    Dataset,
    Interval,
    MetricAtom,
    Program,
    Rel,
    Top,
    Unary,
    atom_key,
    atom_universe,
    format_fact,
    ground_program,
    is_forward_propagating,
)
from .temporal import Interpretation
from .windows import (
    LEFT,
    RIGHT,
    Column,
    Window,
    WindowContext,
    canonicalize,
    enumerate_here_layers,
    enumerate_total_windows,
    fragment,
    next_here_columns,
    next_there_columns,
    relational_part,
    slide,
    validate_window,
    window_context,
    window_to_json,
)

logger = logging.getLogger(__name__)

KIND_A = "A"
KIND_B = "B"
KIND_C = "C"
KIND_F = "F"
KINDS = (KIND_A, KIND_B, KIND_C, KIND_F)

GENERAL = "general"
FP = "fp"
ORACLE = "oracle"
AUTO = "auto"
MODES = (AUTO, FP, GENERAL, ORACLE)


@dataclass(frozen=True)
class WindowAutomatonSpec:
    """Which window automaton to build.

    A tracks here-layers under the letters, B fixes here = there, C is A with the extra
    requirement that the layers end up differing, F is the deterministic forward automaton
    of a forward-propagating program. ``minimality`` switches off F's least-here restriction.
    ``max_states`` caps the transitions worked out over the context, across automata.
    """

    kind: str
    direction: str
    initial: Window
    context: WindowContext
    minimality: bool = True
    anchor_limit: Optional[int] = None
    max_candidates: Optional[int] = None
    max_states: Optional[int] = None


@dataclass(frozen=True)
class StableWitness:
    initial_window: Window
    left: LassoWord
    right: LassoWord
    mode: str
    hidden: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class Triple:
    left: Window
    right: Window
    b: bool


@dataclass(frozen=True)
class TripleSet:
    triples: Tuple[Triple, ...] = ()

    def __iter__(self):
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)


@dataclass(frozen=True)
class StableContext:
    """A program and dataset prepared for the automata: grounded, normalised, windowed."""

    program: Program
    dataset: Dataset
    report: NormalizationReport
    context: WindowContext

    @property
    def normalized(self) -> Program:
        return self.report.output

    @property
    def t_pi(self) -> int:
        return self.context.t_pi

    @property
    def rho(self) -> Interval:
        return Interval(self.dataset.t_min, self.dataset.t_max + self.t_pi)

    @property
    def fp_rho(self) -> Interval:
        return Interval(self.dataset.t_min - self.t_pi - 1, self.dataset.t_min - 1)

    @property
    def hidden(self) -> FrozenSet[str]:
        return frozenset(self.report.fresh_predicates)

    def vocabulary(self) -> FrozenSet[Rel]:
        """Relational atoms built from the program's own predicates and constants."""
        predicates = self.program.predicates | self.hidden
        constants = self.program.constants
        return frozenset(
            atom
            for atom in self.context.relational
            if atom.predicate in predicates and all(term in constants for term in atom.terms)
        )


@dataclass(frozen=True)
class ExistenceResult:
    exists: bool
    mode: str
    witness: Optional[StableWitness] = None
    model: Optional[Interpretation] = None


def stable_context(program: Program, dataset: Dataset) -> StableContext:
    if not dataset.bounded:
        raise temporalis_error(UNBOUNDED_DATASET, "stable model checking needs a dataset without unbounded intervals")
    report = normalize(ground_program(program, dataset))
    normal = report.output
    universe = atom_universe(normal, dataset)
    context = window_context(normal, dataset, universe, max(normal.t_pi, 1))
    logger.debug(
        "stable context",
        extra={"rules": len(normal), "atoms": len(context.atoms), "t_pi": context.t_pi},
    )
    return StableContext(program, dataset, report, context)


# window automata


def _holds_in(atom: MetricAtom, column: Column) -> bool:
    if isinstance(atom, Top):
        return True
    if isinstance(atom, Bottom):
        return False
    return atom in column


def _acceptance_sets(context: WindowContext, direction: str) -> List[Callable]:
    """For each [0,inf) atom looking ahead, the newest column must infinitely often fulfil it."""
    sets = []
    for atom in context.acceptance_atoms(direction):
        if isinstance(atom, Unary):
            def fulfilled(column: Column, atom: Unary = atom) -> bool:
                return atom in column or not _holds_in(atom.operand, column)
        else:
            def fulfilled(column: Column, atom: Binary = atom) -> bool:
                return atom not in column or _holds_in(atom.right, column)
        sets.append(fulfilled)
    return sets


class _WindowAutomaton:
    """Successors come from the context's shared cache, so automata over the same context reuse
    each other's transitions."""

    def __init__(self, spec: WindowAutomatonSpec) -> None:
        self.spec = spec
        self.context = spec.context
        self.direction = spec.direction
        self.cache = spec.context.cache

    def _newest(self, window: Window, layer_here: bool) -> Column:
        columns = window.here if layer_here else window.there
        return columns[-1] if self.direction == RIGHT else columns[0]

    def automaton(self) -> GNBA:
        spec = self.spec
        sets = _acceptance_sets(self.context, self.direction)
        accepting: List[Callable] = []
        if spec.kind == KIND_F:
            accepting = [self._lift_f(check) for check in sets]
            initial = (self._f_state(spec.initial),)
            step, letters = self._f_step, self._f_letters
        else:
            initial = (canonicalize(spec.initial)[0],)
            accepting = [self._lift(check, here=False) for check in sets]
            if spec.kind in (KIND_A, KIND_C):
                accepting += [self._lift(check, here=True) for check in sets]
            if spec.kind == KIND_C:
                accepting.append(lambda state: state.b)
            step = self._b_step if spec.kind == KIND_B else self._a_step
            letters = self._letters_of
        weak = not sets
        name = f"{spec.kind}{'<-' if self.direction == LEFT else '->'}"
        return GNBA(initial, step, letters, tuple(accepting), weak=weak, name=name)

    def _lift(self, check: Callable, here: bool) -> Callable:
        return lambda state: check(self._newest(state, here))

    def _lift_f(self, check: Callable) -> Callable:
        return lambda state: check(self._newest(state[1], False))

    def _charge(self) -> None:
        self.cache.computed += 1
        limit = self.spec.max_states
        if limit is not None and self.cache.computed > limit:
            raise temporalis_error(GUARD_EXCEEDED, f"more than {limit} window transitions computed")

    def _letters_of(self, state: Window) -> List[Column]:
        return next_there_columns(state, self.context, self.direction, limit=self.spec.max_candidates)

    def _b_step(self, state: Window, letter: Column) -> List[Window]:
        # the letters of a state are exactly the columns keeping the total window valid
        key = (KIND_B, self.direction, state, letter)
        cached = self.cache.steps.get(key)
        if cached is None:
            self._charge()
            cached = []
            if letter in self._letters_of(state):
                cached.append(canonicalize(slide(state, self.direction, letter, letter, False))[0])
            self.cache.steps[key] = cached
        return cached

    def _a_step(self, state: Window, letter: Column) -> List[Window]:
        key = (KIND_A, self.direction, state, letter)
        cached = self.cache.steps.get(key)
        if cached is None:
            self._charge()
            cached = []
            for here in next_here_columns(state, self.context, self.direction, letter, limit=self.spec.max_candidates):
                b = state.b or here != letter
                cached.append(canonicalize(slide(state, self.direction, here, letter, b))[0])
            self.cache.steps[key] = cached
        return cached

    # forward automaton: states are (anchored, window); anchored windows keep absolute times so
    # that the data applies, the rest are canonical

    def _f_state(self, window: Window) -> Tuple[bool, Window]:
        limit = self.spec.anchor_limit
        if limit is not None and window.lo <= limit:
            return True, window
        return False, canonicalize(window)[0]

    def _f_context(self, anchored: bool) -> WindowContext:
        return self.context if anchored else self.context.without_dataset()

    def _f_letters(self, state: Tuple[bool, Window]) -> List[Column]:
        anchored, window = state
        return next_there_columns(window, self._f_context(anchored), RIGHT, limit=self.spec.max_candidates)

    def _f_step(self, state: Tuple[bool, Window], letter: Column) -> List[Tuple[bool, Window]]:
        key = (KIND_F, self.spec.minimality, self.spec.anchor_limit, state, letter)
        cached = self.cache.steps.get(key)
        if cached is None:
            self._charge()
            anchored, window = state
            cached = []
            if letter in self._f_letters(state) and (
                not self.spec.minimality
                or least_here_column(window, letter, self._f_context(anchored), anchored) == relational_part(letter)
            ):
                cached.append(self._f_state(slide(window, RIGHT, letter, letter, False)))
            self.cache.steps[key] = cached
        return cached


def _past_value(atom: MetricAtom, t: int, window: Window, current: FrozenSet[Rel]) -> bool:
    """Value at the new point ``t`` of a flat past atom, from earlier columns and the new
    relational atoms."""

    def holds(operand: MetricAtom, s: int) -> bool:
        if isinstance(operand, Top):
            return True
        if isinstance(operand, Bottom):
            return False
        if s == t:
            return operand in current
        return operand in window.there_at(s)

    if isinstance(atom, Unary) and atom.op == BOXMINUS:
        if atom.interval.hi == INF:
            return holds(atom.operand, t) and atom in window.there_at(t - 1)
        return all(holds(atom.operand, t - s) for s in range(int(atom.interval.lo), int(atom.interval.hi) + 1))
    if isinstance(atom, Binary) and atom.op == SINCE:
        if atom.interval.hi == INF:
            return (
                holds(atom.right, t)
                or holds(atom.right, t - 1)
                or (holds(atom.left, t - 1) and atom in window.there_at(t - 1))
            )
        return any(
            holds(atom.right, t - s) and all(holds(atom.left, u) for u in range(t - s + 1, t))
            for s in range(int(atom.interval.lo), int(atom.interval.hi) + 1)
        )
    raise temporalis_error(NOT_FORWARD_PROPAGATING, f"{atom} is not a flat past atom")


def least_here_column(window: Window, letter: Column, context: WindowContext, with_data: bool) -> FrozenSet[Rel]:
    """Least relational here-column after a total window, with negation read from ``letter``."""
    t = window.hi + 1
    current = set()
    evaluator = context.data_evaluator if with_data else None
    if evaluator is not None:
        current.update(atom for atom in context.relational if evaluator.value(atom, t))
    compound = [atom for atom in context.atoms if not isinstance(atom, Rel)]
    while True:
        frozen = frozenset(current)
        values = {atom for atom in compound if _past_value(atom, t, window, frozen)}

        def holds(atom: MetricAtom) -> bool:
            if isinstance(atom, Top):
                return True
            if isinstance(atom, Bottom):
                return False
            return atom in frozen or atom in values

        derived = {
            rule.head
            for rule in context.rules
            if isinstance(rule.head, Rel)
            and all(holds(atom) for atom in rule.positive)
            and not any(_holds_in(atom, letter) for atom in rule.negative)
        }
        if derived <= current:
            return frozen
        current |= derived


def build_window_automaton(spec: WindowAutomatonSpec) -> GNBA:
    if spec.kind not in KINDS:
        raise temporalis_error(INVALID_ARGUMENT, f"unknown automaton kind {spec.kind!r}")
    if spec.direction not in (LEFT, RIGHT):
        raise temporalis_error(INVALID_ARGUMENT, f"unknown direction {spec.direction!r}")
    if spec.initial.length < spec.context.t_pi:
        raise temporalis_error(INVALID_ARGUMENT, f"initial window {spec.initial.rho} is shorter than t_pi")
    if spec.kind == KIND_B and (not spec.initial.total or spec.initial.b):
        raise temporalis_error(INVALID_ARGUMENT, "a B-automaton starts from a window with here = there and b = 0")
    if spec.kind == KIND_F:
        if spec.direction != RIGHT:
            raise temporalis_error(INVALID_ARGUMENT, "the forward automaton reads rightwards")
        if not spec.initial.total:
            raise temporalis_error(INVALID_ARGUMENT, "the forward automaton starts from a window with here = there")
        if not is_forward_propagating(Program(spec.context.rules)):
            raise temporalis_error(NOT_FORWARD_PROPAGATING, "the forward automaton needs a forward-propagating program")
    check = validate_window(spec.initial, spec.context if spec.kind == KIND_F else spec.context.without_dataset())
    if not check:
        raise temporalis_error(INVALID_ARGUMENT, f"initial window is not locally satisfying: {check.reason}")
    return _WindowAutomaton(spec).automaton()


def _automaton(kind: str, direction: str, window: Window, context: WindowContext, settings: Settings) -> GNBA:
    return build_window_automaton(
        WindowAutomatonSpec(
            kind,
            direction,
            window,
            context,
            max_candidates=settings.max_candidates,
            max_states=settings.max_states,
        )
    )


def _union_automaton(kind: str, direction: str, windows: Sequence[Window], context: WindowContext, settings: Settings) -> GNBA:
    """One automaton started from every window of ``windows``: it accepts what any of them accepts."""
    first = _automaton(kind, direction, windows[0], context, settings)
    return replace(first, initial=tuple(dict.fromkeys(canonicalize(window)[0] for window in windows)))


# initial windows and triples


def enumerate_initial_windows(sc: StableContext, mode: str = GENERAL, *, limit: Optional[int] = None) -> List[Window]:
    """Total candidate windows in canonical order: over the data span plus t_pi in general mode,
    or over the t_pi + 1 points left of the data, in the program's own vocabulary, in fp mode."""
    if mode == GENERAL:
        return enumerate_total_windows(sc.context, sc.rho, limit=limit)
    if mode == FP:
        return enumerate_total_windows(sc.context.with_allowed(sc.vocabulary()), sc.fp_rho, limit=limit)
    raise temporalis_error(INVALID_ARGUMENT, f"unknown mode {mode!r}")


def triples_for(sc: StableContext, there: Window, *, limit: Optional[int] = None) -> TripleSet:
    """Fragments and flags of every window with the there-layer of ``there`` whose here-layer
    contains the data."""
    seen: Dict[Triple, None] = {}
    for window in enumerate_here_layers(sc.context, there, limit=limit):
        triple = Triple(
            fragment(window, LEFT, sc.t_pi),
            fragment(window, RIGHT, sc.t_pi),
            not window.total,
        )
        seen.setdefault(triple)
    return TripleSet(tuple(seen))


def triple_set(sc: StableContext, *, limit: Optional[int] = None) -> TripleSet:
    seen: Dict[Triple, None] = {}
    for there in enumerate_initial_windows(sc, GENERAL, limit=limit):
        for triple in triples_for(sc, there, limit=limit):
            seen.setdefault(triple)
    return TripleSet(tuple(seen))


# general mode


@dataclass(frozen=True)
class _Profile:
    component: frozenset
    rejected_a: FrozenSet[Window]
    rejected_c: FrozenSet[Window]


class _Side:
    """One side of a candidate: B-runs from the fragment paired with complements of the A- and
    C-automata of every triple fragment on that side."""

    def __init__(
        self,
        direction: str,
        start: Window,
        a_fragments: Sequence[Window],
        c_fragments: Sequence[Window],
        context: WindowContext,
        settings: Settings,
    ) -> None:
        automata = [_automaton(KIND_B, direction, start, context, settings)]
        automata += [complement(_automaton(KIND_A, direction, f, context, settings), settings.max_states) for f in a_fragments]
        automata += [
            complement(_automaton(KIND_C, direction, f.with_flag(False), context, settings), settings.max_states)
            for f in c_fragments
        ]
        ranges = family_ranges(automata)
        self.graph = explore(intersect_all(automata), settings.max_states)
        self.ranges = ranges
        b_sets = ranges[0]
        a_ranges = dict(zip(a_fragments, ranges[1 : 1 + len(a_fragments)]))
        c_ranges = dict(zip(c_fragments, ranges[1 + len(a_fragments) :]))
        self.a_ranges = a_ranges
        self.c_ranges = c_ranges
        self.profiles: List[_Profile] = []
        for component in accepting_components(self.graph):
            hits = component_hits(self.graph, component)
            if not all(hits[index] for index in b_sets):
                continue
            self.profiles.append(
                _Profile(
                    frozenset(component),
                    frozenset(f for f, indices in a_ranges.items() if all(hits[i] for i in indices)),
                    frozenset(f for f, indices in c_ranges.items() if all(hits[i] for i in indices)),
                )
            )

    def lasso(self, profile: _Profile) -> LassoWord:
        required = list(self.ranges[0])
        for f in sorted(profile.rejected_a, key=Window.sort_key):
            required.extend(self.a_ranges[f])
        for f in sorted(profile.rejected_c, key=Window.sort_key):
            required.extend(self.c_ranges[f])
        return component_lasso(self.graph, set(profile.component), required)


@lru_cache(maxsize=256)
def _side(
    direction: str,
    start: Window,
    a_fragments: Tuple[Window, ...],
    c_fragments: Tuple[Window, ...],
    context: WindowContext,
    settings: Settings,
) -> _Side:
    # candidates sharing an edge fragment and its triples share the side
    return _Side(direction, start, a_fragments, c_fragments, context, settings)


def _stable_pair(triples: TripleSet, left: _Profile, right: _Profile) -> bool:
    for triple in triples:
        not_a_left = triple.left in left.rejected_a
        not_a_right = triple.right in right.rejected_a
        if triple.b:
            if not (not_a_left or not_a_right):
                return False
            continue
        not_c_left = triple.left in left.rejected_c
        not_c_right = triple.right in right.rejected_c
        if not ((not_c_left or not_a_right) and (not_a_left or not_c_right)):
            return False
    return True


def _general_candidate(sc: StableContext, there: Window, settings: Settings) -> Optional[StableWitness]:
    triples = triples_for(sc, there, limit=settings.max_candidates)
    if not triples:
        return None
    context = sc.context.without_dataset()
    sides = {}
    for direction, pick in ((LEFT, lambda triple: triple.left), (RIGHT, lambda triple: triple.right)):
        a_fragments = list(dict.fromkeys(pick(triple) for triple in triples))
        c_fragments = list(dict.fromkeys(pick(triple) for triple in triples if not triple.b))
        start = fragment(there, direction, sc.t_pi)
        side = _side(direction, start, tuple(a_fragments), tuple(c_fragments), context, settings)
        if not side.profiles:
            return None
        sides[direction] = side
    for left in sides[LEFT].profiles:
        for right in sides[RIGHT].profiles:
            if _stable_pair(triples, left, right):
                return StableWitness(
                    there,
                    sides[LEFT].lasso(left),
                    sides[RIGHT].lasso(right),
                    GENERAL,
                    sc.hidden,
                )
    return None


def _first_in_order(candidates: Sequence[Window], check: Callable[[Window], Optional[StableWitness]], threads: int):
    if threads <= 1 or len(candidates) <= 1:
        for candidate in candidates:
            found = check(candidate)
            if found is not None:
                return found
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(candidates), threads):
            batch = candidates[start : start + threads]
            for found in pool.map(check, batch):
                if found is not None:
                    return found
    return None


def has_stable_model_general(
    program: Program, dataset: Dataset, settings: Optional[Settings] = None
) -> Optional[StableWitness]:
    settings = settings or default_settings()
    sc = stable_context(program, dataset)
    candidates = enumerate_initial_windows(sc, GENERAL, limit=settings.max_candidates)
    logger.debug("general check", extra={"candidates": len(candidates), "rho": str(sc.rho)})
    witness = _first_in_order(candidates, lambda there: _general_candidate(sc, there, settings), settings.threads)
    if witness is not None:
        validate_witness(sc, witness, settings)
    return witness


# forward-propagating mode


@lru_cache(maxsize=256)
def _fp_left_word(context: WindowContext, window: Window, settings: Settings) -> Optional[LassoWord]:
    """A leftward word accepted by B from ``window`` and by no C-automaton from a window below it.

    The C-automata only differ in their initial window, so a single automaton started from all
    of them is complemented once.
    """
    lowers = enumerate_here_layers(context, window, limit=settings.max_candidates)
    automata = [
        _automaton(KIND_B, LEFT, window, context, settings),
        complement(_union_automaton(KIND_C, LEFT, lowers, context, settings), settings.max_states),
    ]
    return is_empty(intersect_all(automata), settings.max_states)


def forward_automaton(sc: StableContext, window: Window, *, minimality: bool = True, settings: Optional[Settings] = None) -> GNBA:
    settings = settings or default_settings()
    return build_window_automaton(
        WindowAutomatonSpec(
            KIND_F,
            RIGHT,
            window,
            sc.context,
            minimality=minimality,
            anchor_limit=sc.dataset.t_max + sc.t_pi,
            max_candidates=settings.max_candidates,
            max_states=settings.max_states,
        )
    )


def _fp_candidate(sc: StableContext, window: Window, settings: Settings, minimality: bool) -> Optional[StableWitness]:
    left_context = sc.context.without_dataset().with_allowed(sc.vocabulary())
    left = _fp_left_word(left_context, canonicalize(window)[0], settings)
    if left is None:
        return None
    right = is_empty(forward_automaton(sc, window, minimality=minimality, settings=settings), settings.max_states)
    if right is None:
        return None
    return StableWitness(window, left, right, FP, sc.hidden)


def has_stable_model_fp(
    program: Program,
    dataset: Dataset,
    settings: Optional[Settings] = None,
    *,
    minimality: bool = True,
    validate: bool = True,
) -> Optional[StableWitness]:
    settings = settings or default_settings()
    if not is_forward_propagating(program):
        raise temporalis_error(
            NOT_FORWARD_PROPAGATING,
            "the program uses a future operator in a body or a past box in a head",
        )
    sc = stable_context(program, dataset)
    candidates = enumerate_initial_windows(sc, FP, limit=settings.max_candidates)
    logger.debug("fp check", extra={"candidates": len(candidates), "rho": str(sc.fp_rho)})
    witness = _first_in_order(
        candidates, lambda window: _fp_candidate(sc, window, settings, minimality), settings.threads
    )
    if witness is not None and validate:
        validate_witness(sc, witness, settings)
    return witness


# witnesses


def witness_column(witness: StableWitness, t: int) -> Column:
    window = witness.initial_window
    if window.rho.contains(t):
        return window.there_at(t)
    if t > window.hi:
        return witness.right.letter(t - window.hi - 1)
    return witness.left.letter(window.lo - 1 - t)


def _constant_loop(word: LassoWord) -> Optional[FrozenSet[Rel]]:
    parts = {relational_part(letter) for letter in word.loop}
    return next(iter(parts)) if len(parts) == 1 else None


def is_tail_constant(witness: StableWitness) -> bool:
    return _constant_loop(witness.left) is not None and _constant_loop(witness.right) is not None


def witness_to_interpretation(witness: StableWitness, horizon: Optional[Interval] = None) -> Interpretation:
    """Relational atoms of the there-columns, replayed outward from the initial window.

    Relationally constant loops become infinite tails; other loops are cut at the horizon.
    """
    window = witness.initial_window
    lo = window.lo - len(witness.left)
    hi = window.hi + len(witness.right)
    if horizon is not None:
        lo = min(lo, int(horizon.lo))
        hi = max(hi, int(horizon.hi))
    runs: Dict[Rel, List[Interval]] = {}
    for t in range(lo, hi + 1):
        for atom in relational_part(witness_column(witness, t)):
            if atom.predicate not in witness.hidden:
                runs.setdefault(atom, []).append(Interval.point(t))
    left_tail = _constant_loop(witness.left)
    right_tail = _constant_loop(witness.right)
    for atom in left_tail or ():
        if atom.predicate not in witness.hidden:
            runs.setdefault(atom, []).append(Interval(-INF, lo - 1))
    for atom in right_tail or ():
        if atom.predicate not in witness.hidden:
            runs.setdefault(atom, []).append(Interval(hi + 1, INF))
    return Interpretation.from_runs(runs)


def validation_horizon(sc: StableContext, margin: int = 3) -> Interval:
    return Interval(sc.dataset.t_min - margin * sc.t_pi, sc.dataset.t_max + margin * sc.t_pi)


def validate_witness(sc: StableContext, witness: StableWitness, settings: Settings) -> None:
    """Replay the witness and check it with the oracle; a failure is a bug, not an answer."""
    if not settings.validate_witnesses:
        return
    if not is_tail_constant(witness):
        logger.warning("periodic witness not validated", extra={"mode": witness.mode})
        return
    horizon = validation_horizon(sc, settings.witness_margin)
    interp = witness_to_interpretation(witness, horizon)
    if not check_stable_witness(sc.program, sc.dataset, interp, SearchBox(horizon)):
        raise temporalis_error(
            INTERNAL_ERROR,
            f"{witness.mode} witness failed validation: {interp}",
        )


def _letter_json(letter: Column) -> List[str]:
    return sorted(atom_key(atom) for atom in letter)


def witness_to_json(witness: StableWitness, horizon: Optional[Interval] = None) -> Dict[str, Any]:
    interp = witness_to_interpretation(witness, horizon)
    return {
        "mode": witness.mode,
        "initial_window": window_to_json(witness.initial_window),
        "left": {
            "prefix": [_letter_json(letter) for letter in witness.left.prefix],
            "loop": [_letter_json(letter) for letter in witness.left.loop],
        },
        "right": {
            "prefix": [_letter_json(letter) for letter in witness.right.prefix],
            "loop": [_letter_json(letter) for letter in witness.right.loop],
        },
        "reconstructed_facts": [format_fact(fact) for fact in interp.to_facts()],
        "tail_constant": is_tail_constant(witness),
    }


def resolve_mode(program: Program, mode: str) -> str:
    if mode not in MODES:
        raise temporalis_error(INVALID_ARGUMENT, f"unknown mode {mode!r}, expected one of {', '.join(MODES)}")
    if mode == AUTO:
        return FP if is_forward_propagating(program) else GENERAL
    return mode


def has_stable_model(
    program: Program,
    dataset: Dataset,
    mode: str = AUTO,
    settings: Optional[Settings] = None,
) -> ExistenceResult:
    settings = settings or default_settings()
    mode = resolve_mode(program, mode)
    if mode == ORACLE:
        model = has_stable_model_oracle(
            program, dataset, max_candidates=settings.oracle_max_candidates, threads=settings.threads
        )
        return ExistenceResult(model is not None, ORACLE, model=model)
    if mode == FP:
        witness = has_stable_model_fp(program, dataset, settings)
    else:
        witness = has_stable_model_general(program, dataset, settings)
    if witness is None:
        return ExistenceResult(False, mode)
    horizon = Interval(dataset.t_min, dataset.t_max)
    return ExistenceResult(True, mode, witness, witness_to_interpretation(witness, horizon))


def automaton_dot(sc: StableContext, kind: str, direction: str, window: Window, *, max_states: int = 500) -> str:
    """DOT source of a window automaton's reachable part."""
    context = sc.context if kind == KIND_F else sc.context.without_dataset()
    spec = WindowAutomatonSpec(kind, direction, window, context, anchor_limit=sc.dataset.t_max + sc.t_pi)
    return to_dot(build_window_automaton(spec), max_states)
