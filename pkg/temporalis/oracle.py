"""HT-model checking, the least-here fixpoint and a brute-force stable model oracle.

The oracle searches tail-constant interpretations: every atom gets a truth pattern inside
a bounded box plus one constant value on each side of it.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import (
    GUARD_EXCEEDED,
    INCONSISTENT,
    INVALID_ARGUMENT,
    STABILIZATION_FAILED,
    UNBOUNDED_DATASET,
    TemporalisError,
    temporalis_error,
)
from .syntax import (
    BOXMINUS,
    Bottom,
    Dataset,
    Interval,
    MetricAtom,
    Program,
    Rel,
    Rule,
    Top,
    Unary,
    atom_key,
    ground,
    reach,
)
from .temporal import Evaluator, Interpretation, format_interpretation

logger = logging.getLogger(__name__)

RIGHT = "right"
LEFT = "left"
MAX_WIDENINGS = 3
MAX_BOUND_ROUNDS = 16


@dataclass(frozen=True)
class HTInterpretation:
    here: Interpretation
    there: Interpretation

    def __post_init__(self) -> None:
        if not self.here.issubset(self.there):
            raise temporalis_error(INVALID_ARGUMENT, "here must be contained in there")


@dataclass(frozen=True)
class SearchBox:
    window: Interval
    atoms: Tuple[Rel, ...] = ()

    def __post_init__(self) -> None:
        if not self.window.bounded:
            raise temporalis_error(INVALID_ARGUMENT, f"search box {self.window} must be bounded")


@dataclass(frozen=True)
class HeadShape:
    """A rule head as a base atom plus the range of offsets its boxes cover."""

    base: MetricAtom
    lo: float
    hi: float


def head_shape(head: MetricAtom) -> HeadShape:
    lo: float = 0
    hi: float = 0
    while isinstance(head, Unary):
        interval = head.interval
        if head.op == BOXMINUS:
            lo, hi = lo - interval.hi, hi - interval.lo
        else:
            lo, hi = lo + interval.lo, hi + interval.hi
        head = head.operand
    return HeadShape(head, lo, hi)


def fires(rule: Rule, t: int, positive: Evaluator, negative: Evaluator) -> bool:
    return all(positive.value(atom, t) for atom in rule.positive) and not any(
        negative.value(atom, t) for atom in rule.negative
    )


def _rule_holds(rule: Rule, t: int, positive: Evaluator, negative: Evaluator) -> bool:
    if not fires(rule, t, positive, negative):
        return True
    return positive.value(rule.head, t)


def ht_holds_at(ht: HTInterpretation, rule: Rule, t: int) -> bool:
    """Both HT conditions for one ground rule at one time point."""
    here = Evaluator(ht.here)
    there = Evaluator(ht.there)
    return _rule_holds(rule, t, here, there) and _rule_holds(rule, t, there, there)


def is_ht_model(ht: HTInterpretation, rules: Sequence[Rule], frame: Interval) -> bool:
    here = Evaluator(ht.here)
    there = Evaluator(ht.there)
    return all(
        _rule_holds(rule, t, here, there) and _rule_holds(rule, t, there, there)
        for rule in rules
        for t in frame.points()
    )


def head_atoms(rules: Iterable[Rule]) -> List[Rel]:
    atoms = {head_shape(rule.head).base for rule in rules}
    return sorted((atom for atom in atoms if isinstance(atom, Rel)), key=atom_key)


def check_frame(rules: Sequence[Rule], window: Interval, t_pi: int) -> Interval:
    """Points at which checking the rules covers the whole timeline.

    Any interpretation constant outside ``window`` makes every rule atom constant outside the
    returned frame.
    """
    deepest = max((reach(atom) for rule in rules for atom in rule.atoms()), default=0)
    margin = max(t_pi, deepest) + 2
    blank = Evaluator(Interpretation.from_runs({}))
    base_lo, base_hi = window.lo - 2, window.hi + 2
    for _ in range(MAX_WIDENINGS + 1):
        frame = Interval(window.lo - margin, window.hi + margin)
        if all(_settles(blank, atom, base_lo, base_hi, frame) for rule in rules for atom in rule.atoms()):
            return frame
        margin += t_pi
    raise temporalis_error(
        STABILIZATION_FAILED,
        f"atom values do not settle within {margin} points of the box {window}",
    )


def _settles(blank: Evaluator, atom: MetricAtom, base_lo: int, base_hi: int, frame: Interval) -> bool:
    lc, rc = blank.bounds(atom)
    # bounds of the empty interpretation are relative to (-1, 1)
    return frame.lo <= base_lo + (lc + 1) and base_hi + (rc - 1) <= frame.hi


@dataclass
class Layer:
    """Mutable tail-constant interpretation: explicit points inside a window and two tails."""

    window: Interval
    points: Dict[Rel, Set[int]] = field(default_factory=dict)
    left: Set[Rel] = field(default_factory=set)
    right: Set[Rel] = field(default_factory=set)

    @classmethod
    def from_interpretation(cls, interp: Interpretation, window: Interval) -> "Layer":
        layer = cls(window)
        for atom, runs in interp.items():
            for run in runs:
                layer.add_range(atom, run.lo, run.hi)
        return layer

    def copy(self) -> "Layer":
        return Layer(
            self.window,
            {atom: set(points) for atom, points in self.points.items()},
            set(self.left),
            set(self.right),
        )

    def tails(self, side: str) -> Set[Rel]:
        return self.right if side == RIGHT else self.left

    def add_range(self, atom: Rel, lo: float, hi: float) -> bool:
        window = self.window
        changed = False
        start = max(lo, window.lo)
        stop = min(hi, window.hi)
        if start <= stop:
            points = self.points.setdefault(atom, set())
            before = len(points)
            points.update(range(int(start), int(stop) + 1))
            changed = len(points) != before
        if math.isinf(lo) and hi >= window.lo - 1 and atom not in self.left:
            self.left.add(atom)
            changed = True
        if math.isinf(hi) and lo <= window.hi + 1 and atom not in self.right:
            self.right.add(atom)
            changed = True
        return changed

    def runs(self) -> Dict[Rel, List[Interval]]:
        runs: Dict[Rel, List[Interval]] = {}
        for atom, points in self.points.items():
            runs.setdefault(atom, []).extend(Interval.point(t) for t in points)
        for atom in self.left:
            runs.setdefault(atom, []).append(Interval(-math.inf, self.window.lo - 1))
        for atom in self.right:
            runs.setdefault(atom, []).append(Interval(self.window.hi + 1, math.inf))
        return runs

    def interpretation(self, extra: Optional[Dict[Rel, List[Interval]]] = None) -> Interpretation:
        runs = self.runs()
        for atom, intervals in (extra or {}).items():
            runs.setdefault(atom, []).extend(intervals)
        return Interpretation.from_runs(runs)


class _Saturation:
    """Least fixpoint of the rules with negation read in a fixed interpretation."""

    def __init__(
        self,
        rules: Sequence[Rule],
        negative: Interpretation,
        frame: Interval,
        candidates: Optional[Interpretation] = None,
        strict: bool = True,
    ) -> None:
        self._rules = list(rules)
        self._shapes = [head_shape(rule.head) for rule in self._rules]
        self._negative = Evaluator(negative)
        self._frame = frame
        self._candidates = candidates
        self._strict = strict
        spans = [abs(value) for shape in self._shapes for value in (shape.lo, shape.hi) if not math.isinf(value)]
        self._span = max(spans, default=0)

    def run(self, layer: Layer) -> Layer:
        while True:
            changed = self._frame_pass(layer)
            if self._candidates is not None:
                changed = self._tail_pass(layer, RIGHT) or changed
                changed = self._tail_pass(layer, LEFT) or changed
            if not changed:
                return layer

    def _frame_pass(self, layer: Layer) -> bool:
        changed_any = False
        while True:
            current = Evaluator(layer.interpretation())
            changed = False
            for rule, shape in zip(self._rules, self._shapes):
                if isinstance(shape.base, Top):
                    continue
                for t in self._frame.points():
                    if not fires(rule, t, current, self._negative):
                        continue
                    if isinstance(shape.base, Bottom):
                        if self._strict:
                            raise temporalis_error(
                                INCONSISTENT,
                                f"rule {rule} derives BOTTOM at {t}",
                            )
                        continue
                    changed = layer.add_range(shape.base, t + shape.lo, t + shape.hi) or changed
            if not changed:
                return changed_any
            changed_any = True

    def _representatives(self, layer: Layer, side: str) -> range:
        extent = int(self._span) + 1
        if side == RIGHT:
            return range(layer.window.hi + 1, self._frame.hi + extent + 1)
        return range(layer.window.lo - 1, self._frame.lo - extent - 1, -1)

    def _tail_pass(self, layer: Layer, side: str) -> bool:
        candidates = self._candidates
        pending = {
            atom
            for atom in head_atoms(self._rules)
            if atom not in layer.tails(side)
            and (candidates.get(atom).right_tail if side == RIGHT else candidates.get(atom).left_tail)
        }
        if not pending:
            return False
        while pending:
            survived = set(pending)
            for t in self._representatives(layer, side):
                survived &= self._closure_at(layer, pending, t, side)
                if not survived:
                    break
            if survived == pending:
                break
            pending = survived
        if not pending:
            return False
        layer.tails(side).update(pending)
        return True

    def _closure_at(self, layer: Layer, assumed: Set[Rel], t: int, side: str) -> Set[Rel]:
        """Atoms derivable at t when the assumed tail atoms hold between the window and t."""
        if side == RIGHT:
            between = Interval(layer.window.hi + 1, t - 1) if t - 1 >= layer.window.hi + 1 else None
        else:
            between = Interval(t + 1, layer.window.lo - 1) if t + 1 <= layer.window.lo - 1 else None
        derived: Set[Rel] = set()
        while True:
            extra: Dict[Rel, List[Interval]] = {}
            if between is not None:
                for atom in assumed:
                    extra.setdefault(atom, []).append(between)
            for atom in derived:
                extra.setdefault(atom, []).append(Interval.point(t))
            current = Evaluator(layer.interpretation(extra))
            new: Set[Rel] = set()
            for rule, shape in zip(self._rules, self._shapes):
                base = shape.base
                if not isinstance(base, Rel) or base in derived or base in new:
                    continue
                lo = max(shape.lo, -self._span)
                hi = min(shape.hi, self._span)
                for offset in range(int(lo), int(hi) + 1):
                    if fires(rule, t - offset, current, self._negative):
                        new.add(base)
                        break
            if not new:
                return derived
            derived |= new


def _effective_window(window: Interval, dataset: Dataset, *interps: Interpretation) -> Interval:
    if dataset.facts:
        window = window.hull(Interval(dataset.t_min, dataset.t_max))
    for interp in interps:
        support = interp.support_bounds()
        if support is not None:
            window = window.hull(Interval(support[0], support[1]))
    return window


def _rules_of(program: Program | Sequence[Rule], dataset: Dataset) -> Tuple[Tuple[Rule, ...], int]:
    if isinstance(program, Program):
        return ground(program, dataset), program.t_pi
    rules = tuple(program)
    return rules, Program(rules).t_pi


def _data_layer(dataset: Dataset, window: Interval) -> Layer:
    layer = Layer(window)
    for fact in dataset.facts:
        layer.add_range(fact.atom, fact.interval.lo, fact.interval.hi)
    return layer


def least_here(
    program: Program | Sequence[Rule],
    dataset: Dataset,
    there: Interpretation,
    box: SearchBox,
) -> Interpretation:
    """Least interpretation h containing the data such that (h, there) satisfies the first HT
    condition, restricted to the box and its two tails."""
    rules, t_pi = _rules_of(program, dataset)
    window = _effective_window(box.window, dataset, there)
    frame = check_frame(rules, window, t_pi)
    layer = _data_layer(dataset, window)
    _Saturation(rules, there, frame, candidates=there).run(layer)
    return layer.interpretation()


def least_model(program: Program | Sequence[Rule], dataset: Dataset, box: SearchBox) -> Interpretation:
    """Least model of a positive program on the box and its tails."""
    rules, _ = _rules_of(program, dataset)
    window = _effective_window(box.window, dataset)
    return least_here(rules, dataset, _saturated_top(rules, dataset, window).interpretation(), SearchBox(window))


def _saturated_top(rules: Sequence[Rule], dataset: Dataset, window: Interval) -> Layer:
    layer = _data_layer(dataset, window)
    for atom in head_atoms(rules):
        layer.add_range(atom, -math.inf, math.inf)
    return layer


def _over_approximation(
    rules: Sequence[Rule],
    dataset: Dataset,
    lower: Interpretation,
    window: Interval,
    frame: Interval,
) -> Layer:
    layer = _data_layer(dataset, window)
    for atom in head_atoms(rules):
        layer.left.add(atom)
        layer.right.add(atom)
    return _Saturation(rules, lower, frame, strict=False).run(layer)


def model_bounds(
    rules: Sequence[Rule],
    dataset: Dataset,
    window: Interval,
    frame: Interval,
) -> Tuple[Layer, Layer]:
    """Lower and upper bounds that every stable model lies between.

    Raises INCONSISTENT when no stable model can exist.
    """
    upper = _saturated_top(rules, dataset, window)
    lower = _data_layer(dataset, window)
    for _ in range(MAX_BOUND_ROUNDS):
        next_lower = _Saturation(rules, upper.interpretation(), frame, candidates=upper.interpretation()).run(
            _data_layer(dataset, window)
        )
        next_lower = _merge(lower, next_lower, union=True)
        next_upper = _merge(upper, _over_approximation(rules, dataset, next_lower.interpretation(), window, frame), union=False)
        if _same(next_lower, lower) and _same(next_upper, upper):
            break
        lower, upper = next_lower, next_upper
    return lower, upper


def _merge(first: Layer, second: Layer, union: bool) -> Layer:
    merged = Layer(first.window)
    atoms = set(first.points) | set(second.points)
    for atom in atoms:
        a = first.points.get(atom, set())
        b = second.points.get(atom, set())
        points = a | b if union else a & b
        if points:
            merged.points[atom] = points
    merged.left = first.left | second.left if union else first.left & second.left
    merged.right = first.right | second.right if union else first.right & second.right
    return merged


def _same(first: Layer, second: Layer) -> bool:
    return first.interpretation() == second.interpretation()


@dataclass(frozen=True)
class _Bit:
    atom: Rel
    point: Optional[int]
    side: Optional[str] = None


class _CandidateCheck:
    def __init__(self, rules: Sequence[Rule], dataset: Dataset, window: Interval, frame: Interval) -> None:
        self._rules = rules
        self._dataset = dataset
        self._window = window
        self._frame = frame

    def is_stable(self, candidate: Interpretation) -> bool:
        there = Evaluator(candidate)
        for rule in self._rules:
            for t in self._frame.points():
                if not _rule_holds(rule, t, there, there):
                    return False
        try:
            layer = _data_layer(self._dataset, self._window)
            _Saturation(self._rules, candidate, self._frame, candidates=candidate).run(layer)
        except TemporalisError as exc:
            if exc.code == INCONSISTENT:
                return False
            raise
        return layer.interpretation() == candidate


def check_stable_witness(
    program: Program | Sequence[Rule],
    dataset: Dataset,
    candidate: Interpretation,
    box: SearchBox,
) -> bool:
    """Whether a tail-constant candidate is a stable model of the program and dataset."""
    rules, t_pi = _rules_of(program, dataset)
    window = _effective_window(box.window, dataset, candidate)
    frame = check_frame(rules, window, t_pi)
    return _CandidateCheck(rules, dataset, window, frame).is_stable(candidate)


def default_box(program: Program, dataset: Dataset) -> SearchBox:
    t_pi = program.t_pi
    return SearchBox(Interval(dataset.t_min - 2 * t_pi, dataset.t_max + 2 * t_pi))


def oracle_stable_models(
    program: Program | Sequence[Rule],
    dataset: Dataset,
    box: Optional[SearchBox] = None,
    *,
    max_candidates: int = 2**24,
    threads: int = 1,
) -> List[Interpretation]:
    """Every tail-constant stable model over the box, in canonical order."""
    if not dataset.bounded:
        raise temporalis_error(UNBOUNDED_DATASET, "the oracle needs a dataset without unbounded intervals")
    rules, t_pi = _rules_of(program, dataset)
    if box is None:
        box = default_box(Program(rules), dataset)
    window = _effective_window(box.window, dataset)
    frame = check_frame(rules, window, t_pi)
    try:
        lower, upper = model_bounds(rules, dataset, window, frame)
    except TemporalisError as exc:
        if exc.code == INCONSISTENT:
            logger.debug("oracle bounds inconsistent", extra={"detail": exc.message})
            return []
        raise
    searched = head_atoms(rules)
    if box.atoms:
        searched = sorted(set(searched) | set(box.atoms), key=atom_key)
    bits = _free_bits(searched, lower, upper, window)
    if 2 ** len(bits) > max_candidates:
        raise temporalis_error(
            GUARD_EXCEEDED,
            f"oracle search space of 2^{len(bits)} candidates exceeds the limit of {max_candidates}",
        )
    logger.debug("oracle search", extra={"free_bits": len(bits), "window": str(window)})
    checker = _CandidateCheck(rules, dataset, window, frame)
    masks = range(2 ** len(bits))

    def check(mask: int) -> Optional[Interpretation]:
        candidate = _candidate(lower, bits, mask)
        return candidate if checker.is_stable(candidate) else None

    if threads > 1 and len(masks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(check, masks, chunksize=max(1, len(masks) // (threads * 4))))
    else:
        results = [check(mask) for mask in masks]
    models = {model for model in results if model is not None}
    return sorted(models, key=canonical_key)


def canonical_key(interp: Interpretation) -> Tuple[int, str]:
    return (sum(1 for _ in interp.to_facts()), format_interpretation(interp))


def _free_bits(atoms: Sequence[Rel], lower: Layer, upper: Layer, window: Interval) -> List[_Bit]:
    bits: List[_Bit] = []
    for atom in atoms:
        known = lower.points.get(atom, set())
        possible = upper.points.get(atom, set())
        for t in window.points():
            if t in possible and t not in known:
                bits.append(_Bit(atom, t))
        if atom in upper.left and atom not in lower.left:
            bits.append(_Bit(atom, None, LEFT))
        if atom in upper.right and atom not in lower.right:
            bits.append(_Bit(atom, None, RIGHT))
    return bits


def _candidate(lower: Layer, bits: Sequence[_Bit], mask: int) -> Interpretation:
    layer = lower.copy()
    for position, bit in enumerate(bits):
        if not mask >> position & 1:
            continue
        if bit.side == LEFT:
            layer.left.add(bit.atom)
        elif bit.side == RIGHT:
            layer.right.add(bit.atom)
        else:
            layer.points.setdefault(bit.atom, set()).add(bit.point)
    return layer.interpretation()


def has_stable_model_oracle(
    program: Program | Sequence[Rule],
    dataset: Dataset,
    box: Optional[SearchBox] = None,
    *,
    max_candidates: int = 2**24,
    threads: int = 1,
) -> Optional[Interpretation]:
    models = oracle_stable_models(program, dataset, box, max_candidates=max_candidates, threads=threads)
    return models[0] if models else None
