"""Rewriting programs into normal form.

A program is normal when every head is relational or BOTTOM and every body atom is relational,
TOP, BOTTOM or carries a single SINCE/UNTIL/box operator whose operands are relational, TOP or
BOTTOM, with no unbounded interval other than [0,inf).

The rewrite runs in five passes: TOP heads are dropped, head boxes become diamonds over a fresh
predicate, nested operators are flattened, diamonds become SINCE/UNTIL with a TOP left operand,
and unbounded intervals are reduced to [0,inf) ones. Fresh predicates are named ``_nf<k>_<base>``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import UNSAFE_RULE, temporalis_error
from .syntax import (
    BOTTOM,
    BOXMINUS,
    BOXPLUS,
    DIAMOND_OPS,
    DIAMONDMINUS,
    DIAMONDPLUS,
    SINCE,
    TOP,
    UNBOUNDED_FROM_ZERO,
    UNTIL,
    Binary,
    Bottom,
    Interval,
    MetricAtom,
    Program,
    Rel,
    Rule,
    Top,
    Unary,
    format_atom,
    format_rule,
    is_compound,
    unsafe_variables,
)
from .temporal import Interpretation

logger = logging.getLogger(__name__)

HEAD_BOXES = "head-boxes"
NESTING = "nesting"
UNBOUNDED = "unbounded"

FRESH_PREFIX = "_nf"

_DUAL = {BOXMINUS: DIAMONDPLUS, BOXPLUS: DIAMONDMINUS}
_BOX_OF = {SINCE: BOXMINUS, UNTIL: BOXPLUS}
_EVENTUALLY_OF = {SINCE: DIAMONDMINUS, UNTIL: DIAMONDPLUS}


@dataclass(frozen=True)
class FreshPredicate:
    name: str
    step: str
    sources: Tuple[str, ...] = ()


@dataclass(frozen=True)
class NormalizationReport:
    source: Program
    output: Program
    fresh_predicates: Mapping[str, FreshPredicate] = field(default_factory=dict)

    def is_fresh(self, predicate: str) -> bool:
        return predicate in self.fresh_predicates


def _operands(atom: MetricAtom) -> Tuple[MetricAtom, ...]:
    if isinstance(atom, Unary):
        return (atom.operand,)
    if isinstance(atom, Binary):
        return (atom.left, atom.right)
    return ()


def _is_flat(atom: MetricAtom) -> bool:
    return is_compound(atom) and not any(is_compound(operand) for operand in _operands(atom))


def _base_name(atom: MetricAtom) -> str:
    if isinstance(atom, Rel):
        return atom.predicate
    if isinstance(atom, Top):
        return "top"
    if isinstance(atom, Bottom):
        return "bottom"
    return "_".join(_base_name(operand) for operand in _operands(atom))


def _fresh_terms(atom: MetricAtom) -> tuple:
    if isinstance(atom, Rel):
        return atom.terms
    return tuple(term for operand in _operands(atom) for term in _fresh_terms(operand))


def _replace_at(atom: MetricAtom, path: Tuple[str, ...], new: MetricAtom) -> MetricAtom:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if isinstance(atom, Unary):
        return Unary(atom.op, atom.interval, _replace_at(atom.operand, rest, new))
    if isinstance(atom, Binary):
        if step == "left":
            return Binary(atom.op, atom.interval, _replace_at(atom.left, rest, new), atom.right)
        return Binary(atom.op, atom.interval, atom.left, _replace_at(atom.right, rest, new))
    raise ValueError(f"no operand at {path} in {format_atom(atom)}")


def _find_nested(
    atom: MetricAtom, distributive: bool, path: Tuple[str, ...] = ()
) -> Optional[Tuple[Tuple[str, ...], MetricAtom, bool]]:
    """First single-operator occurrence strictly below another operator.

    The flag says whether the occurrence sits in a position where a disjunction could be pulled
    out of it: under diamonds and right operands only, in a positive literal.
    """
    if isinstance(atom, Unary):
        children = [("operand", atom.operand, distributive and atom.op in DIAMOND_OPS)]
    elif isinstance(atom, Binary):
        children = [("left", atom.left, False), ("right", atom.right, distributive)]
    else:
        return None
    for step, child, child_distributive in children:
        if not is_compound(child):
            continue
        if _is_flat(child):
            return path + (step,), child, child_distributive
        found = _find_nested(child, child_distributive, path + (step,))
        if found is not None:
            return found
    return None


def _conjunction(atoms: Sequence[MetricAtom]) -> Tuple[MetricAtom, ...]:
    """Drop TOP conjuncts and boxes over TOP."""
    kept = []
    for atom in atoms:
        if isinstance(atom, Top):
            continue
        if isinstance(atom, Unary) and atom.op in _DUAL and isinstance(atom.operand, Top):
            continue
        kept.append(atom)
    return tuple(kept)


def _box(op: str, lo: int, hi: int, operand: MetricAtom) -> MetricAtom:
    if lo == hi == 0:
        return operand
    return Unary(op, Interval(lo, hi), operand)


class _Normalizer:
    def __init__(self, program: Program) -> None:
        self._taken = set(program.predicates)
        self._counter = itertools.count()
        self._definitions: Dict[Tuple[str, MetricAtom], Rel] = {}
        self.fresh: Dict[str, FreshPredicate] = {}

    def fresh_atom(self, base: str, terms: tuple, step: str, sources: Sequence[str]) -> Rel:
        while True:
            name = f"{FRESH_PREFIX}{next(self._counter)}_{base}"
            if name not in self._taken:
                break
        self._taken.add(name)
        self.fresh[name] = FreshPredicate(name, step, tuple(sources))
        return Rel(name, terms)

    def defined(
        self,
        kind: str,
        atom: MetricAtom,
        step: str,
        body: Callable[[Rel], Rule],
        pending: List[Rule],
    ) -> Rel:
        """Fresh atom for ``atom``, shared by every occurrence; its defining rule goes to ``pending``."""
        key = (kind, atom)
        existing = self._definitions.get(key)
        if existing is not None:
            return existing
        fresh = self.fresh_atom(_base_name(atom), _fresh_terms(atom), step, [format_atom(atom)])
        self._definitions[key] = fresh
        definition = body(fresh)
        if unsafe_variables(definition):
            raise temporalis_error(
                UNSAFE_RULE,
                f"cannot define {fresh.predicate} for {format_atom(atom)} safely: {format_rule(definition)}",
            )
        pending.append(definition)
        return fresh

    def run(self, rules: Sequence[Rule]) -> List[Rule]:
        rules = self.drop_top_heads(rules)
        rules = self.eliminate_head_boxes(rules)
        rules = self.flatten(rules)
        rules = [self.eliminate_diamonds(rule) for rule in rules]
        rules = self.reduce_unbounded(rules)
        return list(dict.fromkeys(rules))

    # heads

    @staticmethod
    def drop_top_heads(rules: Sequence[Rule]) -> List[Rule]:
        kept = []
        for rule in rules:
            base = rule.head
            while isinstance(base, Unary):
                base = base.operand
            if isinstance(base, Top):
                continue
            kept.append(rule)
        return kept

    def eliminate_head_boxes(self, rules: Sequence[Rule]) -> List[Rule]:
        result: List[Rule] = []
        for rule in rules:
            if not isinstance(rule.head, Unary):
                result.append(rule)
                continue
            boxes: List[Unary] = []
            base = rule.head
            while isinstance(base, Unary):
                boxes.append(base)
                base = base.operand
            if isinstance(base, Bottom):
                result.append(Rule(BOTTOM, rule.positive, rule.negative))
                continue
            fresh = self.fresh_atom(base.predicate, base.terms, HEAD_BOXES, [format_rule(rule)])
            result.append(Rule(fresh, rule.positive, rule.negative))
            expression: MetricAtom = fresh
            for box in boxes:
                expression = Unary(_DUAL[box.op], box.interval, expression)
            result.append(Rule(base, (expression,)))
        return result

    # nesting

    def flatten(self, rules: Sequence[Rule]) -> List[Rule]:
        pending = list(rules)
        done: List[Rule] = []
        while pending:
            rule = pending.pop(0)
            produced: List[Rule] = []
            rewritten = self._flatten_once(rule, produced)
            if rewritten is None:
                done.append(rule)
                continue
            pending[0:0] = rewritten + produced
        return done

    def _flatten_once(self, rule: Rule, produced: List[Rule]) -> Optional[List[Rule]]:
        for polarity, literals in ((True, rule.positive), (False, rule.negative)):
            for index, literal in enumerate(literals):
                found = _find_nested(literal, polarity)
                if found is None:
                    continue
                path, occurrence, distributive = found

                def with_replacement(new: MetricAtom) -> Rule:
                    updated = list(literals)
                    updated[index] = _replace_at(literal, path, new)
                    if polarity:
                        return Rule(rule.head, tuple(updated), rule.negative)
                    return Rule(rule.head, rule.positive, tuple(updated))

                if isinstance(occurrence, Binary) and distributive:
                    return self._split_binary(occurrence, with_replacement, produced)
                fresh = self.defined(
                    "definition", occurrence, NESTING, lambda head: Rule(head, (occurrence,)), produced
                )
                return [with_replacement(fresh)]
        return None

    def _split_binary(
        self,
        occurrence: Binary,
        with_replacement: Callable[[MetricAtom], Rule],
        produced: List[Rule],
    ) -> List[Rule]:
        """Case split on how far back (or ahead) the right operand is witnessed."""
        result: List[Rule] = []
        if occurrence.interval.contains(0):
            result.append(with_replacement(occurrence.right))
        if occurrence.interval.contains(1):
            result.append(with_replacement(_box(_BOX_OF[occurrence.op], 1, 1, occurrence.right)))

        def definition(head: Rel) -> Rule:
            ever = Unary(_EVENTUALLY_OF[occurrence.op], UNBOUNDED_FROM_ZERO, occurrence.left)
            return Rule(head, _conjunction([occurrence, ever]))

        fresh = self.defined("split", occurrence, NESTING, definition, produced)
        result.append(with_replacement(fresh))
        return result

    # diamonds

    def eliminate_diamonds(self, rule: Rule) -> Rule:
        return Rule(
            rule.head,
            tuple(_without_diamonds(atom) for atom in rule.positive),
            tuple(_without_diamonds(atom) for atom in rule.negative),
        )

    # unbounded intervals

    def reduce_unbounded(self, rules: Sequence[Rule]) -> List[Rule]:
        pending = list(rules)
        done: List[Rule] = []
        while pending:
            rule = pending.pop(0)
            produced: List[Rule] = []
            rewritten = self._reduce_once(rule, produced)
            if rewritten is None:
                done.append(rule)
                continue
            pending[0:0] = rewritten + produced
        return done

    def _reduce_once(self, rule: Rule, produced: List[Rule]) -> Optional[List[Rule]]:
        for index, literal in enumerate(rule.positive):
            if not _needs_reduction(literal):
                continue

            def with_conjuncts(conjuncts: Sequence[MetricAtom]) -> Rule:
                positive = rule.positive[:index] + _conjunction(conjuncts) + rule.positive[index + 1 :]
                return Rule(rule.head, positive, rule.negative)

            if isinstance(literal, Unary):
                return [with_conjuncts([self._reduce_box(literal, produced)])]
            return self._split_unbounded(literal, with_conjuncts, produced)
        for index, literal in enumerate(rule.negative):
            if not _needs_reduction(literal):
                continue
            if isinstance(literal, Unary):
                replacement = self._reduce_box(literal, produced)
            else:
                replacement = self.defined(
                    "definition", literal, UNBOUNDED, lambda head: Rule(head, (literal,)), produced
                )
            negative = rule.negative[:index] + (replacement,) + rule.negative[index + 1 :]
            return [Rule(rule.head, rule.positive, negative)]
        return None

    def _reduce_box(self, literal: Unary, produced: List[Rule]) -> MetricAtom:
        start = int(literal.interval.lo)
        tail = Unary(literal.op, UNBOUNDED_FROM_ZERO, literal.operand)
        fresh = self.defined("tail", tail, UNBOUNDED, lambda head: Rule(head, (tail,)), produced)
        return _box(literal.op, start, start, fresh)

    def _split_unbounded(
        self,
        literal: Binary,
        with_conjuncts: Callable[[Sequence[MetricAtom]], Rule],
        produced: List[Rule],
    ) -> List[Rule]:
        start = int(literal.interval.lo)
        box = _BOX_OF[literal.op]
        result: List[Rule] = []
        if start == 1:
            result.append(with_conjuncts([_box(box, 1, 1, literal.right)]))
        else:
            result.append(
                with_conjuncts([_box(box, start, start, literal.right), _box(box, 1, start - 1, literal.left)])
            )
        tail = Binary(literal.op, UNBOUNDED_FROM_ZERO, literal.left, literal.right)
        fresh = self.defined(
            "split", literal, UNBOUNDED, lambda head: Rule(head, _conjunction([tail, literal.left])), produced
        )
        result.append(with_conjuncts([_box(box, start, start, fresh), _box(box, 1, start, literal.left)]))
        return result


def _without_diamonds(atom: MetricAtom) -> MetricAtom:
    if isinstance(atom, Unary):
        operand = _without_diamonds(atom.operand)
        if atom.op == DIAMONDMINUS:
            return Binary(SINCE, atom.interval, TOP, operand)
        if atom.op == DIAMONDPLUS:
            return Binary(UNTIL, atom.interval, TOP, operand)
        return Unary(atom.op, atom.interval, operand)
    if isinstance(atom, Binary):
        return Binary(atom.op, atom.interval, _without_diamonds(atom.left), _without_diamonds(atom.right))
    return atom


def _needs_reduction(atom: MetricAtom) -> bool:
    if not is_compound(atom):
        return False
    interval = atom.interval
    return math.isinf(interval.hi) and interval != UNBOUNDED_FROM_ZERO


def normalize(program: Program) -> NormalizationReport:
    """Equivalent normal-form program; stable models agree after dropping fresh predicates."""
    normalizer = _Normalizer(program)
    rules = normalizer.run(program.rules)
    output = Program(tuple(rules))
    if normalizer.fresh:
        logger.debug(
            "normalized program",
            extra={"rules_in": len(program), "rules_out": len(output), "fresh": len(normalizer.fresh)},
        )
    return NormalizationReport(program, output, dict(normalizer.fresh))


def normalize_program(program: Program) -> Program:
    return normalize(program).output


def normal_form_violations(rule: Rule) -> List[str]:
    problems: List[str] = []
    if not isinstance(rule.head, (Rel, Bottom)):
        problems.append(f"head {format_atom(rule.head)} is not relational or BOTTOM")
    for atom in rule.body:
        if not is_compound(atom):
            continue
        if not _is_flat(atom):
            problems.append(f"{format_atom(atom)} nests operators")
        if isinstance(atom, Unary) and atom.op in DIAMOND_OPS:
            problems.append(f"{format_atom(atom)} uses a diamond")
        if _needs_reduction(atom):
            problems.append(f"{format_atom(atom)} has an unbounded interval other than [0,inf)")
    return problems


def check_normal_form(program: Program) -> List[str]:
    """One message per violation, prefixed by the rule index; empty when the program is normal."""
    return [
        f"rule {index}: {problem}"
        for index, rule in enumerate(program.rules)
        for problem in normal_form_violations(rule)
    ]


def is_normal(program: Program) -> bool:
    return not check_normal_form(program)


def project_fresh(interp: Interpretation, report: NormalizationReport) -> Interpretation:
    return interp.restrict(lambda atom: not report.is_fresh(atom.predicate))


def is_fresh_predicate(name: str) -> bool:
    return name.startswith(FRESH_PREFIX)
