"""Text formats: programs (.dmtl), datasets and interpretations (.dfacts)."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Any, List, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from .errors import (
    INVALID_INTERVAL,
    PARSE_ERROR,
    RATIONAL_TIMELINE,
    TemporalisError,
    temporalis_error,
)
from .syntax import (
    BOTTOM,
    BOXMINUS,
    BOXPLUS,
    DIAMONDMINUS,
    DIAMONDPLUS,
    SINCE,
    TOP,
    UNTIL,
    Binary,
    Dataset,
    Fact,
    Interval,
    MetricAtom,
    Program,
    Rel,
    Rule,
    Unary,
    is_ground,
    make_term,
)
from .temporal import Interpretation

GRAMMAR = r"""
    program: rule*
    dataset: fact*
    fact_query: metric "@" time
    atom_query: metric

    rule: metric (":-" body)? "."
    body: literal ("," literal)*
    literal: metric                       -> positive
           | "not" metric                 -> negative

    fact: metric "@" time "."

    ?time: interval
         | number                         -> punctual

    ?metric: unary
           | unary "SINCE" bound unary    -> since
           | unary "UNTIL" bound unary    -> until

    ?unary: "BOXMINUS" bound unary        -> boxminus
          | "BOXPLUS" bound unary         -> boxplus
          | "DIAMONDMINUS" bound unary    -> diamondminus
          | "DIAMONDPLUS" bound unary     -> diamondplus
          | primary

    ?primary: "TOP"                       -> top
            | "BOTTOM"                    -> bottom
            | relational
            | "(" metric ")"

    relational: NAME ("(" term ("," term)* ")")?
    term: NAME

    ?bound: interval
          | number                        -> punctual

    interval: lbrack endpoint "," endpoint rbrack
    !lbrack: "[" | "("
    !rbrack: "]" | ")"
    ?endpoint: number
             | infinity
    number: NUMBER
    infinity: INF

    INF.2: /[+-]?inf\b/
    NUMBER: /[+-]?\d+(\.\d+)?/
    NAME: /[A-Za-z_][A-Za-z0-9_']*/
    COMMENT: /%[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

START_SYMBOLS = ["program", "dataset", "fact_query", "atom_query"]


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr", start=START_SYMBOLS)


def _operator_interval(interval: Interval) -> Interval:
    if interval.lo < 0:
        raise temporalis_error(INVALID_INTERVAL, f"operator interval {interval} has a negative endpoint")
    return interval


class _ToAst(Transformer):
    def program(self, children: List[Rule]) -> Program:
        return Program(tuple(children))

    def dataset(self, children: List[Fact]) -> Dataset:
        return Dataset(tuple(children))

    def fact_query(self, children: List[Any]) -> Tuple[Rel, Interval]:
        atom, interval = children
        return _relational_fact(atom), interval

    def atom_query(self, children: List[Any]) -> MetricAtom:
        return children[0]

    def rule(self, children: List[Any]) -> Rule:
        head = children[0]
        literals = children[1] if len(children) > 1 else []
        positive = tuple(atom for polarity, atom in literals if polarity)
        negative = tuple(atom for polarity, atom in literals if not polarity)
        return Rule(head, positive, negative)

    def body(self, children: List[Tuple[bool, MetricAtom]]) -> List[Tuple[bool, MetricAtom]]:
        return list(children)

    def positive(self, children: List[MetricAtom]) -> Tuple[bool, MetricAtom]:
        return True, children[0]

    def negative(self, children: List[MetricAtom]) -> Tuple[bool, MetricAtom]:
        return False, children[0]

    def fact(self, children: List[Any]) -> Fact:
        atom, interval = children
        return Fact(_relational_fact(atom), interval)

    def punctual(self, children: List[Any]) -> Interval:
        value = children[0]
        if math.isinf(value):
            raise temporalis_error(INVALID_INTERVAL, "a time point must be finite")
        return Interval.point(value)

    def since(self, children: List[Any]) -> Binary:
        left, interval, right = children
        return Binary(SINCE, _operator_interval(interval), left, right)

    def until(self, children: List[Any]) -> Binary:
        left, interval, right = children
        return Binary(UNTIL, _operator_interval(interval), left, right)

    def boxminus(self, children: List[Any]) -> Unary:
        return Unary(BOXMINUS, _operator_interval(children[0]), children[1])

    def boxplus(self, children: List[Any]) -> Unary:
        return Unary(BOXPLUS, _operator_interval(children[0]), children[1])

    def diamondminus(self, children: List[Any]) -> Unary:
        return Unary(DIAMONDMINUS, _operator_interval(children[0]), children[1])

    def diamondplus(self, children: List[Any]) -> Unary:
        return Unary(DIAMONDPLUS, _operator_interval(children[0]), children[1])

    def top(self, children: List[Any]) -> MetricAtom:
        return TOP

    def bottom(self, children: List[Any]) -> MetricAtom:
        return BOTTOM

    def relational(self, children: List[Any]) -> Rel:
        name, *terms = children
        return Rel(str(name), tuple(terms))

    def term(self, children: List[Token]):
        return make_term(str(children[0]))

    def interval(self, children: List[Any]) -> Interval:
        left, lo, hi, right = children
        return Interval.make(lo, hi, lo_closed=left == "[", hi_closed=right == "]")

    def lbrack(self, children: List[Token]) -> str:
        return str(children[0])

    def rbrack(self, children: List[Token]) -> str:
        return str(children[0])

    def number(self, children: List[Token]) -> int:
        text = str(children[0])
        if "." in text:
            raise temporalis_error(
                RATIONAL_TIMELINE,
                f"non-integer number {text}: reasoning over the rational timeline is undecidable, only integers are supported",
            )
        return int(text)

    def infinity(self, children: List[Token]) -> float:
        return -math.inf if str(children[0]).startswith("-") else math.inf


def _relational_fact(atom: MetricAtom) -> Rel:
    if not isinstance(atom, Rel):
        raise temporalis_error(PARSE_ERROR, f"datasets hold relational facts only, got {atom}")
    if not is_ground(atom):
        raise temporalis_error(PARSE_ERROR, f"fact {atom} is not ground")
    return atom


def _parse(text: str, start: str) -> Any:
    try:
        tree = _parser().parse(text, start=start)
    except UnexpectedInput as exc:
        expected = getattr(exc, "expected", None) or getattr(exc, "allowed", None) or ()
        hint = f", expected one of {', '.join(sorted(str(item) for item in expected))}" if expected else ""
        raise temporalis_error(
            PARSE_ERROR,
            f"syntax error at line {exc.line}, column {exc.column}{hint}",
            exc,
        )
    try:
        return _ToAst().transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, TemporalisError):
            raise exc.orig_exc
        raise temporalis_error(PARSE_ERROR, f"invalid input: {exc.orig_exc}", exc)


def parse_program(text: str) -> Program:
    program: Program = _parse(text, "program")
    return program.check()


def parse_dataset(text: str) -> Dataset:
    return _parse(text, "dataset")


def parse_atom(text: str) -> MetricAtom:
    return _parse(text, "atom_query")


def parse_fact_query(text: str) -> Tuple[Rel, Interval]:
    return _parse(text, "fact_query")


def parse_interpretation(text: str) -> Interpretation:
    """Read an interpretation written as facts; infinite endpoints mark tails."""
    dataset = parse_dataset(text)
    return Interpretation.from_facts(dataset.facts)
