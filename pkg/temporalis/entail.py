"""Brave and cautious entailment of facts, reduced to stable model existence."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from .config import Settings, default_settings
from .errors import INVALID_ARGUMENT, temporalis_error
from .stablecheck import AUTO, ExistenceResult, has_stable_model
from .syntax import (
    BOTTOM,
    BOXMINUS,
    BOXPLUS,
    INF,
    Dataset,
    Fact,
    Interval,
    MetricAtom,
    Program,
    Rel,
    Rule,
    Unary,
    is_forward_propagating,
    is_ground,
)
from .temporal import Interpretation

logger = logging.getLogger(__name__)

BRAVE = "brave"
CAUTIOUS = "cautious"


@dataclass(frozen=True)
class EntailmentQuery:
    atom: Rel
    rho: Interval
    mode: str = CAUTIOUS

    def __post_init__(self) -> None:
        if self.mode not in (BRAVE, CAUTIOUS):
            raise temporalis_error(INVALID_ARGUMENT, f"unknown entailment mode {self.mode!r}")
        if not isinstance(self.atom, Rel) or not is_ground(self.atom):
            raise temporalis_error(INVALID_ARGUMENT, "queries are ground relational facts")


@dataclass(frozen=True)
class EntailmentResult:
    query: EntailmentQuery
    entailed: bool
    existence: ExistenceResult
    marker: str = ""

    @property
    def model(self) -> Optional[Interpretation]:
        """A model with the fact (brave) or a countermodel (cautious), when one was found."""
        if self.existence.model is None:
            return None
        return self.existence.model.restrict(lambda atom: atom.predicate != self.marker)


def _marker(program: Program, dataset: Dataset, atom: Rel) -> Rel:
    taken = program.predicates | dataset.predicates
    name = f"_q_{atom.predicate}"
    suffix = 0
    while name in taken:
        suffix += 1
        name = f"_q{suffix}_{atom.predicate}"
    return Rel(name, ())


def _anchor(rho: Interval, forward: bool) -> int:
    if forward and rho.hi != INF:
        return int(rho.hi)
    if rho.lo != -INF:
        return int(rho.lo)
    return int(min(0, rho.hi))


def _around(atom: Rel, rho: Interval, anchor: int) -> Tuple[MetricAtom, MetricAtom]:
    """Atoms true at ``anchor`` exactly when ``atom`` holds on the part of ``rho`` before and
    after it."""
    before = Interval(0, INF if rho.lo == -INF else anchor - int(rho.lo))
    after = Interval(0, INF if rho.hi == INF else int(rho.hi) - anchor)
    past = atom if before == Interval(0, 0) else Unary(BOXMINUS, before, atom)
    future = atom if after == Interval(0, 0) else Unary(BOXPLUS, after, atom)
    return past, future


def query_program(program: Program, dataset: Dataset, query: EntailmentQuery) -> Tuple[Program, Dataset]:
    """The program and dataset whose stable models decide ``query``.

    A fresh nullary marker holds only at an anchor point of the query interval. Brave queries
    forbid models where the fact fails around the marker; cautious queries forbid models where
    it holds.
    """
    forward = is_forward_propagating(program)
    # forward-propagating programs anchor at the upper end so the added rules only look back
    anchor = _anchor(query.rho, forward)
    marker = _marker(program, dataset, query.atom)
    past, future = _around(query.atom, query.rho, anchor)
    if query.mode == BRAVE:
        extra = [Rule(BOTTOM, (marker,), (past,)), Rule(BOTTOM, (marker,), (future,))]
    else:
        extra = [Rule(BOTTOM, (marker, past, future))]
    rules = tuple(dict.fromkeys(program.rules + tuple(extra)))
    return Program(rules), dataset.with_facts([Fact(marker, Interval.point(anchor))])


def entails(
    program: Program,
    dataset: Dataset,
    query: EntailmentQuery,
    mode: str = AUTO,
    settings: Optional[Settings] = None,
) -> EntailmentResult:
    settings = settings or default_settings()
    extended_program, extended_data = query_program(program, dataset, query)
    existence = has_stable_model(extended_program, extended_data, mode, settings)
    entailed = existence.exists if query.mode == BRAVE else not existence.exists
    logger.info(
        "entailment decided",
        extra={"query_mode": query.mode, "mode": existence.mode, "entailed": entailed},
    )
    marker = _marker(program, dataset, query.atom)
    return EntailmentResult(query, entailed, existence, marker.predicate)


def brave_entails(program: Program, dataset: Dataset, atom: Rel, rho: Interval, **kwargs) -> bool:
    return entails(program, dataset, EntailmentQuery(atom, rho, BRAVE), **kwargs).entailed


def cautious_entails(program: Program, dataset: Dataset, atom: Rel, rho: Interval, **kwargs) -> bool:
    return entails(program, dataset, EntailmentQuery(atom, rho, CAUTIOUS), **kwargs).entailed
