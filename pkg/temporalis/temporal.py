"""Interval-set interpretations and point semantics of ground metric atoms."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .errors import INVALID_ARGUMENT, temporalis_error
from .syntax import (
    BOXMINUS,
    BOXPLUS,
    DIAMONDMINUS,
    DIAMONDPLUS,
    SINCE,
    UNTIL,
    Binary,
    Bottom,
    Dataset,
    Endpoint,
    Fact,
    Interval,
    MetricAtom,
    Rel,
    Top,
    Unary,
    atom_key,
    format_fact,
)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted runs that neither overlap nor touch; infinite endpoints encode tails."""

    runs: Tuple[Interval, ...] = ()

    @property
    def left_tail(self) -> bool:
        return bool(self.runs) and math.isinf(self.runs[0].lo)

    @property
    def right_tail(self) -> bool:
        return bool(self.runs) and math.isinf(self.runs[-1].hi)

    @cached_property
    def _starts(self) -> List[Endpoint]:
        return [run.lo for run in self.runs]

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.runs)

    def contains(self, t: Endpoint) -> bool:
        position = bisect.bisect_right(self._starts, t) - 1
        return position >= 0 and self.runs[position].contains(t)

    def finite_bounds(self) -> Optional[Tuple[int, int]]:
        numbers = [value for run in self.runs for value in run.finite_endpoints()]
        if not numbers:
            return None
        return (min(numbers), max(numbers))

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return coalesce(self.runs + other.runs)

    def issubset(self, other: "IntervalSet") -> bool:
        return self.union(other) == other

    def __str__(self) -> str:
        return " ".join(str(run) for run in self.runs) or "{}"


def coalesce(intervals: Iterable[Interval]) -> IntervalSet:
    """Merge overlapping and integer-adjacent intervals into a minimal run sequence."""
    ordered = sorted(intervals)
    merged: List[Interval] = []
    for interval in ordered:
        if merged and interval.lo <= merged[-1].hi + 1:
            last = merged[-1]
            if interval.hi > last.hi:
                merged[-1] = Interval(last.lo, interval.hi)
            continue
        merged.append(interval)
    return IntervalSet(tuple(merged))


def runs_from_points(points: Iterable[int]) -> List[Interval]:
    return list(coalesce(Interval.point(t) for t in points).runs)


class Interpretation:
    """Map from ground relational atoms to the interval sets where they hold."""

    def __init__(self, facts: Optional[Mapping[Rel, IntervalSet]] = None) -> None:
        items = [(atom, runs) for atom, runs in (facts or {}).items() if runs]
        self._facts: Dict[Rel, IntervalSet] = dict(sorted(items, key=lambda item: atom_key(item[0])))

    @classmethod
    def from_runs(cls, runs: Mapping[Rel, Iterable[Interval]]) -> "Interpretation":
        return cls({atom: coalesce(intervals) for atom, intervals in runs.items()})

    @classmethod
    def from_facts(cls, facts: Iterable[Fact]) -> "Interpretation":
        grouped: Dict[Rel, List[Interval]] = {}
        for fact in facts:
            grouped.setdefault(fact.atom, []).append(fact.interval)
        return cls.from_runs(grouped)

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "Interpretation":
        return cls.from_facts(dataset.facts)

    def atoms(self) -> List[Rel]:
        return list(self._facts)

    def get(self, atom: Rel) -> IntervalSet:
        return self._facts.get(atom, IntervalSet())

    def items(self) -> Iterator[Tuple[Rel, IntervalSet]]:
        return iter(self._facts.items())

    def holds(self, atom: Rel, t: Endpoint) -> bool:
        runs = self._facts.get(atom)
        return runs is not None and runs.contains(t)

    def union(self, other: "Interpretation") -> "Interpretation":
        merged = dict(self._facts)
        for atom, runs in other.items():
            merged[atom] = merged[atom].union(runs) if atom in merged else runs
        return Interpretation(merged)

    def issubset(self, other: "Interpretation") -> bool:
        return all(runs.issubset(other.get(atom)) for atom, runs in self.items())

    def restrict(self, keep) -> "Interpretation":
        """Keep only atoms for which ``keep(atom)`` is true."""
        return Interpretation({atom: runs for atom, runs in self.items() if keep(atom)})

    def support_bounds(self) -> Optional[Tuple[int, int]]:
        numbers = [bound for runs in self._facts.values() for bound in (runs.finite_bounds() or ())]
        if not numbers:
            return None
        return (min(numbers), max(numbers))

    def to_facts(self) -> List[Fact]:
        return [Fact(atom, run) for atom, runs in self.items() for run in runs]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Interpretation) and self._facts == other._facts

    def __hash__(self) -> int:
        return hash(tuple(self._facts.items()))

    def __len__(self) -> int:
        return len(self._facts)

    def __repr__(self) -> str:
        return f"Interpretation({format_interpretation(self).strip()!r})"

    def __str__(self) -> str:
        return format_interpretation(self)


def format_interpretation(interp: Interpretation) -> str:
    return "".join(f"{format_fact(fact)}\n" for fact in interp.to_facts())


class Evaluator:
    """Point semantics of ground metric atoms over one interpretation, memoised."""

    def __init__(self, interp: Interpretation) -> None:
        self._interp = interp
        self._memo: Dict[Tuple[MetricAtom, int], bool] = {}
        self._bounds: Dict[MetricAtom, Tuple[int, int]] = {}
        support = interp.support_bounds() or (0, 0)
        self._base = (support[0] - 1, support[1] + 1)

    @property
    def interpretation(self) -> Interpretation:
        return self._interp

    def bounds(self, atom: MetricAtom) -> Tuple[int, int]:
        """(left, right) such that the atom is constant on (-inf, left] and on [right, inf)."""
        cached = self._bounds.get(atom)
        if cached is not None:
            return cached
        if isinstance(atom, Unary):
            lc, rc = self.bounds(atom.operand)
            a, far = _spans(atom.interval)
            if atom.op in (BOXMINUS, DIAMONDMINUS):
                result = (lc + a, rc + far)
            else:
                result = (lc - far, rc - a)
        elif isinstance(atom, Binary):
            lc1, rc1 = self.bounds(atom.left)
            lc2, rc2 = self.bounds(atom.right)
            _, far = _spans(atom.interval)
            if atom.op == SINCE:
                result = (min(lc1, lc2), max(rc1, rc2) + far + 1)
            else:
                result = (min(lc1, lc2) - far - 1, max(rc1, rc2))
        else:
            result = self._base
        self._bounds[atom] = result
        return result

    def value(self, atom: MetricAtom, t: int) -> bool:
        if isinstance(atom, Top):
            return True
        if isinstance(atom, Bottom):
            return False
        if isinstance(atom, Rel):
            return self._interp.holds(atom, t)
        lc, rc = self.bounds(atom)
        if lc > rc:
            t = rc
        elif t < lc:
            t = lc
        elif t > rc:
            t = rc
        key = (atom, t)
        cached = self._memo.get(key)
        if cached is None:
            cached = self._compute(atom, t)
            self._memo[key] = cached
        return cached

    def _compute(self, atom: MetricAtom, t: int) -> bool:
        interval = atom.interval
        if isinstance(atom, Unary):
            if atom.op == BOXMINUS:
                return self.all(atom.operand, t - interval.hi, t - interval.lo)
            if atom.op == DIAMONDMINUS:
                return self.any(atom.operand, t - interval.hi, t - interval.lo)
            if atom.op == BOXPLUS:
                return self.all(atom.operand, t + interval.lo, t + interval.hi)
            if atom.op == DIAMONDPLUS:
                return self.any(atom.operand, t + interval.lo, t + interval.hi)
        if isinstance(atom, Binary):
            if atom.op == SINCE:
                return self._since(atom, t)
            if atom.op == UNTIL:
                return self._until(atom, t)
        raise TypeError(f"not a metric atom: {atom!r}")

    def _window(self, atom: MetricAtom, lo: Endpoint, hi: Endpoint) -> Optional[range]:
        lc, rc = self.bounds(atom)
        start = max(lo, lc - 1)
        stop = min(hi, rc + 1)
        if start > stop:
            return None
        return range(int(start), int(stop) + 1)

    def _representative(self, atom: MetricAtom, lo: Endpoint, hi: Endpoint) -> int:
        if not math.isinf(hi):
            return int(hi)
        if not math.isinf(lo):
            return int(lo)
        return self.bounds(atom)[1]

    def all(self, atom: MetricAtom, lo: Endpoint, hi: Endpoint) -> bool:
        """Whether the atom holds at every point of [lo, hi]; empty ranges hold."""
        if lo > hi:
            return True
        points = self._window(atom, lo, hi)
        if points is None:
            return self.value(atom, self._representative(atom, lo, hi))
        return all(self.value(atom, s) for s in points)

    def any(self, atom: MetricAtom, lo: Endpoint, hi: Endpoint) -> bool:
        if lo > hi:
            return False
        points = self._window(atom, lo, hi)
        if points is None:
            return self.value(atom, self._representative(atom, lo, hi))
        return any(self.value(atom, s) for s in points)

    def _since(self, atom: Binary, t: int) -> bool:
        interval = atom.interval
        start = t - int(interval.lo)
        floor: Endpoint = t - interval.hi
        settled = min(self.bounds(atom.left)[0], self.bounds(atom.right)[0]) - 1
        floor = max(floor, min(start, settled))
        left_ok = self.all(atom.left, start + 1, t - 1)
        witness = start
        while witness >= floor and left_ok:
            if self.value(atom.right, witness):
                return True
            left_ok = witness >= t or self.value(atom.left, witness)
            witness -= 1
        return False

    def _until(self, atom: Binary, t: int) -> bool:
        interval = atom.interval
        start = t + int(interval.lo)
        ceiling: Endpoint = t + interval.hi
        settled = max(self.bounds(atom.left)[1], self.bounds(atom.right)[1]) + 1
        ceiling = min(ceiling, max(start, settled))
        left_ok = self.all(atom.left, t + 1, start - 1)
        witness = start
        while witness <= ceiling and left_ok:
            if self.value(atom.right, witness):
                return True
            left_ok = witness <= t or self.value(atom.left, witness)
            witness += 1
        return False


def _spans(interval: Interval) -> Tuple[int, int]:
    """Near and far distance of an operator interval; unbounded intervals use the near end."""
    a = int(interval.lo)
    far = a if math.isinf(interval.hi) else int(interval.hi)
    return a, far


def eval_metric_atom(interp: Interpretation, atom: MetricAtom, t: int) -> bool:
    return Evaluator(interp).value(atom, t)


def models_fact(interp: Interpretation, atom: MetricAtom, rho: Interval) -> bool:
    """Whether the atom holds at every point of rho, including unbounded rho."""
    return Evaluator(interp).all(atom, rho.lo, rho.hi)


def dataset_entails(dataset: Dataset, atom: MetricAtom, t: int) -> bool:
    return Evaluator(Interpretation.from_dataset(dataset)).value(atom, t)


def stabilization_bounds(interp: Interpretation, atom: MetricAtom) -> Tuple[int, int]:
    return Evaluator(interp).bounds(atom)


def build_interpretation(
    points: Mapping[Rel, Iterable[int]],
    left_tails: Iterable[Rel] = (),
    right_tails: Iterable[Rel] = (),
    box: Optional[Interval] = None,
) -> Interpretation:
    """Interpretation from explicit points plus tails that start just outside ``box``."""
    runs: Dict[Rel, List[Interval]] = {}
    for atom, atom_points in points.items():
        runs.setdefault(atom, []).extend(runs_from_points(atom_points))
    left_tails = list(left_tails)
    right_tails = list(right_tails)
    if (left_tails or right_tails) and box is None:
        raise temporalis_error(INVALID_ARGUMENT, "tails require a box")
    for atom in left_tails:
        runs.setdefault(atom, []).append(Interval(-math.inf, box.lo - 1))
    for atom in right_tails:
        runs.setdefault(atom, []).append(Interval(box.hi + 1, math.inf))
    return Interpretation.from_runs(runs)
