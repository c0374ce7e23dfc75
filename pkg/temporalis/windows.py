"""Windows: finite here/there slices of an HT-interpretation over every tracked atom.

A window over ``rho`` lists, for every point of ``rho``, the tracked atoms holding there in the
here layer and in the there layer, plus the flag ``b`` recording that the two layers have
already differed. Validity is a set of propositional constraints over both layers: compound
atoms must be realisable from their operands, and every ground rule must be locally satisfied.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

from .constraints import (
    FALSE,
    TRUE,
    Constraint,
    ConstraintSolver,
    Expr,
    conj,
    disj,
    first_violation,
    iff,
    implies,
    neg,
    var,
)
from .errors import INVALID_ARGUMENT, temporalis_error
from .syntax import (
    BOX_OPS,
    BOXMINUS,
    BOXPLUS,
    DIAMONDMINUS,
    SINCE,
    UNBOUNDED_FROM_ZERO,
    UNTIL,
    AtomUniverse,
    Binary,
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
    format_atom,
    is_compound,
    subatoms,
)
from .temporal import Evaluator, Interpretation

HERE = "H"
THERE = "T"
LEFT = "left"
RIGHT = "right"

Column = FrozenSet[MetricAtom]
WindowLetter = Column

EMPTY_COLUMN: Column = frozenset()


def column_key(column: Column) -> Tuple[int, List[str]]:
    return (len(column), sorted(atom_key(atom) for atom in column))


def relational_part(column: Column) -> FrozenSet[Rel]:
    return frozenset(atom for atom in column if isinstance(atom, Rel))


@dataclass(frozen=True)
class WindowContext:
    """What a window is checked against: ground rules, tracked atoms, t_pi and optional data.

    ``allowed`` restricts which relational atoms may hold at all.
    """

    rules: Tuple[Rule, ...]
    atoms: Tuple[MetricAtom, ...]
    t_pi: int
    dataset: Optional[Dataset] = None
    allowed: Optional[FrozenSet[Rel]] = None

    @cached_property
    def tracked(self) -> FrozenSet[MetricAtom]:
        return frozenset(self.atoms)

    @cached_property
    def relational(self) -> Tuple[Rel, ...]:
        return tuple(atom for atom in self.atoms if isinstance(atom, Rel))

    @cached_property
    def data_evaluator(self) -> Optional[Evaluator]:
        if self.dataset is None:
            return None
        return Evaluator(Interpretation.from_dataset(self.dataset))

    def acceptance_atoms(self, direction: str) -> Tuple[MetricAtom, ...]:
        """Tracked [0,inf) atoms looking in ``direction``; a run must keep fulfilling them."""
        ops = (BOXPLUS, UNTIL) if direction == RIGHT else (BOXMINUS, SINCE)
        return tuple(
            atom
            for atom in self.atoms
            if is_compound(atom) and atom.op in ops and atom.interval == UNBOUNDED_FROM_ZERO
        )

    @cached_property
    def cache(self) -> "WindowCache":
        return WindowCache(self)

    def without_dataset(self) -> "WindowContext":
        if self.dataset is None:
            return self
        return self.cache.derived(("without_dataset",), lambda: replace(self, dataset=None))

    def with_allowed(self, allowed: Optional[FrozenSet[Rel]]) -> "WindowContext":
        if allowed == self.allowed:
            return self
        return self.cache.derived(("allowed", allowed), lambda: replace(self, allowed=allowed))


def window_context(
    program: Program,
    dataset: Optional[Dataset] = None,
    universe: Optional[AtomUniverse] = None,
    t_pi: Optional[int] = None,
) -> WindowContext:
    """Track the relational atoms of the universe (or of the program and data) and every compound
    atom occurring in a rule body."""
    if not program.is_ground():
        raise temporalis_error(INVALID_ARGUMENT, "windows are defined over ground programs")
    atoms = set()
    if universe is not None:
        atoms.update(universe.relational)
    if dataset is not None:
        atoms.update(fact.atom for fact in dataset.facts)
    for rule in program.rules:
        for atom in rule.atoms():
            for node in subatoms(atom):
                if isinstance(node, Rel):
                    atoms.add(node)
        for atom in rule.body:
            for node in subatoms(atom):
                if is_compound(node):
                    atoms.add(node)
    return WindowContext(
        rules=program.rules,
        atoms=tuple(sorted(atoms, key=atom_key)),
        t_pi=program.t_pi if t_pi is None else t_pi,
        dataset=dataset,
    )


@dataclass(frozen=True)
class Window:
    rho: Interval
    here: Tuple[Column, ...]
    there: Tuple[Column, ...]
    b: bool = False

    def __post_init__(self) -> None:
        if not self.rho.bounded:
            raise temporalis_error(INVALID_ARGUMENT, f"window interval {self.rho} must be bounded")
        size = int(self.rho.hi - self.rho.lo) + 1
        if len(self.here) != size or len(self.there) != size:
            raise temporalis_error(INVALID_ARGUMENT, f"window over {self.rho} needs {size} columns per layer")
        for offset, (here, there) in enumerate(zip(self.here, self.there)):
            if not here <= there:
                raise temporalis_error(
                    INVALID_ARGUMENT, f"here is not contained in there at {int(self.rho.lo) + offset}"
                )

    @property
    def lo(self) -> int:
        return int(self.rho.lo)

    @property
    def hi(self) -> int:
        return int(self.rho.hi)

    @property
    def length(self) -> int:
        return self.hi - self.lo

    def points(self) -> range:
        return self.rho.points()

    def here_at(self, t: int) -> Column:
        return self.here[t - self.lo]

    def there_at(self, t: int) -> Column:
        return self.there[t - self.lo]

    @property
    def here_facts(self) -> FrozenSet[Tuple[MetricAtom, int]]:
        return frozenset((atom, t) for t in self.points() for atom in self.here_at(t))

    @property
    def there_facts(self) -> FrozenSet[Tuple[MetricAtom, int]]:
        return frozenset((atom, t) for t in self.points() for atom in self.there_at(t))

    @property
    def total(self) -> bool:
        return self.here == self.there

    @property
    def is_initial(self) -> bool:
        return self.total != self.b

    def shift(self, offset: int) -> "Window":
        return Window(self.rho.shift(offset), self.here, self.there, self.b)

    def restrict(self, lo: int, hi: int) -> "Window":
        if lo < self.lo or hi > self.hi or lo > hi:
            raise temporalis_error(INVALID_ARGUMENT, f"[{lo},{hi}] is not inside window {self.rho}")
        start, stop = lo - self.lo, hi - self.lo + 1
        return Window(Interval(lo, hi), self.here[start:stop], self.there[start:stop], self.b)

    def with_flag(self, b: bool) -> "Window":
        return Window(self.rho, self.here, self.there, b)

    def sort_key(self) -> Tuple[Any, ...]:
        return (
            sum(len(column) for column in self.there),
            sum(len(column) for column in self.here),
            [column_key(column) for column in self.there],
            [column_key(column) for column in self.here],
            self.b,
        )

    def __str__(self) -> str:
        parts = []
        for t in self.points():
            there = self.there_at(t)
            here = self.here_at(t)
            atoms = [
                format_atom(atom) if atom in here else f"{format_atom(atom)}?"
                for atom in sorted(there, key=atom_key)
            ]
            parts.append(f"{t}: {{{', '.join(atoms)}}}")
        return f"<{self.rho} b={int(self.b)} {'; '.join(parts)}>"


def total_window(rho: Interval, columns: Sequence[Column]) -> Window:
    columns = tuple(frozenset(column) for column in columns)
    return Window(rho, columns, columns, False)


@dataclass(frozen=True)
class WindowCheck:
    valid: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


class WindowEncoding:
    """Constraints over the variables ``(layer, atom, t)`` for ``t`` in ``rho``.

    With ``tie`` the two layers share variables, which encodes H = T.
    """

    def __init__(self, context: WindowContext, rho: Interval, *, tie: bool = False, data: bool = True) -> None:
        self.context = context
        self.rho = rho
        self.tie = tie
        self.data = data

    def key(self, layer: str, atom: MetricAtom, t: int) -> Tuple[str, MetricAtom, int]:
        return (THERE if self.tie else layer, atom, t)

    def value(self, layer: str, atom: MetricAtom, t: int) -> Optional[Expr]:
        if isinstance(atom, Top):
            return TRUE
        if isinstance(atom, Bottom):
            return FALSE
        if not self.rho.contains(t):
            return None
        if atom not in self.context.tracked:
            raise temporalis_error(INVALID_ARGUMENT, f"atom {format_atom(atom)} is not tracked by the window")
        return var(self.key(layer, atom, t))

    def _inside(self, layer: str, atom: MetricAtom, t: int) -> Expr:
        found = self.value(layer, atom, t)
        assert found is not None
        return found

    @cached_property
    def layers(self) -> Tuple[str, ...]:
        return (THERE,) if self.tie else (HERE, THERE)

    def constraints(self) -> List[Constraint]:
        result: List[Constraint] = []
        points = list(self.rho.points())
        compound = [atom for atom in self.context.atoms if is_compound(atom)]
        for layer in self.layers:
            for atom in compound:
                for t in points:
                    result.extend(self._realisation(layer, atom, t))
        if not self.tie:
            for atom in self.context.atoms:
                for t in points:
                    result.append(
                        Constraint(f"{format_atom(atom)} at {t} is here but not there", implies(
                            self._inside(HERE, atom, t), self._inside(THERE, atom, t)
                        ))
                    )
        for index, rule in enumerate(self.context.rules):
            for t in points:
                result.extend(self._local_satisfaction(index, rule, t))
        if self.data and self.context.dataset is not None:
            evaluator = self.context.data_evaluator
            for atom in self.context.atoms:
                for t in points:
                    if evaluator.value(atom, t):
                        result.append(
                            Constraint(f"data entails {format_atom(atom)} at {t}", self._inside(HERE, atom, t))
                        )
        if self.context.allowed is not None:
            for atom in self.context.relational:
                if atom in self.context.allowed:
                    continue
                for t in points:
                    result.append(
                        Constraint(f"{format_atom(atom)} is outside the vocabulary", neg(self._inside(THERE, atom, t)))
                    )
        return result

    def _local_satisfaction(self, index: int, rule: Rule, t: int) -> List[Constraint]:
        negative = [neg(self._inside(THERE, atom, t)) for atom in rule.negative]
        result = []
        for layer in self.layers:
            positive = [self._inside(layer, atom, t) for atom in rule.positive]
            head = self._head(rule.head, layer, t)
            label = f"rule {index} at {t} ({'there' if layer == THERE else 'here'})"
            result.append(Constraint(label, implies(conj(*positive, *negative), head)))
        return result

    def _head(self, head: MetricAtom, layer: str, t: int) -> Expr:
        if isinstance(head, (Top, Bottom, Rel)):
            return self._inside(layer, head, t)
        raise temporalis_error(INVALID_ARGUMENT, f"head {format_atom(head)} is not in normal form")

    def _realisation(self, layer: str, atom: MetricAtom, t: int) -> List[Constraint]:
        label = f"{format_atom(atom)} at {t} ({'there' if layer == THERE else 'here'})"
        x = self._inside(layer, atom, t)
        interval = atom.interval
        unbounded = math.isinf(interval.hi)
        if unbounded and (interval != UNBOUNDED_FROM_ZERO or (isinstance(atom, Unary) and atom.op not in BOX_OPS)):
            raise temporalis_error(INVALID_ARGUMENT, f"{format_atom(atom)} is not in normal form")
        if isinstance(atom, Unary):
            step = -1 if atom.op in (BOXMINUS, DIAMONDMINUS) else 1
            if unbounded:
                return self._unbounded_box(label, layer, atom, t, x, step)
            values = [self.value(layer, atom.operand, t + step * s) for s in range(int(interval.lo), int(interval.hi) + 1)]
            inside = [value for value in values if value is not None]
            complete = len(inside) == len(values)
            if atom.op in BOX_OPS:
                expr = iff(x, conj(*inside)) if complete else implies(x, conj(*inside))
            else:
                expr = iff(x, disj(*inside)) if complete else implies(disj(*inside), x)
            return [Constraint(label, expr)]
        step = -1 if atom.op == SINCE else 1
        if unbounded:
            return self._unbounded_since(label, layer, atom, t, x, step)
        terms: List[Expr] = []
        escapes = False
        for distance in range(int(interval.lo), int(interval.hi) + 1):
            right = self.value(layer, atom.right, t + step * distance)
            between = [self.value(layer, atom.left, t + step * u) for u in range(1, distance)]
            if right is None or any(value is None for value in between):
                escapes = True
                continue
            terms.append(conj(right, *between))
        if not escapes:
            return [Constraint(label, iff(x, disj(*terms)))]
        edge = [
            self._inside(layer, atom.left, u)
            for u in (range(int(self.rho.lo), t) if step < 0 else range(t + 1, int(self.rho.hi) + 1))
        ]
        return [
            Constraint(label, implies(disj(*terms), x)),
            Constraint(label, implies(x, disj(*terms, conj(*edge)))),
        ]

    def _unbounded_box(self, label: str, layer: str, atom: Unary, t: int, x: Expr, step: int) -> List[Constraint]:
        now = self._inside(layer, atom.operand, t)
        result = [Constraint(label, implies(x, now))]
        previous = self.value(layer, atom, t + step)
        if previous is not None:
            result.append(Constraint(label, iff(x, conj(now, previous))))
        return result

    def _unbounded_since(self, label: str, layer: str, atom: Binary, t: int, x: Expr, step: int) -> List[Constraint]:
        now = self._inside(layer, atom.right, t)
        result = [Constraint(label, implies(now, x))]
        previous = self.value(layer, atom, t + step)
        if previous is not None:
            before = self._inside(layer, atom.right, t + step)
            left = self._inside(layer, atom.left, t + step)
            result.append(Constraint(label, iff(x, disj(now, before, conj(left, previous)))))
        return result

    def assignment(self, window: Window) -> Dict[Hashable, bool]:
        values: Dict[Hashable, bool] = {}
        for t in window.points():
            for layer, column in ((HERE, window.here_at(t)), (THERE, window.there_at(t))):
                for atom in self.context.atoms:
                    values[(layer, atom, t)] = atom in column
        if self.tie:
            values = {key: value for key, value in values.items() if key[0] == THERE}
        return values

    def fixed(self, window: Window, layers: Sequence[str] = (HERE, THERE)) -> Dict[Hashable, bool]:
        values: Dict[Hashable, bool] = {}
        for t in window.points():
            for layer in layers:
                column = window.here_at(t) if layer == HERE else window.there_at(t)
                for atom in self.context.atoms:
                    values[self.key(layer, atom, t)] = atom in column
        return values

    def column_keys(self, layer: str, t: int) -> List[Hashable]:
        return [self.key(layer, atom, t) for atom in self.context.atoms]

    def column_from(self, assignment: Dict[Hashable, bool], layer: str, t: int) -> Column:
        return frozenset(atom for atom in self.context.atoms if assignment.get(self.key(layer, atom, t), False))

    def solver(self) -> ConstraintSolver:
        return ConstraintSolver(self.constraints())


class WindowCache:
    """Encodings, solvers and successor columns of one context, shared by every automaton built
    over it.

    Without a dataset validity is invariant under shifting, so successors are computed once for
    the canonical form of a window. ``computed`` counts the distinct transitions worked out so
    far and is what the state guard charges.
    """

    def __init__(self, context: WindowContext) -> None:
        self.context = context
        self._lock = threading.Lock()
        self._encodings: Dict[Tuple[Interval, bool], Tuple[WindowEncoding, ConstraintSolver]] = {}
        self._constraints: Dict[Interval, List[Constraint]] = {}
        self._derived: Dict[Hashable, WindowContext] = {}
        self.there_columns: Dict[Hashable, List[Column]] = {}
        self.here_columns: Dict[Hashable, List[Column]] = {}
        self.steps: Dict[Hashable, List[Any]] = {}
        self.computed = 0

    def derived(self, key: Hashable, build: Callable[[], WindowContext]) -> WindowContext:
        with self._lock:
            found = self._derived.get(key)
            if found is None:
                found = self._derived[key] = build()
            return found

    def encoding(self, rho: Interval, tie: bool) -> Tuple[WindowEncoding, ConstraintSolver]:
        with self._lock:
            found = self._encodings.get((rho, tie))
            if found is None:
                encoding = WindowEncoding(self.context, rho, tie=tie)
                found = self._encodings[(rho, tie)] = (encoding, encoding.solver())
            return found

    def constraints(self, rho: Interval) -> List[Constraint]:
        with self._lock:
            found = self._constraints.get(rho)
            if found is None:
                found = self._constraints[rho] = WindowEncoding(self.context, rho).constraints()
            return found

    def base(self, window: Window) -> Window:
        """The window successors are computed for: canonical when no dataset pins positions."""
        if self.context.dataset is None and window.lo != 0:
            return window.shift(-window.lo)
        return window


def _unknown_atoms(window: Window, context: WindowContext) -> Optional[str]:
    for t in window.points():
        for atom in window.there_at(t):
            if atom not in context.tracked:
                return f"{format_atom(atom)} at {t} is not a tracked atom"
    return None


def validate_window(window: Window, context: WindowContext) -> WindowCheck:
    """Realisability of both layers, local satisfaction of every rule at every point, and, when
    the context carries data, every entailed atom in the here layer."""
    unknown = _unknown_atoms(window, context)
    if unknown is not None:
        return WindowCheck(False, unknown)
    encoding = WindowEncoding(context, window.rho)
    violated = first_violation(context.cache.constraints(window.rho), encoding.assignment(window))
    if violated is not None:
        return WindowCheck(False, violated.label)
    return WindowCheck(True)


def enumerate_total_windows(
    context: WindowContext, rho: Interval, *, limit: Optional[int] = None
) -> List[Window]:
    """Every window over ``rho`` with H = T and b = 0 that passes validation, in canonical order."""
    encoding, solver = context.cache.encoding(rho, tie=True)
    projection = [key for t in rho.points() for key in encoding.column_keys(THERE, t)]
    windows = []
    for assignment in solver.enumerate(projection, limit=limit):
        columns = [encoding.column_from(assignment, THERE, t) for t in rho.points()]
        windows.append(total_window(rho, columns))
    return sorted(windows, key=Window.sort_key)


def enumerate_here_layers(
    context: WindowContext, there: Window, *, limit: Optional[int] = None
) -> List[Window]:
    """Every window with the there layer of ``there`` and some valid here layer under it."""
    encoding, solver = context.cache.encoding(there.rho, tie=False)
    fixed = encoding.fixed(there, layers=(THERE,))
    projection = [key for t in there.points() for key in encoding.column_keys(HERE, t)]
    windows = []
    for assignment in solver.enumerate(projection, fixed, limit=limit):
        here = tuple(encoding.column_from(assignment, HERE, t) for t in there.points())
        window = Window(there.rho, here, there.there)
        windows.append(window.with_flag(not window.total))
    return sorted(windows, key=Window.sort_key)


def next_point(window: Window, direction: str) -> int:
    return window.hi + 1 if direction == RIGHT else window.lo - 1


def slide(window: Window, direction: str, here: Column, there: Column, b: bool) -> Window:
    """Drop the column farthest from ``direction`` and append one on that side."""
    if direction == RIGHT:
        return Window(window.rho.shift(1), window.here[1:] + (here,), window.there[1:] + (there,), b)
    return Window(window.rho.shift(-1), (here,) + window.here[:-1], (there,) + window.there[:-1], b)


def extended(window: Window, direction: str, here: Column, there: Column) -> Window:
    """The window grown by one column on the ``direction`` side."""
    if direction == RIGHT:
        return Window(Interval(window.lo, window.hi + 1), window.here + (here,), window.there + (there,), window.b)
    return Window(Interval(window.lo - 1, window.hi), (here,) + window.here, (there,) + window.there, window.b)


def _grown(window: Window, direction: str) -> Interval:
    if direction == RIGHT:
        return Interval(window.lo, window.hi + 1)
    return Interval(window.lo - 1, window.hi)


def next_there_columns(
    window: Window, context: WindowContext, direction: str, *, limit: Optional[int] = None
) -> List[Column]:
    """There-columns that keep the there layer of ``window`` valid as a total window when added
    on the ``direction`` side, in canonical order."""
    cache = context.cache
    base = cache.base(window)
    key = (base.rho, base.there, direction)
    found = cache.there_columns.get(key)
    if found is None:
        t = next_point(base, direction)
        encoding, solver = cache.encoding(_grown(base, direction), tie=True)
        fixed = encoding.fixed(base, layers=(THERE,))
        solutions = solver.enumerate(encoding.column_keys(THERE, t), fixed, limit=limit)
        found = sorted((encoding.column_from(assignment, THERE, t) for assignment in solutions), key=column_key)
        cache.there_columns[key] = found
        cache.computed += 1
    return found


def next_here_columns(
    window: Window, context: WindowContext, direction: str, there: Column, *, limit: Optional[int] = None
) -> List[Column]:
    """Here-columns under ``there`` that extend the window by one point, in canonical order."""
    cache = context.cache
    base = cache.base(window)
    key = (base.rho, base.here, base.there, direction, there)
    found = cache.here_columns.get(key)
    if found is None:
        t = next_point(base, direction)
        encoding, solver = cache.encoding(_grown(base, direction), tie=False)
        fixed = encoding.fixed(base)
        fixed.update(zip(encoding.column_keys(THERE, t), (atom in there for atom in context.atoms)))
        solutions = solver.enumerate(encoding.column_keys(HERE, t), fixed, limit=limit)
        found = sorted((encoding.column_from(assignment, HERE, t) for assignment in solutions), key=column_key)
        cache.here_columns[key] = found
        cache.computed += 1
    return found


def decompose(
    here: Interpretation,
    there: Interpretation,
    rho: Interval,
    indices: range,
    context: WindowContext,
) -> List[Window]:
    """Window i covers ``rho`` shifted by i, with every tracked atom evaluated in each layer.

    The flag of window i is set when the layers differ at some point between ``rho`` and the
    window, both included.
    """
    here_values = Evaluator(here)
    there_values = Evaluator(there)
    columns: Dict[int, Tuple[Column, Column]] = {}

    def column(t: int) -> Tuple[Column, Column]:
        if t not in columns:
            columns[t] = (
                frozenset(atom for atom in context.atoms if here_values.value(atom, t)),
                frozenset(atom for atom in context.atoms if there_values.value(atom, t)),
            )
        return columns[t]

    windows = []
    for i in indices:
        span = rho.shift(i)
        cover = span.hull(rho)
        b = any(column(t)[0] != column(t)[1] for t in cover.points())
        here_columns = tuple(column(t)[0] for t in span.points())
        there_columns = tuple(column(t)[1] for t in span.points())
        windows.append(Window(span, here_columns, there_columns, b))
    return windows


def fragment(window: Window, side: str, t_pi: int) -> Window:
    """The first or last t_pi + 1 columns, flagged by whether their layers differ."""
    if window.length < t_pi:
        raise temporalis_error(INVALID_ARGUMENT, f"window {window.rho} is shorter than t_pi = {t_pi}")
    if side == LEFT:
        part = window.restrict(window.lo, window.lo + t_pi)
    elif side == RIGHT:
        part = window.restrict(window.hi - t_pi, window.hi)
    else:
        raise temporalis_error(INVALID_ARGUMENT, f"unknown side {side!r}")
    return part.with_flag(not part.total)


def window_union(
    first: Window,
    second: Window,
    *,
    t_pi: Optional[int] = None,
    context: Optional[WindowContext] = None,
) -> Window:
    if second.lo < first.lo or second.hi < first.hi:
        raise temporalis_error(INVALID_ARGUMENT, "the second window must not start or end before the first")
    if second.lo > first.hi:
        raise temporalis_error(INVALID_ARGUMENT, "windows do not overlap")
    for t in range(second.lo, first.hi + 1):
        if first.here_at(t) != second.here_at(t) or first.there_at(t) != second.there_at(t):
            raise temporalis_error(INVALID_ARGUMENT, f"windows disagree at {t}")
    if t_pi is not None and (first.length < t_pi or second.length < t_pi):
        raise temporalis_error(INVALID_ARGUMENT, f"windows must span at least t_pi = {t_pi}")
    if context is not None:
        for window in (first, second):
            check = validate_window(window, context)
            if not check:
                raise temporalis_error(INVALID_ARGUMENT, f"window {window.rho} is not locally satisfying: {check.reason}")
    tail = second.restrict(first.hi + 1, second.hi) if second.hi > first.hi else None
    here = first.here + (tail.here if tail else ())
    there = first.there + (tail.there if tail else ())
    return Window(Interval(first.lo, second.hi), here, there, first.b or second.b)


def canonicalize(window: Window) -> Tuple[Window, int]:
    offset = -window.lo
    return window.shift(offset), offset


def window_to_json(window: Window, relational_only: bool = False) -> Dict[str, Any]:
    def render(column: Column) -> List[str]:
        atoms = relational_part(column) if relational_only else column
        return sorted(atom_key(atom) for atom in atoms)

    return {
        "rho": [window.lo, window.hi],
        "b": window.b,
        "here": {str(t): render(window.here_at(t)) for t in window.points()},
        "there": {str(t): render(window.there_at(t)) for t in window.points()},
    }
