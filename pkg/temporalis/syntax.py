"""Abstract syntax of DatalogMTL programs with negation, and static analyses over it."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import (
    EMPTY_INTERVAL,
    INVALID_HEAD,
    INVALID_INTERVAL,
    UNSAFE_RULE,
    temporalis_error,
)

INF = math.inf

BOXMINUS = "BOXMINUS"
BOXPLUS = "BOXPLUS"
DIAMONDMINUS = "DIAMONDMINUS"
DIAMONDPLUS = "DIAMONDPLUS"
SINCE = "SINCE"
UNTIL = "UNTIL"

UNARY_OPS = (BOXMINUS, BOXPLUS, DIAMONDMINUS, DIAMONDPLUS)
BINARY_OPS = (SINCE, UNTIL)
PAST_OPS = frozenset({BOXMINUS, DIAMONDMINUS, SINCE})
FUTURE_OPS = frozenset({BOXPLUS, DIAMONDPLUS, UNTIL})
BOX_OPS = frozenset({BOXMINUS, BOXPLUS})
DIAMOND_OPS = frozenset({DIAMONDMINUS, DIAMONDPLUS})

Endpoint = Union[int, float]


@dataclass(frozen=True, order=True)
class Interval:
    """Integer interval, closed on every finite endpoint.

    Infinite ends are stored as ``-math.inf``/``math.inf`` and are implicitly open.
    """

    lo: Endpoint
    hi: Endpoint

    def __post_init__(self) -> None:
        if self.lo == INF or self.hi == -INF:
            raise temporalis_error(INVALID_INTERVAL, f"invalid interval endpoints {self.lo}, {self.hi}")
        if self.lo > self.hi:
            raise temporalis_error(EMPTY_INTERVAL, f"interval [{self.lo},{self.hi}] contains no integer")

    @classmethod
    def make(
        cls,
        lo: Endpoint,
        hi: Endpoint,
        lo_closed: bool = True,
        hi_closed: bool = True,
    ) -> "Interval":
        if (math.isinf(lo) and lo_closed) or (math.isinf(hi) and hi_closed):
            raise temporalis_error(INVALID_INTERVAL, "closed brackets cannot be used with infinite endpoints")
        if not math.isinf(lo):
            lo = int(lo) if lo_closed else int(lo) + 1
        if not math.isinf(hi):
            hi = int(hi) if hi_closed else int(hi) - 1
        if lo > hi:
            raise temporalis_error(EMPTY_INTERVAL, "interval contains no integer")
        return cls(lo, hi)

    @classmethod
    def point(cls, t: int) -> "Interval":
        return cls(t, t)

    @property
    def lo_closed(self) -> bool:
        return not math.isinf(self.lo)

    @property
    def hi_closed(self) -> bool:
        return not math.isinf(self.hi)

    @property
    def bounded(self) -> bool:
        return self.lo_closed and self.hi_closed

    @property
    def punctual(self) -> bool:
        return self.lo == self.hi

    def contains(self, t: Endpoint) -> bool:
        return self.lo <= t <= self.hi

    def shift(self, offset: int) -> "Interval":
        return Interval(self.lo + offset, self.hi + offset)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def points(self) -> range:
        if not self.bounded:
            raise temporalis_error(INVALID_INTERVAL, f"cannot enumerate unbounded interval {self}")
        return range(int(self.lo), int(self.hi) + 1)

    def finite_endpoints(self) -> List[int]:
        return [int(value) for value in (self.lo, self.hi) if not math.isinf(value)]

    def __str__(self) -> str:
        left = "(-inf" if math.isinf(self.lo) else f"[{int(self.lo)}"
        right = "inf)" if math.isinf(self.hi) else f"{int(self.hi)}]"
        return f"{left},{right}"


UNBOUNDED_FROM_ZERO = Interval(0, INF)


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


def make_term(name: str) -> Term:
    if name[0].isupper() or name[0] == "_":
        return Var(name)
    return Const(name)


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "TOP"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "BOTTOM"


@dataclass(frozen=True)
class Rel:
    predicate: str
    terms: Tuple[Term, ...] = ()

    def __str__(self) -> str:
        return format_atom(self)


@dataclass(frozen=True)
class Unary:
    op: str
    interval: Interval
    operand: "MetricAtom"

    def __str__(self) -> str:
        return format_atom(self)


@dataclass(frozen=True)
class Binary:
    op: str
    interval: Interval
    left: "MetricAtom"
    right: "MetricAtom"

    def __str__(self) -> str:
        return format_atom(self)


MetricAtom = Union[Top, Bottom, Rel, Unary, Binary]

TOP = Top()
BOTTOM = Bottom()


def rel(predicate: str, *terms: str) -> Rel:
    return Rel(predicate, tuple(make_term(term) for term in terms))


def subatoms(atom: MetricAtom) -> Iterator[MetricAtom]:
    """Pre-order traversal including the atom itself."""
    yield atom
    if isinstance(atom, Unary):
        yield from subatoms(atom.operand)
    elif isinstance(atom, Binary):
        yield from subatoms(atom.left)
        yield from subatoms(atom.right)


def operators(atom: MetricAtom) -> frozenset:
    return frozenset(node.op for node in subatoms(atom) if isinstance(node, (Unary, Binary)))


def relational_atoms(atom: MetricAtom) -> Iterator[Rel]:
    for node in subatoms(atom):
        if isinstance(node, Rel):
            yield node


def atom_variables(atom: MetricAtom) -> frozenset:
    return frozenset(
        term for node in relational_atoms(atom) for term in node.terms if isinstance(term, Var)
    )


def atom_constants(atom: MetricAtom) -> frozenset:
    return frozenset(
        term for node in relational_atoms(atom) for term in node.terms if isinstance(term, Const)
    )


def is_ground(atom: MetricAtom) -> bool:
    return not atom_variables(atom)


def is_compound(atom: MetricAtom) -> bool:
    return isinstance(atom, (Unary, Binary))


def depth(atom: MetricAtom) -> int:
    if isinstance(atom, Unary):
        return 1 + depth(atom.operand)
    if isinstance(atom, Binary):
        return 1 + max(depth(atom.left), depth(atom.right))
    return 0


def safe_variables(atom: MetricAtom) -> frozenset:
    """Variables bound by a positive occurrence of the atom.

    Left operands of SINCE/UNTIL bind nothing.
    """
    if isinstance(atom, Rel):
        return atom_variables(atom)
    if isinstance(atom, Unary):
        return safe_variables(atom.operand)
    if isinstance(atom, Binary):
        return safe_variables(atom.right)
    return frozenset()


def substitute(atom: MetricAtom, mapping: Mapping[Var, Term]) -> MetricAtom:
    if isinstance(atom, Rel):
        if not atom.terms:
            return atom
        return Rel(atom.predicate, tuple(mapping.get(term, term) if isinstance(term, Var) else term for term in atom.terms))
    if isinstance(atom, Unary):
        return Unary(atom.op, atom.interval, substitute(atom.operand, mapping))
    if isinstance(atom, Binary):
        return Binary(atom.op, atom.interval, substitute(atom.left, mapping), substitute(atom.right, mapping))
    return atom


def atom_intervals(atom: MetricAtom) -> Iterator[Interval]:
    for node in subatoms(atom):
        if isinstance(node, (Unary, Binary)):
            yield node.interval


def reach(atom: MetricAtom) -> int:
    """How far, in time points, the value of an atom can look away from its evaluation point."""
    if isinstance(atom, Unary):
        interval = atom.interval
        span = interval.lo if math.isinf(interval.hi) else interval.hi
        return reach(atom.operand) + int(span) + 1
    if isinstance(atom, Binary):
        interval = atom.interval
        span = interval.lo if math.isinf(interval.hi) else interval.hi
        return max(reach(atom.left), reach(atom.right)) + int(span) + 1
    return 0


def atom_key(atom: MetricAtom) -> str:
    return format_atom(atom)


@dataclass(frozen=True)
class Rule:
    head: MetricAtom
    positive: Tuple[MetricAtom, ...] = ()
    negative: Tuple[MetricAtom, ...] = ()

    @property
    def body(self) -> Tuple[MetricAtom, ...]:
        return self.positive + self.negative

    def atoms(self) -> Iterator[MetricAtom]:
        yield self.head
        yield from self.positive
        yield from self.negative

    def variables(self) -> frozenset:
        return frozenset().union(*(atom_variables(atom) for atom in self.atoms()))

    def constants(self) -> frozenset:
        return frozenset().union(*(atom_constants(atom) for atom in self.atoms()))

    def is_ground(self) -> bool:
        return not self.variables()

    def substitute(self, mapping: Mapping[Var, Term]) -> "Rule":
        return Rule(
            substitute(self.head, mapping),
            tuple(substitute(atom, mapping) for atom in self.positive),
            tuple(substitute(atom, mapping) for atom in self.negative),
        )

    def __str__(self) -> str:
        return format_rule(self)


def is_valid_head(head: MetricAtom) -> bool:
    if isinstance(head, (Top, Bottom, Rel)):
        return True
    if isinstance(head, Unary) and head.op in BOX_OPS:
        return is_valid_head(head.operand)
    return False


def unsafe_variables(rule: Rule) -> List[Var]:
    bound = frozenset().union(*(safe_variables(atom) for atom in rule.positive))
    return sorted(atom_variables(rule.head) - bound)


def check_rule(rule: Rule, index: int) -> None:
    if not is_valid_head(rule.head):
        raise temporalis_error(INVALID_HEAD, f"rule {index}: head {format_atom(rule.head)} is not allowed in a rule head")
    missing = unsafe_variables(rule)
    if missing:
        raise temporalis_error(
            UNSAFE_RULE,
            f"rule {index}: variable {missing[0]} does not occur in a positive body atom outside a left SINCE/UNTIL operand",
        )


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...] = ()

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    @cached_property
    def constants(self) -> frozenset:
        return frozenset().union(*(rule.constants() for rule in self.rules))

    @cached_property
    def predicates(self) -> frozenset:
        return frozenset(
            node.predicate for rule in self.rules for atom in rule.atoms() for node in relational_atoms(atom)
        )

    @cached_property
    def t_pi(self) -> int:
        numbers = [
            value
            for rule in self.rules
            for atom in rule.atoms()
            for interval in atom_intervals(atom)
            for value in interval.finite_endpoints()
            if value > 0
        ]
        return max(numbers, default=1)

    def is_ground(self) -> bool:
        return all(rule.is_ground() for rule in self.rules)

    def check(self) -> "Program":
        for index, rule in enumerate(self.rules):
            check_rule(rule, index)
        return self

    def __str__(self) -> str:
        return format_program(self)


@dataclass(frozen=True)
class Fact:
    atom: Rel
    interval: Interval

    def __str__(self) -> str:
        return format_fact(self)


@dataclass(frozen=True)
class Dataset:
    facts: Tuple[Fact, ...] = ()

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    @cached_property
    def _extent(self) -> Tuple[int, int]:
        numbers = [value for fact in self.facts for value in fact.interval.finite_endpoints()]
        if not numbers:
            return (0, 0)
        return (min(numbers), max(numbers))

    @property
    def t_min(self) -> int:
        return self._extent[0]

    @property
    def t_max(self) -> int:
        return self._extent[1]

    @cached_property
    def constants(self) -> frozenset:
        return frozenset().union(*(atom_constants(fact.atom) for fact in self.facts))

    @cached_property
    def predicates(self) -> frozenset:
        return frozenset(fact.atom.predicate for fact in self.facts)

    @property
    def bounded(self) -> bool:
        return all(fact.interval.bounded for fact in self.facts)

    def relational_atoms(self) -> List[Rel]:
        return sorted({fact.atom for fact in self.facts}, key=atom_key)

    def with_facts(self, extra: Iterable[Fact]) -> "Dataset":
        return Dataset(self.facts + tuple(extra))

    def __str__(self) -> str:
        return format_dataset(self)


def data_extent(dataset: Dataset) -> Tuple[int, int]:
    return (dataset.t_min, dataset.t_max)


def ground(program: Program, dataset: Dataset) -> Tuple[Rule, ...]:
    """All ground instances over the constants of the program and the dataset."""
    constants = sorted(program.constants | dataset.constants)
    grounded: List[Rule] = []
    for rule in program.rules:
        variables = sorted(rule.variables())
        if not variables:
            grounded.append(rule)
            continue
        for combination in itertools.product(constants, repeat=len(variables)):
            grounded.append(rule.substitute(dict(zip(variables, combination))))
    return tuple(grounded)


def ground_program(program: Program, dataset: Dataset) -> Program:
    return Program(ground(program, dataset))


def is_forward_propagating(program: Program) -> bool:
    for rule in program.rules:
        if BOXMINUS in operators(rule.head):
            return False
        for atom in rule.body:
            if operators(atom) & FUTURE_OPS:
                return False
    return True


@dataclass(frozen=True)
class AtomUniverse:
    atoms: Tuple[MetricAtom, ...]

    @cached_property
    def index(self) -> Dict[MetricAtom, int]:
        return {atom: position for position, atom in enumerate(self.atoms)}

    @cached_property
    def relational(self) -> Tuple[Rel, ...]:
        return tuple(atom for atom in self.atoms if isinstance(atom, Rel))

    def __contains__(self, atom: object) -> bool:
        return atom in self.index

    def __iter__(self) -> Iterator[MetricAtom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)


def atom_universe(program: Program, dataset: Dataset) -> AtomUniverse:
    """Relational atoms of the data, every metric atom of the grounding and the unbounded boxes
    over each relational atom of the grounding."""
    collected = set(fact.atom for fact in dataset.facts)
    mentioned = set()
    for rule in ground(program, dataset):
        for atom in rule.atoms():
            for node in subatoms(atom):
                if isinstance(node, (Top, Bottom)):
                    continue
                collected.add(node)
                if isinstance(node, Rel):
                    mentioned.add(node)
    for atom in mentioned:
        collected.add(Unary(BOXMINUS, UNBOUNDED_FROM_ZERO, atom))
        collected.add(Unary(BOXPLUS, UNBOUNDED_FROM_ZERO, atom))
    return AtomUniverse(tuple(sorted(collected, key=atom_key)))


def format_atom(atom: MetricAtom) -> str:
    if isinstance(atom, Top):
        return "TOP"
    if isinstance(atom, Bottom):
        return "BOTTOM"
    if isinstance(atom, Rel):
        if not atom.terms:
            return atom.predicate
        return f"{atom.predicate}({','.join(str(term) for term in atom.terms)})"
    if isinstance(atom, Unary):
        operand = format_atom(atom.operand)
        if isinstance(atom.operand, Binary):
            operand = f"({operand})"
        return f"{atom.op}{atom.interval} {operand}"
    if isinstance(atom, Binary):
        return f"{_operand(atom.left)} {atom.op}{atom.interval} {_operand(atom.right)}"
    raise TypeError(f"not a metric atom: {atom!r}")


def _operand(atom: MetricAtom) -> str:
    text = format_atom(atom)
    if is_compound(atom):
        return f"({text})"
    return text


def format_rule(rule: Rule) -> str:
    literals = [format_atom(atom) for atom in rule.positive]
    literals.extend(f"not {format_atom(atom)}" for atom in rule.negative)
    if not literals:
        return f"{format_atom(rule.head)} ."
    return f"{format_atom(rule.head)} :- {', '.join(literals)} ."


def format_program(program: Program) -> str:
    return "".join(f"{format_rule(rule)}\n" for rule in program.rules)


def format_time(interval: Interval) -> str:
    if interval.punctual:
        return str(int(interval.lo))
    return str(interval)


def format_fact(fact: Fact) -> str:
    return f"{format_atom(fact.atom)}@{format_time(fact.interval)} ."


def format_dataset(dataset: Dataset) -> str:
    return "".join(f"{format_fact(fact)}\n" for fact in dataset.facts)
