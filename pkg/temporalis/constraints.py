"""Propositional constraints over labelled variables, evaluated directly or solved with SAT."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from pysat.formula import IDPool
from pysat.solvers import Glucose3

from .errors import GUARD_EXCEEDED, temporalis_error


@dataclass(frozen=True)
class Var:
    key: Hashable


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class Const:
    value: bool


Expr = Union[Var, Not, And, Or, Const]

TRUE = Const(True)
FALSE = Const(False)


def var(key: Hashable) -> Var:
    return Var(key)


def neg(expr: Expr) -> Expr:
    if isinstance(expr, Const):
        return FALSE if expr.value else TRUE
    if isinstance(expr, Not):
        return expr.arg
    return Not(expr)


def conj(*exprs: Expr) -> Expr:
    args: List[Expr] = []
    for expr in exprs:
        if expr == FALSE:
            return FALSE
        if expr == TRUE:
            continue
        if isinstance(expr, And):
            args.extend(expr.args)
        else:
            args.append(expr)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*exprs: Expr) -> Expr:
    args: List[Expr] = []
    for expr in exprs:
        if expr == TRUE:
            return TRUE
        if expr == FALSE:
            continue
        if isinstance(expr, Or):
            args.extend(expr.args)
        else:
            args.append(expr)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def implies(premise: Expr, conclusion: Expr) -> Expr:
    return disj(neg(premise), conclusion)


def iff(left: Expr, right: Expr) -> Expr:
    return conj(implies(left, right), implies(right, left))


def evaluate(expr: Expr, assignment: Mapping[Hashable, bool]) -> bool:
    """Truth value under ``assignment``; unassigned variables are false."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return assignment.get(expr.key, False)
    if isinstance(expr, Not):
        return not evaluate(expr.arg, assignment)
    if isinstance(expr, And):
        return all(evaluate(arg, assignment) for arg in expr.args)
    return any(evaluate(arg, assignment) for arg in expr.args)


@dataclass(frozen=True)
class Constraint:
    label: str
    expr: Expr


def first_violation(constraints: Sequence[Constraint], assignment: Mapping[Hashable, bool]) -> Optional[Constraint]:
    for constraint in constraints:
        if not evaluate(constraint.expr, assignment):
            return constraint
    return None


class ConstraintSolver:
    """Tseitin encoding into one incremental Glucose3 instance with projected model enumeration.

    Fixed values are passed as assumptions. Clauses blocking the solutions of one enumeration
    hang off a fresh selector that is retired when the enumeration ends, so the solver keeps
    serving queries over the same constraints.
    """

    def __init__(self, constraints: Sequence[Constraint] = ()) -> None:
        self._pool = IDPool()
        self._clauses: List[List[int]] = []
        self._aux: Dict[Expr, int] = {}
        self._true = self._pool.id(("const", True))
        self._clauses.append([self._true])
        self._solver: Optional[Glucose3] = None
        self._loaded = 0
        self._lock = threading.Lock()
        self.enumerations = 0
        for constraint in constraints:
            self.add(constraint.expr)

    def literal_of(self, key: Hashable) -> int:
        return self._pool.id(("var", key))

    def add(self, expr: Expr) -> None:
        if isinstance(expr, And):
            for arg in expr.args:
                self.add(arg)
        elif isinstance(expr, Or):
            self._clauses.append([self._literal(arg) for arg in expr.args])
        else:
            self._clauses.append([self._literal(expr)])

    def _literal(self, expr: Expr) -> int:
        if isinstance(expr, Const):
            return self._true if expr.value else -self._true
        if isinstance(expr, Var):
            return self.literal_of(expr.key)
        if isinstance(expr, Not):
            return -self._literal(expr.arg)
        cached = self._aux.get(expr)
        if cached is not None:
            return cached
        args = [self._literal(arg) for arg in expr.args]
        aux = self._pool.id(("aux", len(self._aux)))
        if isinstance(expr, And):
            self._clauses.extend([-aux, arg] for arg in args)
            self._clauses.append([aux] + [-arg for arg in args])
        else:
            self._clauses.append([-aux] + args)
            self._clauses.extend([aux, -arg] for arg in args)
        self._aux[expr] = aux
        return aux

    def _backend(self) -> Glucose3:
        if self._solver is None:
            self._solver = Glucose3()
        for clause in self._clauses[self._loaded :]:
            self._solver.add_clause(clause)
        self._loaded = len(self._clauses)
        return self._solver

    def satisfiable(self, fixed: Mapping[Hashable, bool] = {}) -> bool:
        assumptions = self._assumptions(fixed)
        with self._lock:
            return self._backend().solve(assumptions=assumptions)

    def _assumptions(self, fixed: Mapping[Hashable, bool]) -> List[int]:
        return [self.literal_of(key) if value else -self.literal_of(key) for key, value in fixed.items()]

    def enumerate(
        self,
        projection: Sequence[Hashable],
        fixed: Mapping[Hashable, bool] = {},
        limit: Optional[int] = None,
    ) -> List[Dict[Hashable, bool]]:
        """Distinct assignments to ``projection`` that extend to a model, in discovery order."""
        literals = [self.literal_of(key) for key in projection]
        assumptions = self._assumptions(fixed)
        found: List[Dict[Hashable, bool]] = []
        with self._lock:
            solver = self._backend()
            selector = self._pool.id(("selector", self.enumerations))
            self.enumerations += 1
            assumptions.append(selector)
            try:
                while solver.solve(assumptions=assumptions):
                    if limit is not None and len(found) >= limit:
                        raise temporalis_error(GUARD_EXCEEDED, f"more than {limit} solutions to enumerate")
                    model = set(solver.get_model() or ())
                    assignment = {key: lit in model for key, lit in zip(projection, literals)}
                    found.append(assignment)
                    if not literals:
                        break
                    solver.add_clause([-selector] + [-lit if assignment[key] else lit for key, lit in zip(projection, literals)])
            finally:
                solver.add_clause([-selector])
        return found
