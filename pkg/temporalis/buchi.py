"""Generalised Büchi automata with on-the-fly successors.

Automata never list their states up front. Each one knows its initial states, a successor
function and a per-state letter generator, so products and complements only expand what a
search actually reaches.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import graphviz
import networkx as nx

from .errors import GUARD_EXCEEDED, INVALID_ARGUMENT, temporalis_error

logger = logging.getLogger(__name__)

State = Hashable
Letter = Hashable
Acceptance = Callable[[State], bool]


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix · loop · loop · ...``."""

    prefix: Tuple[Letter, ...]
    loop: Tuple[Letter, ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise temporalis_error(INVALID_ARGUMENT, "a lasso needs a non-empty loop")

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def letter(self, position: int) -> Letter:
        if position < len(self.prefix):
            return self.prefix[position]
        return self.loop[(position - len(self.prefix)) % len(self.loop)]

    def unroll(self, count: int) -> List[Letter]:
        return [self.letter(position) for position in range(count)]

    def next_position(self, position: int) -> int:
        position += 1
        return position if position < len(self) else len(self.prefix)


@dataclass(frozen=True, eq=False)
class GNBA:
    """Generalised nondeterministic Büchi automaton.

    ``letters(state)`` proposes the letters worth trying from a state; ``step`` must accept any
    letter. ``weak`` marks automata with at most one accepting set that no run leaves once
    entered, which allows a cheap exact complement.
    """

    initial: Tuple[State, ...]
    step: Callable[[State, Letter], Iterable[State]]
    letters: Callable[[State], Iterable[Letter]]
    accepting: Tuple[Acceptance, ...] = ()
    alphabet: Optional[Tuple[Letter, ...]] = None
    weak: bool = False
    name: str = "automaton"

    def successors(self, state: State) -> Iterator[Tuple[Letter, State]]:
        for letter in self.letters(state):
            for target in self.step(state, letter):
                yield letter, target

    def accepting_bits(self, state: State) -> Tuple[bool, ...]:
        return tuple(accepts(state) for accepts in self.accepting)


def _member(states: FrozenSet[State]) -> Acceptance:
    return lambda state: state in states


def explicit(
    transitions: Mapping[Tuple[State, Letter], Iterable[State]],
    initial: Iterable[State],
    accepting: Sequence[Iterable[State]],
    alphabet: Sequence[Letter],
    *,
    name: str = "explicit",
) -> GNBA:
    table = {key: tuple(targets) for key, targets in transitions.items()}
    letters = tuple(alphabet)
    return GNBA(
        initial=tuple(initial),
        step=lambda state, letter: table.get((state, letter), ()),
        letters=lambda state: letters,
        accepting=tuple(_member(frozenset(states)) for states in accepting),
        alphabet=letters,
        name=name,
    )


def universal(alphabet: Sequence[Letter]) -> GNBA:
    letters = tuple(alphabet)
    return GNBA(("all",), lambda state, letter: ("all",), lambda state: letters, alphabet=letters, weak=True, name="universal")


def empty(alphabet: Sequence[Letter]) -> GNBA:
    letters = tuple(alphabet)
    return GNBA((), lambda state, letter: (), lambda state: letters, alphabet=letters, weak=True, name="empty")


def degeneralize(a: GNBA) -> GNBA:
    """Equivalent automaton with exactly one accepting set, via a round-robin counter."""
    count = len(a.accepting)
    if count == 0:
        return replace(a, accepting=(lambda state: True,))
    if count == 1:
        return a

    def step(state: State, letter: Letter) -> List[State]:
        inner, index = state
        following = (index + 1) % count if a.accepting[index](inner) else index
        return [(target, following) for target in a.step(inner, letter)]

    first = a.accepting[0]
    return GNBA(
        initial=tuple((state, 0) for state in a.initial),
        step=step,
        letters=lambda state: a.letters(state[0]),
        accepting=(lambda state: state[1] == 0 and first(state[0]),),
        alphabet=a.alphabet,
        name=f"degeneralized({a.name})",
    )


def _lift(accepts: Acceptance, index: int) -> Acceptance:
    return lambda state: accepts(state[index])


def pairwise_product(x: GNBA, y: GNBA) -> GNBA:
    """Runs ``x`` on first components and ``y`` on second components of pair letters."""

    def step(state: State, letter: Letter) -> List[State]:
        return list(itertools.product(x.step(state[0], letter[0]), y.step(state[1], letter[1])))

    def letters(state: State) -> Iterator[Letter]:
        return itertools.product(list(x.letters(state[0])), list(y.letters(state[1])))

    alphabet = None
    if x.alphabet is not None and y.alphabet is not None:
        alphabet = tuple(itertools.product(x.alphabet, y.alphabet))
    return GNBA(
        initial=tuple(itertools.product(x.initial, y.initial)),
        step=step,
        letters=letters,
        accepting=tuple(_lift(f, 0) for f in x.accepting) + tuple(_lift(f, 1) for f in y.accepting),
        alphabet=alphabet,
        name=f"({x.name} x {y.name})",
    )


def intersect_all(automata: Sequence[GNBA]) -> GNBA:
    """Synchronised product on a shared alphabet; letters are proposed by the first automaton.

    States are tuples with one component per automaton, and the accepting family is the
    concatenation of the lifted families, in order.
    """
    if not automata:
        raise temporalis_error(INVALID_ARGUMENT, "nothing to intersect")
    parts = tuple(automata)
    driver = parts[0]

    def step(state: State, letter: Letter) -> List[State]:
        targets = []
        for part, component in zip(parts, state):
            options = list(part.step(component, letter))
            if not options:
                return []
            targets.append(options)
        return list(itertools.product(*targets))

    accepting: List[Acceptance] = []
    for index, part in enumerate(parts):
        accepting.extend(_lift(f, index) for f in part.accepting)
    alphabet = next((part.alphabet for part in parts if part.alphabet is not None), None)
    return GNBA(
        initial=tuple(itertools.product(*(part.initial for part in parts))),
        step=step,
        letters=lambda state: driver.letters(state[0]),
        accepting=tuple(accepting),
        alphabet=alphabet,
        name=" & ".join(part.name for part in parts),
    )


def intersect(x: GNBA, y: GNBA) -> GNBA:
    return intersect_all([x, y])


def family_ranges(automata: Sequence[GNBA]) -> List[range]:
    """Where each automaton's accepting sets sit in the family of ``intersect_all(automata)``."""
    ranges = []
    start = 0
    for part in automata:
        ranges.append(range(start, start + len(part.accepting)))
        start += len(part.accepting)
    return ranges


def _post(a: GNBA, states: Iterable[State], letter: Letter) -> FrozenSet[State]:
    return frozenset(target for state in states for target in a.step(state, letter))


def _complement_letters(
    a: GNBA, inner_states: Callable[[State], Iterable[State]]
) -> Callable[[State], Iterable[Letter]]:
    """The alphabet when known; otherwise only letters the tracked runs propose, which leaves
    the complement to be driven by a product partner."""
    if a.alphabet is not None:
        alphabet = a.alphabet
        return lambda state: alphabet

    def letters(state: State) -> List[Letter]:
        seen: Dict[Letter, None] = {}
        for inner in inner_states(state):
            for letter in a.letters(inner):
                seen.setdefault(letter)
        return list(seen)

    return letters


def _breakpoint_complement(a: GNBA) -> GNBA:
    """Exact for weak automata: tracks the runs that entered the accepting set since the last
    breakpoint and accepts whenever all of them have died."""
    accepts = a.accepting[0] if a.accepting else (lambda state: True)

    def step(state: State, letter: Letter) -> List[State]:
        current, owing = state
        following = _post(a, current, letter)
        if owing:
            return [(following, frozenset(q for q in _post(a, owing, letter) if accepts(q)))]
        return [(following, frozenset(q for q in following if accepts(q)))]

    start = frozenset(a.initial)
    return GNBA(
        initial=((start, frozenset(q for q in start if accepts(q))),),
        step=step,
        letters=_complement_letters(a, lambda state: state[0]),
        accepting=(lambda state: not state[1],),
        alphabet=a.alphabet,
        weak=False,
        name=f"complement({a.name})",
    )


def reachable_states(a: GNBA, max_states: Optional[int] = None) -> List[State]:
    seen: Dict[State, None] = dict.fromkeys(a.initial)
    queue = list(a.initial)
    while queue:
        state = queue.pop(0)
        for _, target in a.successors(state):
            if target in seen:
                continue
            seen[target] = None
            _guard(a, len(seen), max_states)
            queue.append(target)
    return list(seen)


def _ranking_complement(a: GNBA, max_states: Optional[int]) -> GNBA:
    """Level rankings with a breakpoint set, ranks bounded by twice the reachable state count."""
    single = degeneralize(a)
    accepts = single.accepting[0]
    top = 2 * len(reachable_states(single, max_states))
    order = {}

    def rank_key(state: State) -> str:
        if state not in order:
            order[state] = repr(state)
        return order[state]

    def step(state: State, letter: Letter) -> Iterator[State]:
        ranking, owing = state
        bound: Dict[State, int] = {}
        for source, rank in ranking:
            for target in single.step(source, letter):
                bound[target] = min(bound.get(target, rank), rank)
        targets = sorted(bound, key=rank_key)
        choices = [
            [rank for rank in range(bound[target] + 1) if rank % 2 == 0 or not accepts(target)]
            for target in targets
        ]
        tracked = _post(single, owing, letter) if owing else frozenset(targets)
        for ranks in itertools.product(*choices):
            even = frozenset(target for target, rank in zip(targets, ranks) if rank % 2 == 0)
            yield frozenset(zip(targets, ranks)), tracked & even

    return GNBA(
        initial=((frozenset((state, top) for state in single.initial), frozenset()),),
        step=step,
        letters=_complement_letters(single, lambda state: (inner for inner, _ in state[0])),
        accepting=(lambda state: not state[1],),
        alphabet=a.alphabet,
        name=f"complement({a.name})",
    )


def complement(a: GNBA, max_states: Optional[int] = None) -> GNBA:
    """Automaton accepting exactly the lassos ``a`` rejects.

    Weak automata get the breakpoint construction; everything else the rank-based one, which
    first explores ``a`` to bound the ranks and is subject to ``max_states``.
    """
    if a.weak and len(a.accepting) <= 1:
        return _breakpoint_complement(a)
    logger.debug("rank-based complement", extra={"automaton": a.name})
    return _ranking_complement(a, max_states)


def _guard(a: GNBA, count: int, max_states: Optional[int]) -> None:
    if max_states is not None and count > max_states:
        raise temporalis_error(GUARD_EXCEEDED, f"{a.name}: more than {max_states} states explored")


def _cycle_through(a: GNBA, seed: State, visited: Set[State], counter: List[int], max_states: Optional[int]) -> Optional[List[Letter]]:
    stack = [(seed, a.successors(seed), None)]
    while stack:
        _, successors, _ = stack[-1]
        advanced = False
        for letter, target in successors:
            if target == seed:
                return [entry[2] for entry in stack[1:]] + [letter]
            if target not in visited:
                visited.add(target)
                counter[0] += 1
                _guard(a, counter[0], max_states)
                stack.append((target, a.successors(target), letter))
                advanced = True
                break
        if not advanced:
            stack.pop()
    return None


def is_empty(a: GNBA, max_states: Optional[int] = None) -> Optional[LassoWord]:
    """None when the language is empty, otherwise an accepted lasso.

    Nested depth-first search over the degeneralised automaton; successors are expanded in the
    order ``letters`` proposes them, so the answer is deterministic.
    """
    single = degeneralize(a)
    accepts = single.accepting[0]
    outer: Set[State] = set()
    inner: Set[State] = set()
    counter = [0]
    for start in single.initial:
        if start in outer:
            continue
        outer.add(start)
        counter[0] += 1
        stack = [(start, single.successors(start), None)]
        while stack:
            state, successors, _ = stack[-1]
            advanced = False
            for letter, target in successors:
                if target not in outer:
                    outer.add(target)
                    counter[0] += 1
                    _guard(a, counter[0], max_states)
                    stack.append((target, single.successors(target), letter))
                    advanced = True
                    break
            if advanced:
                continue
            if accepts(state):
                cycle = _cycle_through(single, state, inner, counter, max_states)
                if cycle is not None:
                    prefix = tuple(entry[2] for entry in stack[1:])
                    return LassoWord(prefix, tuple(cycle))
            stack.pop()
    return None


def lasso_graph(a: GNBA, word: LassoWord, max_states: Optional[int] = None) -> nx.DiGraph:
    """Runs of ``a`` on ``word`` as a graph over (state, position) pairs."""
    graph = nx.DiGraph()
    queue = [(state, 0) for state in a.initial]
    graph.add_nodes_from(queue)
    while queue:
        node = queue.pop(0)
        state, position = node
        following = word.next_position(position)
        for target in a.step(state, word.letter(position)):
            successor = (target, following)
            if successor not in graph:
                graph.add_node(successor)
                _guard(a, graph.number_of_nodes(), max_states)
                queue.append(successor)
            graph.add_edge(node, successor)
    return graph


def _nontrivial(graph: nx.DiGraph, component: Set) -> bool:
    if len(component) > 1:
        return True
    node = next(iter(component))
    return graph.has_edge(node, node)


def accepts_lasso(a: GNBA, word: LassoWord, max_states: Optional[int] = None) -> bool:
    graph = lasso_graph(a, word, max_states)
    for component in nx.strongly_connected_components(graph):
        if not _nontrivial(graph, component):
            continue
        if all(any(accepts(state) for state, _ in component) for accepts in a.accepting):
            return True
    return False


def explore(a: GNBA, max_states: Optional[int] = None) -> nx.DiGraph:
    """Reachable part of ``a``; nodes carry ``accepting`` bits, edges the ``letters`` taking them."""
    graph = nx.DiGraph(initial=list(a.initial))
    queue = list(dict.fromkeys(a.initial))
    for state in queue:
        graph.add_node(state, accepting=a.accepting_bits(state))
    while queue:
        state = queue.pop(0)
        for letter, target in a.successors(state):
            if target not in graph:
                graph.add_node(target, accepting=a.accepting_bits(target))
                _guard(a, graph.number_of_nodes(), max_states)
                queue.append(target)
            if graph.has_edge(state, target):
                graph.edges[state, target]["letters"].append(letter)
            else:
                graph.add_edge(state, target, letters=[letter])
    return graph


def accepting_components(graph: nx.DiGraph) -> List[Set[State]]:
    """Non-trivial strongly connected components, in a deterministic order."""
    order = {node: index for index, node in enumerate(graph.nodes)}
    components = [
        component for component in nx.strongly_connected_components(graph) if _nontrivial(graph, component)
    ]
    return sorted(components, key=lambda component: min(order[node] for node in component))


def component_hits(graph: nx.DiGraph, component: Set[State]) -> Tuple[bool, ...]:
    bits = [graph.nodes[node]["accepting"] for node in component]
    return tuple(any(column) for column in zip(*bits)) if bits else ()


def _path_letters(graph: nx.DiGraph, path: Sequence[State]) -> List[Letter]:
    return [graph.edges[source, target]["letters"][0] for source, target in zip(path, path[1:])]


def component_lasso(graph: nx.DiGraph, component: Set[State], required: Sequence[int] = ()) -> LassoWord:
    """A lasso reaching ``component`` and cycling through a node of every required accepting set.

    A self-loop on a node that is in every required set gives a one-letter loop.
    """
    order = {node: index for index, node in enumerate(graph.nodes)}
    nodes = sorted(component, key=order.__getitem__)
    sub = graph.subgraph(component)

    def member(node: State, index: int) -> bool:
        return graph.nodes[node]["accepting"][index]

    anchor = next(
        (node for node in nodes if sub.has_edge(node, node) and all(member(node, index) for index in required)),
        None,
    )
    if anchor is not None:
        loop = [graph.edges[anchor, anchor]["letters"][0]]
    else:
        stops = []
        for index in required:
            stop = next(node for node in nodes if member(node, index))
            if stop not in stops:
                stops.append(stop)
        if not stops:
            stops = [nodes[0]]
        anchor = stops[0]
        if len(stops) == 1:
            following = next(target for target in sub.successors(anchor))
            stops.append(following)
        tour = [anchor]
        for target in stops[1:] + [anchor]:
            tour.extend(nx.shortest_path(sub, tour[-1], target)[1:])
        loop = _path_letters(graph, tour)
    best: Optional[List[State]] = None
    for start in graph.graph.get("initial", []):
        if start in graph and nx.has_path(graph, start, anchor):
            path = nx.shortest_path(graph, start, anchor)
            if best is None or len(path) < len(best):
                best = path
    if best is None:
        raise temporalis_error(INVALID_ARGUMENT, "component is not reachable from an initial state")
    return LassoWord(tuple(_path_letters(graph, best)), tuple(loop))


def to_dot(a: GNBA, max_states: Optional[int] = 500) -> str:
    """Graphviz source of the reachable part of ``a``."""
    graph = explore(a, max_states)
    dot = graphviz.Digraph(name=a.name.replace(" ", "_")[:60] or "automaton")
    dot.attr(rankdir="LR")
    names = {node: f"q{index}" for index, node in enumerate(graph.nodes)}
    initial = set(graph.graph.get("initial", []))
    for node, data in graph.nodes(data=True):
        shape = "doublecircle" if any(data["accepting"]) else "circle"
        label = str(node)
        if len(label) > 80:
            label = label[:77] + "..."
        dot.node(names[node], label=label, shape=shape)
        if node in initial:
            dot.node(f"{names[node]}_start", label="", shape="none")
            dot.edge(f"{names[node]}_start", names[node])
    for source, target, data in graph.edges(data=True):
        dot.edge(names[source], names[target], label=", ".join(str(letter) for letter in data["letters"][:4]))
    return dot.source
