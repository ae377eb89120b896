"""Traversal baselines and an exhaustive oracle.

``bfs_paths`` and ``dfs_paths`` search the product of the graph with a
position (Glushkov) automaton, walking the label-agnostic adjacency lists the
way a classic traversal does.  ``brute_force`` shares nothing with either: it
expands every walk and tests the label word with Brzozowski derivatives.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .algebra import EvalCaps
from .graph import Graph
from .parser import Alt, Concat, LabelAtom, NegLabel, Opt, Plus, Regex, Star
from .path import Path, PathSet, Semantic

# -- position automaton -----------------------------------------------------------


@dataclass(frozen=True)
class Symbol:
    label: str
    negated: bool = False

    def matches(self, label: str) -> bool:
        return (label != self.label) if self.negated else (label == self.label)

    def __str__(self) -> str:
        return ("!" if self.negated else "") + self.label


@dataclass(frozen=True)
class Automaton:
    """ε-free automaton; state 0 is initial and state ``i`` is regex position ``i``."""

    n_states: int
    transitions: tuple[tuple[int, Symbol, int], ...]
    finals: frozenset[int]
    initial: int = 0

    def __post_init__(self):
        out: dict[int, list[tuple[Symbol, int]]] = {}
        for src, sym, dst in self.transitions:
            out.setdefault(src, []).append((sym, dst))
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})

    def moves(self, state: int) -> tuple[tuple[Symbol, int], ...]:
        return self._out.get(state, ())

    def step(self, states: frozenset[int], label: str) -> frozenset[int]:
        return frozenset(
            dst for s in states for sym, dst in self.moves(s) if sym.matches(label)
        )

    def accepts(self, word: Sequence[str]) -> bool:
        states = frozenset([self.initial])
        for label in word:
            states = self.step(states, label)
            if not states:
                return False
        return bool(states & self.finals)


def build_automaton(r: Regex) -> Automaton:
    """Glushkov construction from first/last/follow position sets."""
    symbols: list[Symbol] = []
    follow: dict[int, set[int]] = {}

    def visit(node: Regex) -> tuple[bool, frozenset[int], frozenset[int]]:
        # returns (nullable, first, last) and fills follow
        if isinstance(node, (LabelAtom, NegLabel)):
            symbols.append(Symbol(node.label, isinstance(node, NegLabel)))
            pos = len(symbols)
            follow[pos] = set()
            return False, frozenset([pos]), frozenset([pos])
        if isinstance(node, Concat):
            n1, f1, l1 = visit(node.left)
            n2, f2, l2 = visit(node.right)
            for p in l1:
                follow[p] |= f2
            return n1 and n2, f1 | f2 if n1 else f1, l1 | l2 if n2 else l2
        if isinstance(node, Alt):
            n1, f1, l1 = visit(node.left)
            n2, f2, l2 = visit(node.right)
            return n1 or n2, f1 | f2, l1 | l2
        if isinstance(node, (Star, Plus)):
            n, f, l = visit(node.child)
            for p in l:
                follow[p] |= f
            return n or isinstance(node, Star), f, l
        if isinstance(node, Opt):
            _, f, l = visit(node.child)
            return True, f, l
        raise TypeError(f"not a regex node: {node!r}")

    nullable, first, last = visit(r)
    transitions = [(0, symbols[p - 1], p) for p in sorted(first)]
    for p in sorted(follow):
        transitions += [(p, symbols[q - 1], q) for q in sorted(follow[p])]
    finals = set(last)
    if nullable:
        finals.add(0)
    return Automaton(len(symbols) + 1, tuple(transitions), frozenset(finals))


# -- product searches -------------------------------------------------------------


def _valid_step(semantic: Semantic, nodes: tuple, edges: tuple, edge: str, target: str) -> bool:
    # prefix is already valid; only the new element can break the restriction
    if semantic is Semantic.WALK:
        return True
    if semantic is Semantic.TRAIL:
        return edge not in edges
    if semantic is Semantic.ACYCLIC:
        return target not in nodes
    # SIMPLE: may close onto the first node once, nothing may follow a closed cycle
    if len(nodes) > 1 and nodes[0] == nodes[-1]:
        return False
    return target not in nodes[1:]


def _sources(g: Graph, source: Optional[str]) -> Iterable[str]:
    if source is None:
        return g.node_ids
    return (source,) if source in g.index else ()


def _search(
    g: Graph,
    a: Automaton,
    source: Optional[str],
    semantic: Semantic,
    caps: EvalCaps,
    depth_first: bool,
    check: Optional[Callable[[], None]],
) -> PathSet:
    out = PathSet()
    limit, max_length = caps.result_limit, caps.max_length
    finals = a.finals
    for start in _sources(g, source):
        frontier = deque([((start,), (), a.initial)])
        while frontier:
            if check is not None:
                check()
            nodes, edges, state = frontier.pop() if depth_first else frontier.popleft()
            if state in finals:
                out.add(Path._make(nodes, edges))
                if len(out) >= limit:
                    return out
            if len(edges) >= max_length:
                continue
            moves = a.moves(state)
            if not moves:
                continue
            children = []
            for e in g.adjacency[nodes[-1]]:
                for sym, nxt in moves:
                    if sym.matches(e.label) and _valid_step(semantic, nodes, edges, e.id, e.target):
                        children.append((nodes + (e.target,), edges + (e.id,), nxt))
            if depth_first:
                children.reverse()
            frontier.extend(children)
    return out


def bfs_paths(
    g: Graph,
    a: Automaton,
    source: Optional[str] = None,
    semantic: Semantic = Semantic.WALK,
    caps: Optional[EvalCaps] = None,
    check: Optional[Callable[[], None]] = None,
) -> PathSet:
    return _search(g, a, source, semantic, caps or EvalCaps(), False, check)


def dfs_paths(
    g: Graph,
    a: Automaton,
    source: Optional[str] = None,
    semantic: Semantic = Semantic.WALK,
    caps: Optional[EvalCaps] = None,
    check: Optional[Callable[[], None]] = None,
) -> PathSet:
    return _search(g, a, source, semantic, caps or EvalCaps(), True, check)


# -- exhaustive oracle ------------------------------------------------------------


class _D:
    """Derivative-friendly regex terms, kept apart from the parser AST on purpose."""

    __slots__ = ()


@dataclass(frozen=True)
class _Empty(_D):
    pass


@dataclass(frozen=True)
class _Eps(_D):
    pass


@dataclass(frozen=True)
class _Sym(_D):
    label: str
    negated: bool


@dataclass(frozen=True)
class _Cat(_D):
    left: _D
    right: _D


@dataclass(frozen=True)
class _Or(_D):
    options: frozenset


@dataclass(frozen=True)
class _Rep(_D):
    child: _D


EMPTY, EPS = _Empty(), _Eps()


def _cat(a: _D, b: _D) -> _D:
    if a == EMPTY or b == EMPTY:
        return EMPTY
    if a == EPS:
        return b
    if b == EPS:
        return a
    return _Cat(a, b)


def _or(*parts: _D) -> _D:
    flat = set()
    for p in parts:
        if isinstance(p, _Or):
            flat |= p.options
        elif p != EMPTY:
            flat.add(p)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return next(iter(flat))
    return _Or(frozenset(flat))


def _rep(a: _D) -> _D:
    if a in (EMPTY, EPS):
        return EPS
    if isinstance(a, _Rep):
        return a
    return _Rep(a)


def _lower(r: Regex) -> _D:
    if isinstance(r, LabelAtom):
        return _Sym(r.label, False)
    if isinstance(r, NegLabel):
        return _Sym(r.label, True)
    if isinstance(r, Concat):
        return _cat(_lower(r.left), _lower(r.right))
    if isinstance(r, Alt):
        return _or(_lower(r.left), _lower(r.right))
    if isinstance(r, Star):
        return _rep(_lower(r.child))
    if isinstance(r, Plus):
        c = _lower(r.child)
        return _cat(c, _rep(c))
    if isinstance(r, Opt):
        return _or(EPS, _lower(r.child))
    raise TypeError(f"not a regex node: {r!r}")


@lru_cache(maxsize=None)
def _nullable(d: _D) -> bool:
    if isinstance(d, (_Eps, _Rep)):
        return True
    if isinstance(d, _Cat):
        return _nullable(d.left) and _nullable(d.right)
    if isinstance(d, _Or):
        return any(_nullable(o) for o in d.options)
    return False


@lru_cache(maxsize=None)
def _derive(d: _D, label: str) -> _D:
    if isinstance(d, _Sym):
        hit = (label != d.label) if d.negated else (label == d.label)
        return EPS if hit else EMPTY
    if isinstance(d, _Cat):
        first = _cat(_derive(d.left, label), d.right)
        if _nullable(d.left):
            return _or(first, _derive(d.right, label))
        return first
    if isinstance(d, _Or):
        return _or(*(_derive(o, label) for o in d.options))
    if isinstance(d, _Rep):
        return _cat(_derive(d.child, label), d)
    return EMPTY


def matches(r: Regex, word: Sequence[str]) -> bool:
    d = _lower(r)
    for label in word:
        d = _derive(d, label)
        if d == EMPTY:
            return False
    return _nullable(d)


def _restricted(nodes: tuple, edges: tuple, semantic: Semantic) -> bool:
    if semantic is Semantic.WALK:
        return True
    if semantic is Semantic.TRAIL:
        return len(set(edges)) == len(edges)
    if semantic is Semantic.ACYCLIC:
        return len(set(nodes)) == len(nodes)
    inner = nodes[1:-1]
    return len(set(inner)) == len(inner) and not {nodes[0], nodes[-1]} & set(inner)


def brute_force(
    g: Graph,
    r: Regex,
    semantic: Semantic = Semantic.WALK,
    maxlen: int = 8,
    source: Optional[str] = None,
) -> PathSet:
    """All paths of length <= maxlen whose label word matches ``r`` under ``semantic``.

    Walk expansion stops early only where no extension can ever qualify: the
    restrictions are closed under taking prefixes, and the derivative of a
    dead prefix is the empty language.
    """
    out = PathSet()
    start_d = _lower(r)

    def grow(nodes: tuple, edges: tuple, d: _D) -> None:
        if _nullable(d):
            out.add(Path(nodes, edges))
        if len(edges) == maxlen:
            return
        for e in g.adjacency[nodes[-1]]:
            nd = _derive(d, e.label)
            if nd == EMPTY:
                continue
            n2, e2 = nodes + (e.target,), edges + (e.id,)
            if _restricted(n2, e2, semantic):
                grow(n2, e2, nd)

    for start in _sources(g, source):
        grow((start,), (), start_d)
    return out
