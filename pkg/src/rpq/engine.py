"""Physical operators and query execution.

Each logical operator compiles to a pull-based operator with two entry points:
iterating it enumerates its whole path set, and ``from_node(v)`` enumerates
only the members that start at ``v``, in the same relative order.  Joins and
recursions probe their right input through ``from_node`` (memoised per node),
so a scan on the right never materialises more than the CSR rows it touches,
and a selection pinning the source id turns into a single probe.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from . import planner as lp
from .algebra import (
    Condition,
    Diagnostics,
    EvalCaps,
    IdCmp,
    Term,
    conjuncts,
    eval_condition,
    iter_fixpoint,
    iter_join,
)
from .graph import Graph
from .parser import QueryError, parse
from .path import Path, Semantic, satisfies

__all__ = [
    "Cancelled",
    "Deadline",
    "PhysicalPlan",
    "ResultSet",
    "SessionConfig",
    "compile_plan",
    "eval_condition",
    "execute",
    "run",
]


class Cancelled(Exception):
    """Raised inside operators when an evaluation exceeds its deadline."""


class Deadline:
    def __init__(self, seconds: Optional[float]):
        self.seconds = seconds
        self.expires = None if seconds is None else time.perf_counter() + seconds

    def check(self) -> None:
        if self.expires is not None and time.perf_counter() > self.expires:
            raise Cancelled(f"evaluation exceeded {self.seconds} s")


class _Context:
    def __init__(self, g: Graph, caps: EvalCaps, deadline: Optional[Deadline]):
        self.g = g
        self.caps = caps
        self.diag = Diagnostics()
        self.check = deadline.check if deadline is not None else None


class Operator:
    def __init__(self, ctx: _Context):
        self.ctx = ctx
        self._memo: dict[str, _Replay] = {}

    def __iter__(self) -> Iterator[Path]:
        raise NotImplementedError

    def from_node(self, v: str) -> Iterator[Path]:
        raise NotImplementedError

    def probe(self, v: str) -> Iterable[Path]:
        """Memoised ``from_node`` for use as the right side of a join.

        The memo fills as it is read, so a consumer that stops early leaves
        the rest of the expansion unevaluated.
        """
        hit = self._memo.get(v)
        if hit is None:
            hit = self._memo[v] = _Replay(self.from_node(v))
        return hit


class _Replay:
    # re-iterable view over a generator: replays what was pulled, then pulls more
    __slots__ = ("_source", "_items")

    def __init__(self, source: Iterator[Path]):
        self._source = source
        self._items: list[Path] = []

    def __iter__(self) -> Iterator[Path]:
        items = self._items
        i = 0
        while True:
            if i < len(items):
                yield items[i]
            elif self._source is None:
                return
            else:
                p = next(self._source, None)
                if p is None:
                    self._source = None
                    return
                items.append(p)
                yield p
            i += 1


class Scan0Op(Operator):
    def __iter__(self):
        for nid in self.ctx.g.node_ids:
            yield Path.single(nid)

    def from_node(self, v):
        if v in self.ctx.g.index:
            yield Path.single(v)


class Scan1Op(Operator):
    def __init__(self, ctx, labels: Sequence[str]):
        super().__init__(ctx)
        self.labels = tuple(labels)

    def __iter__(self):
        g = self.ctx.g
        for label in self.labels:
            yield from g.unit_paths(label)

    def from_node(self, v):
        g = self.ctx.g
        if v not in g.index:
            return
        for label in self.labels:
            yield from g.out_paths(v, label)

    def probe(self, v):
        if len(self.labels) == 1:
            g = self.ctx.g
            return g.out_paths(v, self.labels[0]) if v in g.index else ()
        return super().probe(v)


class SelectionOp(Operator):
    def __init__(self, ctx, condition: Condition, child: Operator):
        super().__init__(ctx)
        self.condition = condition
        self.child = child
        self.pinned = None
        for c in conjuncts(condition):
            if isinstance(c, IdCmp) and c.op == "=" and c.ref.end == "source":
                self.pinned = c.value
                break

    def _filter(self, paths: Iterable[Path]) -> Iterator[Path]:
        g, cond = self.ctx.g, self.condition
        for p in paths:
            if cond.holds(p, g):
                yield p

    def __iter__(self):
        if self.pinned is not None:
            return self._filter(self.child.from_node(self.pinned))
        return self._filter(self.child)

    def from_node(self, v):
        if self.pinned is not None and self.pinned != v:
            return iter(())
        return self._filter(self.child.from_node(v))


class UnionOp(Operator):
    def __init__(self, ctx, left: Operator, right: Operator):
        super().__init__(ctx)
        self.left = left
        self.right = right

    @staticmethod
    def _merge(a: Iterable[Path], b: Iterable[Path]) -> Iterator[Path]:
        seen: set[Path] = set()
        for source in (a, b):
            for p in source:
                if p not in seen:
                    seen.add(p)
                    yield p

    def __iter__(self):
        return self._merge(self.left, _Lazy(self.right))

    def from_node(self, v):
        return self._merge(self.left.from_node(v), _Lazy(self.right, v))


class _Lazy:
    # defers opening the right input until the left one is drained
    def __init__(self, op: Operator, node: Optional[str] = None):
        self.op = op
        self.node = node

    def __iter__(self):
        if self.node is None:
            return iter(self.op)
        return self.op.from_node(self.node)


class JoinOp(Operator):
    def __init__(self, ctx, semantic: Semantic, left: Operator, right: Operator):
        super().__init__(ctx)
        self.semantic = semantic
        self.left = left
        self.right = right

    def _join(self, left: Iterable[Path]) -> Iterator[Path]:
        ctx = self.ctx
        return iter_join(left, self.right.probe, self.semantic, ctx.caps.max_length, ctx.check)

    def __iter__(self):
        return self._join(self.left)

    def from_node(self, v):
        return self._join(self.left.from_node(v))


class RecursiveOp(Operator):
    def __init__(self, ctx, semantic: Semantic, base: Operator, seed: Optional[Operator] = None):
        super().__init__(ctx)
        self.semantic = semantic
        self.base = base
        self.seed = seed if seed is not None else base

    def _expand(self, seeds: Iterable[Path]) -> Iterator[Path]:
        ctx = self.ctx
        return iter_fixpoint(
            seeds, self.base.probe, self.semantic, ctx.caps, ctx.diag, ctx.check
        )

    def __iter__(self):
        return self._expand(self.seed)

    def from_node(self, v):
        return self._expand(self.seed.from_node(v))


@dataclass
class PhysicalPlan:
    root: Operator
    semantic: Semantic
    terms: tuple[Term, ...]
    limit: int
    graph: Graph
    caps: EvalCaps
    diagnostics: Diagnostics


@dataclass
class ResultSet:
    rows: list[tuple]
    paths: list[Path]
    terms: tuple[Term, ...]
    elapsed: float = 0.0
    truncated: bool = False
    materialized: int = 0

    def __len__(self) -> int:
        return len(self.rows)

    def path_set(self) -> set[Path]:
        return set(self.paths)


def _compile(node: lp.Plan, ctx: _Context) -> Operator:
    if isinstance(node, lp.Scan0):
        return Scan0Op(ctx)
    if isinstance(node, lp.Scan1):
        return Scan1Op(ctx, [node.label])
    if isinstance(node, lp.NegScan1):
        return Scan1Op(ctx, [l for l in ctx.g.edge_labels if l != node.label])
    if isinstance(node, lp.Selection):
        return SelectionOp(ctx, node.condition, _compile(node.child, ctx))
    if isinstance(node, lp.Union):
        return UnionOp(ctx, _compile(node.left, ctx), _compile(node.right, ctx))
    if isinstance(node, lp.Join):
        return JoinOp(ctx, node.semantic, _compile(node.left, ctx), _compile(node.right, ctx))
    if isinstance(node, lp.Recursive):
        return RecursiveOp(ctx, node.semantic, _compile(node.child, ctx))
    if isinstance(node, lp.RecursiveSeeded):
        return RecursiveOp(
            ctx, node.semantic, _compile(node.base, ctx), _compile(node.seed, ctx)
        )
    raise TypeError(f"cannot compile {node!r}")


def compile_plan(
    plan: lp.Plan,
    g: Graph,
    caps: Optional[EvalCaps] = None,
    deadline: Optional[Deadline] = None,
) -> PhysicalPlan:
    caps = caps or EvalCaps()
    ctx = _Context(g, caps, deadline)
    if isinstance(plan, lp.Projection):
        semantic, terms, limit, body = plan.semantic, plan.terms, plan.limit, plan.child
    else:
        semantic, terms, limit, body = Semantic.WALK, (), None, plan
    limit = caps.result_limit if limit is None else min(limit, caps.result_limit)
    return PhysicalPlan(_compile(body, ctx), semantic, terms, limit, g, caps, ctx.diag)


def stream(pp: PhysicalPlan) -> Iterator[Path]:
    """Root output: members satisfying the plan semantic and the length cap, unlimited."""
    semantic = pp.semantic
    max_length = pp.caps.max_length
    walk = semantic is Semantic.WALK
    for p in pp.root:
        if len(p.edges) <= max_length and (walk or satisfies(p, semantic)):
            yield p


def execute(pp: PhysicalPlan) -> ResultSet:
    started = time.perf_counter()
    g, terms = pp.graph, pp.terms
    rows: list[tuple] = []
    paths: list[Path] = []
    if pp.limit > 0:
        for p in stream(pp):
            paths.append(p)
            rows.append(tuple(t.value(p, g) for t in terms))
            if len(paths) >= pp.limit:
                break
    elapsed = time.perf_counter() - started
    return ResultSet(
        rows, paths, terms, elapsed, pp.diagnostics.truncated, materialized=len(paths)
    )


@dataclass
class SessionConfig:
    result_limit: int = 100
    max_depth: int = 10
    max_length: int = 20
    semantic: Semantic = Semantic.WALK
    optimize: bool = True
    timing: bool = False
    timeout: Optional[float] = None

    @property
    def caps(self) -> EvalCaps:
        return EvalCaps(self.result_limit, self.max_depth, self.max_length)


def plan_query(text: str, config: Optional[SessionConfig] = None) -> lp.Plan:
    config = config or SessionConfig()
    plan = lp.translate(parse(text), config.semantic)
    return lp.optimize(plan) if config.optimize else plan


def run(text: str, g: Graph, config: Optional[SessionConfig] = None) -> ResultSet:
    """Parse, plan, optimise (if enabled), compile and execute one query."""
    config = config or SessionConfig()
    started = time.perf_counter()
    plan = plan_query(text, config)
    deadline = Deadline(config.timeout) if config.timeout is not None else None
    result = execute(compile_plan(plan, g, config.caps, deadline))
    result.elapsed = time.perf_counter() - started
    return result
