"""Logical plans over the path algebra, and predicate pushdown."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .algebra import Condition, Term, conjoin, conjuncts, endpoint_of
from .parser import (
    Alt,
    Concat,
    LabelAtom,
    NegLabel,
    Opt,
    ParsedQuery,
    Plus,
    Regex,
    Star,
)
from .path import Semantic


class Plan:
    def children(self) -> tuple["Plan", ...]:
        return ()

    def __str__(self) -> str:
        return explain(self)


@dataclass(frozen=True)
class Scan0(Plan):
    pass


@dataclass(frozen=True)
class Scan1(Plan):
    label: str


@dataclass(frozen=True)
class NegScan1(Plan):
    label: str


@dataclass(frozen=True)
class Selection(Plan):
    condition: Condition
    child: Plan

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Union(Plan):
    left: Plan
    right: Plan

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Join(Plan):
    semantic: Semantic
    left: Plan
    right: Plan

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Recursive(Plan):
    semantic: Semantic
    child: Plan

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class RecursiveSeeded(Plan):
    """Fixpoint started from ``seed`` whose expansion joins against ``base``."""

    semantic: Semantic
    seed: Plan
    base: Plan

    def children(self):
        return (self.seed, self.base)


@dataclass(frozen=True)
class Projection(Plan):
    semantic: Semantic
    terms: tuple[Term, ...]
    limit: Optional[int]
    child: Plan

    def children(self):
        return (self.child,)


def translate_regex(r: Regex, semantic: Semantic) -> Plan:
    if isinstance(r, LabelAtom):
        return Scan1(r.label)
    if isinstance(r, NegLabel):
        return NegScan1(r.label)
    if isinstance(r, Concat):
        return Join(semantic, translate_regex(r.left, semantic), translate_regex(r.right, semantic))
    if isinstance(r, Alt):
        return Union(translate_regex(r.left, semantic), translate_regex(r.right, semantic))
    if isinstance(r, Plus):
        return Recursive(semantic, translate_regex(r.child, semantic))
    if isinstance(r, Star):
        return Union(Scan0(), Recursive(semantic, translate_regex(r.child, semantic)))
    if isinstance(r, Opt):
        return Union(Scan0(), translate_regex(r.child, semantic))
    raise TypeError(f"not a regex node: {r!r}")


def translate(q: ParsedQuery, semantic: Semantic = Semantic.WALK) -> Projection:
    """Build the basic plan; ``semantic`` applies when the query has no restrictor."""
    tau = q.restrictor or semantic
    plan = translate_regex(q.regex, tau)
    if q.condition is not None:
        plan = Selection(q.condition, plan)
    return Projection(tau, q.terms, q.limit, plan)


# -- pushdown -------------------------------------------------------------------


def _select(condition: Condition, plan: Plan) -> Plan:
    """Place a selection on ``plan``, merging stacked selections canonically."""
    parts = conjuncts(condition)
    if isinstance(plan, Selection):
        parts = conjuncts(plan.condition) + parts
        plan = plan.child
    unique = {c.to_text(): c for c in parts}
    ordered = [unique[k] for k in sorted(unique)]
    return Selection(conjoin(ordered), plan)


def _push(condition: Condition, plan: Plan) -> Plan:
    end = endpoint_of(condition)
    if end is None:
        return _select(condition, plan)
    if isinstance(plan, Union):
        return Union(_push(condition, plan.left), _push(condition, plan.right))
    if isinstance(plan, Join):
        if end == "source":
            return replace(plan, left=_push(condition, plan.left))
        return replace(plan, right=_push(condition, plan.right))
    if end == "source" and isinstance(plan, Recursive):
        return RecursiveSeeded(plan.semantic, _push(condition, plan.child), plan.child)
    if end == "source" and isinstance(plan, RecursiveSeeded):
        return replace(plan, seed=_push(condition, plan.seed))
    if isinstance(plan, Selection):
        below = _push(condition, plan.child)
        return _select(plan.condition, below)
    return _select(condition, plan)


def optimize(plan: Plan) -> Plan:
    """Push source/target selections towards the leaves.

    Endpoint conjuncts move through unions (both sides), joins (source to the
    left input, target to the right) and recursions (source only, by seeding
    the fixpoint).  Disjunctions and conditions on interior positions stay put.
    """
    if isinstance(plan, Projection):
        return replace(plan, child=optimize(plan.child))
    if isinstance(plan, Selection):
        child = optimize(plan.child)
        fixed = []
        for c in conjuncts(plan.condition):
            if endpoint_of(c) is None:
                fixed.append(c)
            else:
                child = _push(c, child)
        if fixed:
            child = _select(conjoin(fixed), child)
        return child
    if isinstance(plan, (Union, Join)):
        return replace(plan, left=optimize(plan.left), right=optimize(plan.right))
    if isinstance(plan, Recursive):
        return replace(plan, child=optimize(plan.child))
    if isinstance(plan, RecursiveSeeded):
        return replace(plan, seed=optimize(plan.seed), base=optimize(plan.base))
    return plan


# -- rendering ------------------------------------------------------------------


def _line(plan: Plan) -> str:
    if isinstance(plan, Scan0):
        return "Paths0"
    if isinstance(plan, Scan1):
        return f"Paths1({plan.label})"
    if isinstance(plan, NegScan1):
        return f"Paths1(!{plan.label})"
    if isinstance(plan, Selection):
        return f"Selection({plan.condition.to_text()})"
    if isinstance(plan, Union):
        return "Union"
    if isinstance(plan, Join):
        return f"Join[{plan.semantic.value}]"
    if isinstance(plan, Recursive):
        return f"Recursive[{plan.semantic.value}]"
    if isinstance(plan, RecursiveSeeded):
        return f"RecursiveSeeded[{plan.semantic.value}]"
    if isinstance(plan, Projection):
        terms = ", ".join(t.to_text() for t in plan.terms)
        limit = f"; limit {plan.limit}" if plan.limit is not None else ""
        return f"Projection[{plan.semantic.value}]({terms}{limit})"
    raise TypeError(f"not a plan node: {plan!r}")


def explain(plan: Plan) -> str:
    """One operator per line, children indented by two spaces (seed before base)."""
    lines: list[str] = []

    def walk(node: Plan, depth: int) -> None:
        lines.append("  " * depth + _line(node))
        for child in node.children():
            walk(child, depth + 1)

    walk(plan, 0)
    return "\n".join(lines)
