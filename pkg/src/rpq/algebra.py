"""Selection conditions, projection terms and the path-set operators.

Every operator takes path sets and returns a path set (projection returns
rows).  The generator cores ``iter_join`` and ``iter_fixpoint`` are shared
with the physical engine so both evaluate in the same enumeration order:
union is left-then-right, join is left-major, and the fixpoint emits its seeds
followed by each expansion round.
"""

from __future__ import annotations

import re
from decimal import Decimal
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

from .graph import Graph, PropertyValue
from .path import Path, PathSet, Semantic, satisfies

OPERATORS = ("=", "<>", "<", ">", "<=", ">=")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class EvalCaps:
    result_limit: int = 100
    max_depth: int = 10
    max_length: int = 20

    def __post_init__(self):
        # caps of 0 are allowed for depth and length; a result limit must admit one row
        for name, low in (("result_limit", 1), ("max_depth", 0), ("max_length", 0)):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < low:
                raise ValueError(f"{name} must be an integer >= {low}, got {value!r}")


@dataclass
class Diagnostics:
    depth_capped: bool = False
    length_capped: bool = False

    @property
    def truncated(self) -> bool:
        return self.depth_capped or self.length_capped


# -- values -----------------------------------------------------------------


def _is_number(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def compare(left: Optional[PropertyValue], op: str, right: PropertyValue) -> bool:
    """Typed comparison; a missing left operand never matches."""
    if left is None:
        return False
    if _is_number(left) and _is_number(right):
        pass
    elif isinstance(left, str) and isinstance(right, str):
        pass
    else:
        return op == "<>"
    if op == "=":
        return left == right
    if op == "<>":
        return left != right
    if op == "<":
        return left < right
    if op == ">":
        return left > right
    if op == "<=":
        return left <= right
    if op == ">=":
        return left >= right
    raise ValueError(f"unknown comparison operator {op!r}")


def format_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_literal(value: PropertyValue) -> str:
    if isinstance(value, str):
        return format_string(value)
    if isinstance(value, float):
        # positional notation only; the query lexer has no exponent syntax
        text = format(Decimal(repr(value)), "f")
        return text if "." in text else text + ".0"
    return str(value)


# -- references into a path -------------------------------------------------


@dataclass(frozen=True)
class Ref:
    """A node or edge position: a pattern variable, FIRST(), LAST(), NODE(i), EDGE(i)."""

    kind: str  # src | tgt | first | last | node | edge
    index: int = 0
    name: str = ""

    @property
    def is_edge(self) -> bool:
        return self.kind == "edge"

    @property
    def end(self) -> Optional[str]:
        """``"source"`` or ``"target"`` for endpoint references, else None."""
        if self.kind in ("src", "first"):
            return "source"
        if self.kind in ("tgt", "last"):
            return "target"
        return None

    def resolve(self, p: Path) -> Optional[str]:
        kind = self.kind
        if kind in ("src", "first"):
            return p.nodes[0]
        if kind in ("tgt", "last"):
            return p.nodes[-1]
        if kind == "node":
            return p.node(self.index)
        return p.edge_at(self.index)

    def to_text(self) -> str:
        if self.kind in ("src", "tgt"):
            return self.name
        if self.kind == "first":
            return "FIRST()"
        if self.kind == "last":
            return "LAST()"
        return f"{self.kind.upper()}({self.index})"


def _property(ref: Ref, p: Path, g: Graph, key: str) -> Optional[PropertyValue]:
    element = ref.resolve(p)
    if element is None or ref.is_edge:
        # edges carry no properties
        return None
    return g.nodes[element].properties.get(key)


def _label(ref: Ref, p: Path, g: Graph) -> Optional[str]:
    element = ref.resolve(p)
    if element is None:
        return None
    if ref.is_edge:
        return g.edges[element].label
    return g.nodes[element].label


# -- conditions -------------------------------------------------------------


class Condition:
    def holds(self, p: Path, g: Graph) -> bool:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def refs(self) -> Iterator[Optional[Ref]]:
        """References mentioned by the condition; None stands for whole-path tests."""
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class PropertyCmp(Condition):
    ref: Ref
    key: str
    op: str
    value: PropertyValue

    def holds(self, p, g):
        return compare(_property(self.ref, p, g, self.key), self.op, self.value)

    def to_text(self):
        return f"{self.ref.to_text()}.{self.key} {self.op} {format_literal(self.value)}"

    def refs(self):
        yield self.ref


def _format_name(value: str) -> str:
    return value if _IDENT.match(value) else format_string(value)


@dataclass(frozen=True)
class LabelCmp(Condition):
    ref: Ref
    op: str
    value: str

    def holds(self, p, g):
        return compare(_label(self.ref, p, g), self.op, self.value)

    def to_text(self):
        return f"LABEL({self.ref.to_text()}) {self.op} {_format_name(self.value)}"

    def refs(self):
        yield self.ref


@dataclass(frozen=True)
class IdCmp(Condition):
    """Compare the element id at ``ref``; used to pin a path's source node."""

    ref: Ref
    op: str
    value: str

    def holds(self, p, g):
        return compare(self.ref.resolve(p), self.op, self.value)

    def to_text(self):
        return f"ID({self.ref.to_text()}) {self.op} {format_string(self.value)}"

    def refs(self):
        yield self.ref


@dataclass(frozen=True)
class LengthCmp(Condition):
    op: str
    value: Union[int, float]

    def holds(self, p, g):
        return compare(p.length, self.op, self.value)

    def to_text(self):
        return f"LENGTH() {self.op} {format_literal(self.value)}"

    def refs(self):
        yield None


@dataclass(frozen=True)
class PathCheck(Condition):
    semantic: Semantic

    def holds(self, p, g):
        return satisfies(p, self.semantic)

    def to_text(self):
        return f"IS{self.semantic.value}()"

    def refs(self):
        yield None


@dataclass(frozen=True)
class And(Condition):
    left: Condition
    right: Condition

    def holds(self, p, g):
        return self.left.holds(p, g) and self.right.holds(p, g)

    def to_text(self):
        return f"{_wrap(self.left, Or)} AND {_wrap(self.right, (Or, And))}"

    def refs(self):
        yield from self.left.refs()
        yield from self.right.refs()


@dataclass(frozen=True)
class Or(Condition):
    left: Condition
    right: Condition

    def holds(self, p, g):
        return self.left.holds(p, g) or self.right.holds(p, g)

    def to_text(self):
        return f"{self.left.to_text()} OR {_wrap(self.right, Or)}"

    def refs(self):
        yield from self.left.refs()
        yield from self.right.refs()


def _wrap(c: Condition, kinds) -> str:
    text = c.to_text()
    return f"({text})" if isinstance(c, kinds) else text


def conjuncts(c: Condition) -> list[Condition]:
    if isinstance(c, And):
        return conjuncts(c.left) + conjuncts(c.right)
    return [c]


def conjoin(parts: Sequence[Condition]) -> Condition:
    if not parts:
        raise ValueError("empty conjunction")
    result = parts[0]
    for c in parts[1:]:
        result = And(result, c)
    return result


def endpoint_of(c: Condition) -> Optional[str]:
    """``"source"``/``"target"`` if every leaf of ``c`` only inspects that endpoint.

    Disjunctions are never classified so they stay where they were written.
    """
    if isinstance(c, Or):
        return None
    ends = set()
    for ref in c.refs():
        end = ref.end if ref is not None else None
        if end is None:
            return None
        ends.add(end)
    if len(ends) == 1:
        return ends.pop()
    return None


def eval_condition(p: Path, c: Condition, g: Graph) -> bool:
    return c.holds(p, g)


# -- projection terms -------------------------------------------------------


class Term:
    def value(self, p: Path, g: Graph):
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class PathTerm(Term):
    name: str

    def value(self, p, g):
        return p

    def to_text(self):
        return self.name


@dataclass(frozen=True)
class NodeTerm(Term):
    ref: Ref

    def value(self, p, g):
        return self.ref.resolve(p)

    def to_text(self):
        return self.ref.to_text()


@dataclass(frozen=True)
class PropertyTerm(Term):
    ref: Ref
    key: str

    def value(self, p, g):
        return _property(self.ref, p, g, self.key)

    def to_text(self):
        return f"{self.ref.to_text()}.{self.key}"


@dataclass(frozen=True)
class LabelTerm(Term):
    ref: Ref

    def value(self, p, g):
        return _label(self.ref, p, g)

    def to_text(self):
        return f"LABEL({self.ref.to_text()})"


@dataclass(frozen=True)
class IdTerm(Term):
    ref: Ref

    def value(self, p, g):
        return self.ref.resolve(p)

    def to_text(self):
        return f"ID({self.ref.to_text()})"


@dataclass(frozen=True)
class LengthTerm(Term):
    def value(self, p, g):
        return p.length

    def to_text(self):
        return "LENGTH()"


@dataclass(frozen=True)
class CheckTerm(Term):
    semantic: Semantic

    def value(self, p, g):
        return satisfies(p, self.semantic)

    def to_text(self):
        return f"IS{self.semantic.value}()"


# -- operator cores ---------------------------------------------------------

Expand = Callable[[str], Iterable[Path]]


def _checker(semantic: Semantic) -> Optional[Callable[[Path], bool]]:
    # None for WALK so hot loops can skip the call
    if semantic is Semantic.WALK:
        return None
    return lambda p: satisfies(p, semantic)


def iter_join(
    left: Iterable[Path],
    expand: Expand,
    semantic: Semantic,
    max_length: Optional[int] = None,
    check: Optional[Callable[[], None]] = None,
) -> Iterator[Path]:
    """Concatenate each left path with the right paths starting at its last node."""
    valid = _checker(semantic)
    seen: set[Path] = set()
    for p in left:
        if check is not None:
            check()
        room = None if max_length is None else max_length - len(p.edges)
        for q in expand(p.nodes[-1]):
            if room is not None and len(q.edges) > room:
                continue
            r = p.concat(q)
            if r in seen or (valid is not None and not valid(r)):
                continue
            seen.add(r)
            yield r


def iter_fixpoint(
    seeds: Iterable[Path],
    expand: Expand,
    semantic: Semantic,
    caps: EvalCaps,
    diag: Optional[Diagnostics] = None,
    check: Optional[Callable[[], None]] = None,
) -> Iterator[Path]:
    """Semi-naive least fixpoint of ``R = seeds ∪ join(R, base)``.

    Only the previous round's new paths are re-joined; this produces the same
    sequence as re-joining the whole accumulated set each round.
    """
    valid = _checker(semantic)
    max_length = caps.max_length
    seen: set[Path] = set()
    frontier: list[Path] = []
    for p in seeds:
        if len(p.edges) <= max_length and p not in seen and (valid is None or valid(p)):
            seen.add(p)
            frontier.append(p)
            yield p
    depth = 0
    while frontier:
        if depth >= caps.max_depth:
            if diag is not None:
                diag.depth_capped = True
            return
        depth += 1
        fresh: list[Path] = []
        for p in frontier:
            if check is not None:
                check()
            room = max_length - len(p.edges)
            for q in expand(p.nodes[-1]):
                if len(q.edges) > room:
                    if diag is not None:
                        diag.length_capped = True
                    continue
                r = p.concat(q)
                if r in seen or (valid is not None and not valid(r)):
                    continue
                seen.add(r)
                fresh.append(r)
                yield r
        frontier = fresh


def index_by_first(paths: Iterable[Path]) -> dict[str, list[Path]]:
    index: dict[str, list[Path]] = {}
    for p in paths:
        index.setdefault(p.nodes[0], []).append(p)
    return index


def _lookup(paths: Iterable[Path]) -> Expand:
    index = index_by_first(paths)
    return lambda v: index.get(v, ())


# -- eager operators --------------------------------------------------------


def selection(paths: Iterable[Path], condition: Condition, g: Graph) -> PathSet:
    return PathSet(p for p in paths if condition.holds(p, g))


def union(a: Iterable[Path], b: Iterable[Path]) -> PathSet:
    out = PathSet(a)
    for p in b:
        out.add(p)
    return out


def join(
    a: Iterable[Path],
    b: Iterable[Path],
    semantic: Semantic = Semantic.WALK,
    max_length: Optional[int] = None,
) -> PathSet:
    return PathSet(iter_join(a, _lookup(b), semantic, max_length))


def recursive(
    base: Iterable[Path],
    semantic: Semantic = Semantic.WALK,
    caps: Optional[EvalCaps] = None,
    diag: Optional[Diagnostics] = None,
) -> PathSet:
    base = list(base)
    return PathSet(iter_fixpoint(base, _lookup(base), semantic, caps or EvalCaps(), diag))


def recursive_seeded(
    seed: Iterable[Path],
    base: Iterable[Path],
    semantic: Semantic = Semantic.WALK,
    caps: Optional[EvalCaps] = None,
    diag: Optional[Diagnostics] = None,
) -> PathSet:
    return PathSet(iter_fixpoint(seed, _lookup(base), semantic, caps or EvalCaps(), diag))


def projection(
    paths: Iterable[Path], terms: Sequence[Term], limit: Optional[int], g: Graph
) -> list[tuple]:
    rows = []
    for p in paths:
        if limit is not None and len(rows) >= limit:
            break
        rows.append(tuple(t.value(p, g) for t in terms))
    return rows
