"""Paths, ordered path sets and the four path semantics."""

from __future__ import annotations

import enum
from typing import Iterable, Iterator, Sequence


class Semantic(enum.Enum):
    """Structural restriction a path must satisfy."""

    WALK = "WALK"
    TRAIL = "TRAIL"
    ACYCLIC = "ACYCLIC"
    SIMPLE = "SIMPLE"

    @classmethod
    def parse(cls, text: str) -> "Semantic":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown path semantic {text!r}") from None

    def __str__(self) -> str:
        return self.value


class IncompatiblePaths(ValueError):
    pass


class Path:
    """An alternating node/edge sequence identified by its element ids.

    ``length`` is the number of edges; a zero-length path holds a single node.
    Two paths are equal iff their node and edge sequences are equal.
    """

    __slots__ = ("nodes", "edges", "_hash")

    def __init__(self, nodes: Sequence[str], edges: Sequence[str] = ()):
        nodes = tuple(nodes)
        edges = tuple(edges)
        if len(nodes) != len(edges) + 1:
            raise ValueError(
                f"a path needs one more node than edges, got {len(nodes)} nodes "
                f"and {len(edges)} edges"
            )
        self.nodes = nodes
        self.edges = edges
        self._hash = hash((nodes, edges))

    @classmethod
    def _make(cls, nodes: tuple, edges: tuple) -> "Path":
        # unchecked constructor for hot loops
        p = object.__new__(cls)
        p.nodes = nodes
        p.edges = edges
        p._hash = hash((nodes, edges))
        return p

    @classmethod
    def single(cls, node: str) -> "Path":
        return cls._make((node,), ())

    @classmethod
    def edge(cls, source: str, edge: str, target: str) -> "Path":
        return cls._make((source, target), (edge,))

    @property
    def first(self) -> str:
        return self.nodes[0]

    @property
    def last(self) -> str:
        return self.nodes[-1]

    @property
    def length(self) -> int:
        return len(self.edges)

    def node(self, i: int) -> str | None:
        """1-based node accessor; None when out of range."""
        if 1 <= i <= len(self.nodes):
            return self.nodes[i - 1]
        return None

    def edge_at(self, i: int) -> str | None:
        """1-based edge accessor; None when out of range."""
        if 1 <= i <= len(self.edges):
            return self.edges[i - 1]
        return None

    def concat(self, other: "Path") -> "Path":
        if self.nodes[-1] != other.nodes[0]:
            raise IncompatiblePaths(
                f"cannot concatenate a path ending at {self.last} with one "
                f"starting at {other.first}"
            )
        if not other.edges:
            return self
        if not self.edges:
            return other
        return Path._make(self.nodes + other.nodes[1:], self.edges + other.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Path):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        parts = [self.nodes[0]]
        for e, n in zip(self.edges, self.nodes[1:]):
            parts.append(f"-{e}->")
            parts.append(n)
        return f"Path({''.join(parts)})"


def concat(p: Path, q: Path) -> Path:
    return p.concat(q)


def satisfies(p: Path, semantic: Semantic) -> bool:
    if semantic is Semantic.WALK:
        return True
    if semantic is Semantic.TRAIL:
        return len(set(p.edges)) == len(p.edges)
    nodes = p.nodes
    if semantic is Semantic.ACYCLIC:
        return len(set(nodes)) == len(nodes)
    # SIMPLE: interior nodes distinct and disjoint from both endpoints
    if len(nodes) <= 2:
        return True
    inner = nodes[1:-1]
    seen = set(inner)
    return len(seen) == len(inner) and nodes[0] not in seen and nodes[-1] not in seen


class PathSet:
    """Duplicate-free collection of paths iterating in insertion order.

    Equality is set equality; use :meth:`to_list` when order matters.
    """

    __slots__ = ("_items",)

    def __init__(self, paths: Iterable[Path] = ()):
        self._items: dict[Path, None] = dict.fromkeys(paths)

    def add(self, p: Path) -> bool:
        if p in self._items:
            return False
        self._items[p] = None
        return True

    def to_list(self) -> list[Path]:
        return list(self._items)

    def __iter__(self) -> Iterator[Path]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, p: object) -> bool:
        return p in self._items

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PathSet):
            return self._items.keys() == other._items.keys()
        if isinstance(other, (set, frozenset)):
            return self._items.keys() == other
        return NotImplemented

    def __repr__(self) -> str:
        return f"PathSet({list(self._items)!r})"
