"""In-memory property graph stored as one CSR partition per edge label.

Node file::

    @id|@label|name|age
    p1|Person|Moe|42

Edge file::

    @id|@label|@source|@target|@dir
    e0|Knows|p1|p2|T

Lines starting with ``#`` and blank lines are ignored.  Property cells are
typed on load: all digits is an integer, otherwise a parseable number is a
decimal, otherwise text.  An empty cell means the property is absent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .path import Path, PathSet

PropertyValue = Union[str, int, float]

NODE_HEADER_PREFIX = ("@id", "@label")
EDGE_HEADER = ("@id", "@label", "@source", "@target", "@dir")
SEP = "|"


class GraphError(Exception):
    pass


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.reason = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownNodeError(GraphError, KeyError):
    def __str__(self) -> str:
        return f"unknown node {self.args[0]!r}"


@dataclass(frozen=True)
class Node:
    id: str
    label: str
    properties: dict[str, PropertyValue] = field(default_factory=dict)

    def __hash__(self) -> int:
        return hash((self.id, self.label, tuple(sorted(self.properties.items()))))


@dataclass(frozen=True)
class Edge:
    id: str
    label: str
    source: str
    target: str
    directed: bool = True


@dataclass(frozen=True)
class CsrPartition:
    """Adjacency of one edge label.

    ``offsets[i]:offsets[i+1]`` delimits the out-edges of the node with dense
    index ``i`` inside ``columns``; each column is ``(edge_id, target_index)``.
    """

    label: str
    offsets: tuple[int, ...]
    columns: tuple[tuple[str, int], ...]

    def __len__(self) -> int:
        return len(self.columns)

    def neighbours(self, index: int) -> tuple[tuple[str, int], ...]:
        return self.columns[self.offsets[index] : self.offsets[index + 1]]


def infer_value(cell: str) -> PropertyValue:
    if cell.isascii() and cell.isdigit():
        return int(cell)
    try:
        number = float(cell)
    except ValueError:
        return cell
    if math.isfinite(number):
        return number
    return cell


def _rows(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield lineno, [cell.strip() for cell in line.split(SEP)]


def parse_node_file(text: str) -> list[Node]:
    rows = _rows(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise GraphFormatError("missing node header") from None
    if tuple(header[:2]) != NODE_HEADER_PREFIX:
        raise GraphFormatError(
            f"node header must start with '@id|@label', got {SEP.join(header)!r}", lineno
        )
    keys = header[2:]
    for key in keys:
        if not key or key.startswith("@"):
            raise GraphFormatError(f"invalid property key {key!r} in node header", lineno)
    if len(set(keys)) != len(keys):
        raise GraphFormatError("duplicate property key in node header", lineno)

    nodes: list[Node] = []
    seen: set[str] = set()
    for lineno, cells in rows:
        if len(cells) != len(header):
            raise GraphFormatError(
                f"expected {len(header)} fields, got {len(cells)}", lineno
            )
        node_id, label = cells[0], cells[1]
        if not node_id or not label:
            raise GraphFormatError("node id and label must be non-empty", lineno)
        if node_id in seen:
            raise GraphFormatError(f"duplicate node id {node_id!r}", lineno)
        seen.add(node_id)
        props = {k: infer_value(v) for k, v in zip(keys, cells[2:]) if v != ""}
        nodes.append(Node(node_id, label, props))
    return nodes


def parse_edge_file(text: str) -> list[Edge]:
    rows = _rows(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise GraphFormatError("missing edge header") from None
    if tuple(header) != EDGE_HEADER:
        raise GraphFormatError(
            f"edge header must be {SEP.join(EDGE_HEADER)!r}, got {SEP.join(header)!r}",
            lineno,
        )
    edges: list[Edge] = []
    seen: set[str] = set()
    for lineno, cells in rows:
        if len(cells) != len(EDGE_HEADER):
            raise GraphFormatError(
                f"expected {len(EDGE_HEADER)} fields, got {len(cells)}", lineno
            )
        edge_id, label, source, target, direction = cells
        if not edge_id or not label or not source or not target:
            raise GraphFormatError("edge fields must be non-empty", lineno)
        if direction != "T":
            raise GraphFormatError(
                f"undirected edges unsupported (@dir must be 'T', got {direction!r})",
                lineno,
            )
        if edge_id in seen:
            raise GraphFormatError(f"duplicate edge id {edge_id!r}", lineno)
        seen.add(edge_id)
        edges.append(Edge(edge_id, label, source, target, True))
    return edges


def _format_value(value: PropertyValue) -> str:
    text = repr(value) if isinstance(value, float) else str(value)
    if SEP in text or "\n" in text:
        raise GraphError(f"value {text!r} cannot be serialised")
    return text


def dump_node_file(nodes: Iterable[Node]) -> str:
    nodes = list(nodes)
    keys: list[str] = []
    for n in nodes:
        for k in n.properties:
            if k not in keys:
                keys.append(k)
    lines = [SEP.join(NODE_HEADER_PREFIX + tuple(keys))]
    for n in nodes:
        cells = [n.id, n.label]
        cells += [_format_value(n.properties[k]) if k in n.properties else "" for k in keys]
        lines.append(SEP.join(cells))
    return "\n".join(lines) + "\n"


def dump_edge_file(edges: Iterable[Edge]) -> str:
    lines = [SEP.join(EDGE_HEADER)]
    lines += [SEP.join((e.id, e.label, e.source, e.target, "T")) for e in edges]
    return "\n".join(lines) + "\n"


class Graph:
    """Immutable property graph with per-label CSR adjacency.

    Dense node indices follow input order; within a partition the out-edges of
    a node keep their input order.
    """

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge]):
        self.nodes: dict[str, Node] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise GraphError(f"duplicate node id {n.id!r}")
            self.nodes[n.id] = n
        self.node_ids: tuple[str, ...] = tuple(self.nodes)
        self.index: dict[str, int] = {nid: i for i, nid in enumerate(self.node_ids)}

        self.edges: dict[str, Edge] = {}
        for e in edges:
            if e.id in self.edges:
                raise GraphError(f"duplicate edge id {e.id!r}")
            for endpoint in (e.source, e.target):
                if endpoint not in self.nodes:
                    raise GraphError(
                        f"edge {e.id!r} references unknown node {endpoint!r}"
                    )
            self.edges[e.id] = e

        node_labels: dict[str, list[str]] = {}
        for n in self.nodes.values():
            node_labels.setdefault(n.label, []).append(n.id)
        self.node_labels: dict[str, tuple[str, ...]] = {
            k: tuple(v) for k, v in node_labels.items()
        }

        by_label: dict[str, list[list[tuple[str, int]]]] = {}
        n_nodes = len(self.node_ids)
        for e in self.edges.values():
            buckets = by_label.get(e.label)
            if buckets is None:
                buckets = by_label[e.label] = [[] for _ in range(n_nodes)]
            buckets[self.index[e.source]].append((e.id, self.index[e.target]))
        self.edge_labels: tuple[str, ...] = tuple(by_label)

        self.partitions: dict[str, CsrPartition] = {}
        self._units: dict[str, tuple[Path, ...]] = {}
        for label, buckets in by_label.items():
            offsets = [0]
            columns: list[tuple[str, int]] = []
            for bucket in buckets:
                columns.extend(bucket)
                offsets.append(len(columns))
            part = CsrPartition(label, tuple(offsets), tuple(columns))
            self.partitions[label] = part
            units = []
            for i in range(n_nodes):
                src = self.node_ids[i]
                for eid, t in part.neighbours(i):
                    units.append(Path.edge(src, eid, self.node_ids[t]))
            self._units[label] = tuple(units)

        # label-agnostic adjacency in edge input order, used by the traversal baselines
        adjacency: dict[str, list[Edge]] = {nid: [] for nid in self.node_ids}
        for e in self.edges.values():
            adjacency[e.source].append(e)
        self.adjacency: dict[str, tuple[Edge, ...]] = {
            k: tuple(v) for k, v in adjacency.items()
        }

    def __repr__(self) -> str:
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    def _node_index(self, v: str) -> int:
        try:
            return self.index[v]
        except KeyError:
            raise UnknownNodeError(v) from None

    def out_edges(self, v: str, label: str) -> list[tuple[str, str]]:
        i = self._node_index(v)
        part = self.partitions.get(label)
        if part is None:
            return []
        return [(eid, self.node_ids[t]) for eid, t in part.neighbours(i)]

    def out_paths(self, v: str, label: str) -> tuple[Path, ...]:
        """Length-1 paths leaving ``v`` over ``label`` in partition order."""
        i = self._node_index(v)
        part = self.partitions.get(label)
        if part is None:
            return ()
        return self._units[label][part.offsets[i] : part.offsets[i + 1]]

    def unit_paths(self, label: str) -> tuple[Path, ...]:
        return self._units.get(label, ())

    def validate_path(self, p: Path) -> None:
        for i, eid in enumerate(p.edges):
            e = self.edges.get(eid)
            if e is None:
                raise GraphError(f"unknown edge {eid!r}")
            if e.source != p.nodes[i] or e.target != p.nodes[i + 1]:
                raise GraphError(f"edge {eid!r} does not connect {p.nodes[i]} to {p.nodes[i + 1]}")
        for nid in p.nodes:
            if nid not in self.nodes:
                raise UnknownNodeError(nid)

    def edge_label(self, eid: str) -> str:
        return self.edges[eid].label


def build_graph(nodes: Iterable[Node], edges: Iterable[Edge]) -> Graph:
    return Graph(nodes, edges)


def load_graph(node_text: str, edge_text: str) -> Graph:
    return Graph(parse_node_file(node_text), parse_edge_file(edge_text))


def paths0(g: Graph) -> PathSet:
    return PathSet(Path.single(nid) for nid in g.node_ids)


def paths1(g: Graph, label: str) -> PathSet:
    return PathSet(g.unit_paths(label))


DEFAULT_NODES = """\
@id|@label|name|txt
p1|Person|Moe|
p2|Person|Bart|
p3|Person|Lisa|
p4|Person|Apu|
m1|Message||Msg1
m2|Message||Msg2
m3|Message||Msg3
"""

DEFAULT_EDGES = """\
@id|@label|@source|@target|@dir
e0|Knows|p1|p2|T
e1|Likes|p1|m1|T
e2|HasCreator|m1|p2|T
e3|Knows|p3|p2|T
e4|Knows|p2|p4|T
e5|Knows|p4|p1|T
e6|Likes|p2|m2|T
e7|HasCreator|m2|p4|T
e8|Likes|p4|m3|T
e9|HasCreator|m3|p1|T
"""


def default_graph() -> Graph:
    """The seven-node social graph: a Knows cycle and a Likes/HasCreator cycle."""
    return load_graph(DEFAULT_NODES, DEFAULT_EDGES)
