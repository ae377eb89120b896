"""Workload generation and timing of the engine against the traversal baselines.

    python -m rpq.bench --synthetic 10000 --seed 7 --out report.csv
"""

from __future__ import annotations

import argparse
import csv
import gc
import io
import itertools
import random
import statistics
import sys
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .algebra import EvalCaps
from .baseline import bfs_paths, build_automaton, dfs_paths
from .engine import Cancelled, Deadline, SessionConfig, run
from .graph import Edge, Graph, Node, build_graph, default_graph, load_graph
from .parser import Alt, Concat, LabelAtom, NegLabel, Plus, Regex, parse, parse_regex, regex_text
from .path import Semantic

SYSTEMS = ("engine", "bfs_baseline", "dfs_baseline")
PLACEHOLDERS = ("A", "B", "C")
CSV_COLUMNS = ("query_id", "template", "system", "run", "seconds", "results", "timed_out")


class BenchError(ValueError):
    pass


class TooFewLabels(BenchError):
    pass


class NoSource(BenchError):
    pass


@dataclass(frozen=True)
class AbstractQueryType:
    pattern: str
    count: int
    example: str = ""

    @property
    def placeholders(self) -> tuple[str, ...]:
        return tuple(p for p in PLACEHOLDERS if p in self.pattern)


_CATALOG = (
    AbstractQueryType("A.B", 6, "hasModerator.knows"),
    AbstractQueryType("A.B.C", 6, "hasCreator.isLocatedIn.isPartOf"),
    AbstractQueryType("A+.B", 6, "knows+.isLocatedIn"),
    AbstractQueryType("A.B+", 6, "isLocatedIn.isPartOf+"),
    AbstractQueryType("C|A+", 6, "likes|knows+"),
    AbstractQueryType("(A.B)+", 2, "(likes.hasCreator)+"),
    AbstractQueryType("C.(A|B)", 6, "knows.(likes|hasInterest)"),
    AbstractQueryType("A+", 3, "knows+"),
    AbstractQueryType("A*.B", 6, "replyOf*.hasCreator"),
    AbstractQueryType("A.B*", 6, "isLocatedIn.isPartOf*"),
    AbstractQueryType("A*", 3, "knows*"),
    AbstractQueryType("(A.B)*", 2, "(likes.hasCreator)*"),
    AbstractQueryType("(A.B)?", 6, "(hasCreator.isLocatedIn)?"),
    AbstractQueryType("A.B?", 6, "knows.likes?"),
    AbstractQueryType("A?.B", 6, "knows?.likes"),
    AbstractQueryType("A|B", 6, "likes|hasCreator"),
    AbstractQueryType("B|A", 6, "hasCreator|likes"),
    AbstractQueryType("(A.B)|C", 6, "(likes.hasCreator)|knows"),
    AbstractQueryType("C|(A.B)", 6, "knows|(likes.hasCreator)"),
    AbstractQueryType("(A|B)|C", 6, "(likes|knows)|hasInterest"),
    AbstractQueryType("(A+)|C", 6, "(knows+)|likes"),
    AbstractQueryType("(A*)|C", 6, "(knows*)|likes"),
    AbstractQueryType("(A?)|C", 6, "(knows?)|likes"),
    AbstractQueryType("A|(C?)", 6, "likes|(knows?)"),
    AbstractQueryType("A?", 6, "knows?"),
    AbstractQueryType("(A?)?", 6, "(knows?)?"),
    AbstractQueryType("C|(A|B)", 6, "knows|(likes|hasInterest)"),
    AbstractQueryType("(A|B)+", 6, "(knows|likes)+"),
    AbstractQueryType("(A|B)?", 6, "(knows|likes)?"),
    AbstractQueryType("(A|B)*", 6, "(knows|likes)*"),
)


def catalog() -> tuple[AbstractQueryType, ...]:
    """The 30 abstract query types; instance counts sum to 166."""
    return _CATALOG


@dataclass(frozen=True)
class ConcreteQuery:
    query_id: str
    template: str
    regex: Regex
    source: Optional[str]

    @property
    def regex_text(self) -> str:
        return regex_text(self.regex)

    def text(self, semantic: Semantic = Semantic.WALK) -> str:
        where = f' WHERE ID(x) = "{self.source}"' if self.source is not None else ""
        return f"MATCH {semantic.value} p = (x)-[{self.regex_text}]->(y){where} RETURN p"


def bind(r: Regex, labels: dict[str, str]) -> Regex:
    """Replace placeholder labels in ``r`` by concrete edge labels."""
    if isinstance(r, LabelAtom):
        return LabelAtom(labels.get(r.label, r.label))
    if isinstance(r, NegLabel):
        return NegLabel(labels.get(r.label, r.label))
    if isinstance(r, (Concat, Alt)):
        return type(r)(bind(r.left, labels), bind(r.right, labels))
    return type(r)(bind(r.child, labels))


def leading_labels(r: Regex) -> list[str]:
    """Labels that can begin a match, leftmost first."""
    out: list[str] = []

    def first(node: Regex) -> bool:
        # appends the first set of node; returns nullability
        if isinstance(node, (LabelAtom, NegLabel)):
            if node.label not in out:
                out.append(node.label)
            return False
        if isinstance(node, Concat):
            return first(node.right) if first(node.left) else False
        if isinstance(node, Alt):
            left = first(node.left)
            return first(node.right) or left
        if isinstance(node, Plus):
            return first(node.child)
        first(node.child)
        return True

    first(r)
    return out


def median_source(g: Graph, label: str) -> str:
    """Lower-median node by outdegree in ``label``, ties broken by node id."""
    if label not in g.partitions:
        raise NoSource(f"no node has an outgoing {label!r} edge")
    degree = {}
    for nid in g.node_ids:
        n = len(g.out_edges(nid, label))
        if n:
            degree[nid] = n
    if not degree:
        raise NoSource(f"no node has an outgoing {label!r} edge")
    ranked = sorted(degree, key=lambda nid: (degree[nid], nid))
    return ranked[(len(ranked) - 1) // 2]


def instantiate(t: AbstractQueryType, g: Graph, seed: int) -> list[ConcreteQuery]:
    """Up to ``t.count`` queries with distinct label bindings, in seeded order."""
    holes = t.placeholders
    labels = sorted(g.edge_labels)
    if len(labels) < len(holes):
        raise TooFewLabels(
            f"template {t.pattern} needs {len(holes)} distinct labels, graph has {len(labels)}"
        )
    choices = list(itertools.permutations(labels, len(holes)))
    random.Random(f"{seed}:{t.pattern}").shuffle(choices)
    template = parse_regex(t.pattern)
    queries = []
    for k, chosen in enumerate(choices[: t.count], start=1):
        r = bind(template, dict(zip(holes, chosen)))
        queries.append(
            ConcreteQuery(f"{t.pattern}#{k}", t.pattern, r, median_source(g, leading_labels(r)[0]))
        )
    return queries


def workload(g: Graph, seed: int, templates: Optional[Iterable[AbstractQueryType]] = None):
    out: list[ConcreteQuery] = []
    for t in templates if templates is not None else catalog():
        out.extend(instantiate(t, g, seed))
    return out


SYNTHETIC_LABELS = ("Knows", "Likes", "HasCreator")


def synthetic_graph(n_nodes: int = 10_000, seed: int = 0, chords: int = 8) -> Graph:
    """Knows ring plus ``chords`` random out-edges per node for each label.

    The ring keeps the graph cyclic and strongly connected; the chords give
    every node a mixed-label out-degree of ``1 + 3 * chords``.
    """
    if n_nodes < 2 or chords < 0:
        raise BenchError("a synthetic graph needs at least 2 nodes and chords >= 0")
    rng = random.Random(seed)
    ids = [f"v{i}" for i in range(n_nodes)]
    nodes = [Node(nid, "Person", {"name": nid}) for nid in ids]
    edges: list[Edge] = []
    for i, nid in enumerate(ids):
        edges.append(Edge(f"r{i}", "Knows", nid, ids[(i + 1) % n_nodes]))
    k = 0
    for nid in ids:
        for label in SYNTHETIC_LABELS:
            for _ in range(chords):
                edges.append(Edge(f"c{k}", label, nid, ids[rng.randrange(n_nodes)]))
                k += 1
    return build_graph(nodes, edges)


# -- timing ---------------------------------------------------------------------


@dataclass
class BenchConfig:
    runs: int = 3
    limit: int = 100
    timeout_s: float = 120.0
    semantic: Semantic = Semantic.WALK
    max_length: int = 20
    max_depth: Optional[int] = None  # None: same as max_length, so depth never binds first


@dataclass(frozen=True)
class BenchRow:
    query_id: str
    template: str
    system: str
    run: int
    seconds: float
    results: Optional[int]
    timed_out: bool


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def seconds(self, query_id: str, system: str) -> list[float]:
        return [r.seconds for r in self.rows if r.query_id == query_id and r.system == system]

    def median(self, query_id: str, system: str) -> float:
        return statistics.median(self.seconds(query_id, system))

    def mean(self, query_id: str, system: str) -> float:
        return statistics.fmean(self.seconds(query_id, system))

    def result_counts(self, query_id: str) -> dict[str, set[int]]:
        out: dict[str, set[int]] = {}
        for r in self.rows:
            if r.query_id == query_id and not r.timed_out:
                out.setdefault(r.system, set()).add(r.results)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.query_id,
                r.template,
                r.system,
                r.run,
                f"{r.seconds:.6f}",
                "" if r.results is None else r.results,
                "true" if r.timed_out else "false",
            ])
        return buf.getvalue()


def _time_once(system: str, q: ConcreteQuery, g: Graph, cfg: BenchConfig) -> tuple[float, Optional[int], bool]:
    # collector pauses land on whichever system happens to be running, as in timeit
    enabled = gc.isenabled()
    gc.disable()
    try:
        return _timed(system, q, g, cfg)
    finally:
        if enabled:
            gc.enable()


def _timed(system: str, q: ConcreteQuery, g: Graph, cfg: BenchConfig) -> tuple[float, Optional[int], bool]:
    depth = cfg.max_depth if cfg.max_depth is not None else cfg.max_length
    started = time.perf_counter()
    try:
        if system == "engine":
            session = SessionConfig(
                result_limit=cfg.limit,
                max_depth=depth,
                max_length=cfg.max_length,
                semantic=cfg.semantic,
                timeout=cfg.timeout_s,
            )
            n = len(run(q.text(cfg.semantic), g, session))
        else:
            deadline = Deadline(cfg.timeout_s)
            caps = EvalCaps(cfg.limit, depth, cfg.max_length)
            search = bfs_paths if system == "bfs_baseline" else dfs_paths
            # every system is handed the same query text
            automaton = build_automaton(parse(q.text(cfg.semantic)).regex)
            n = len(search(g, automaton, q.source, cfg.semantic, caps, deadline.check))
    except Cancelled:
        return cfg.timeout_s, None, True
    return time.perf_counter() - started, n, False


def run_bench(
    queries: Sequence[ConcreteQuery],
    g: Graph,
    systems: Sequence[str] = SYSTEMS,
    cfg: Optional[BenchConfig] = None,
) -> BenchReport:
    cfg = cfg or BenchConfig()
    unknown = set(systems) - set(SYSTEMS)
    if unknown:
        raise BenchError(f"unknown systems: {sorted(unknown)}")
    report = BenchReport()
    for q in queries:
        # systems alternate within each run so cache warmth and drift hit all of them
        for k in range(1, cfg.runs + 1):
            for system in systems:
                seconds, n, timed_out = _time_once(system, q, g, cfg)
                report.rows.append(BenchRow(q.query_id, q.template, system, k, seconds, n, timed_out))
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="rpq-bench", description="Time the engine against BFS/DFS baselines.")
    ap.add_argument("-n", dest="nodes", metavar="FILE", help="node file")
    ap.add_argument("-e", dest="edges", metavar="FILE", help="edge file")
    ap.add_argument("--synthetic", type=int, metavar="N", help="use a seeded ring-plus-chords graph of N nodes")
    ap.add_argument("--chords", type=int, default=8, help="chords per node and label for --synthetic")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--timeout-s", type=float, default=120.0)
    ap.add_argument("--limit", type=int, default=100)
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--semantics", default="walk", choices=[s.value.lower() for s in Semantic])
    ap.add_argument("--template", action="append", help="restrict to these patterns (repeatable)")
    ap.add_argument("--out", metavar="FILE", help="CSV destination (default: stdout)")
    args = ap.parse_args(argv)

    if args.nodes and args.edges:
        with open(args.nodes, encoding="utf-8") as fn, open(args.edges, encoding="utf-8") as fe:
            g = load_graph(fn.read(), fe.read())
    elif args.synthetic:
        g = synthetic_graph(args.synthetic, args.seed, args.chords)
    else:
        g = default_graph()

    templates = catalog()
    if args.template:
        templates = [t for t in templates if t.pattern in set(args.template)]
    cfg = BenchConfig(args.runs, args.limit, args.timeout_s, Semantic.parse(args.semantics))
    report = run_bench(workload(g, args.seed, templates), g, SYSTEMS, cfg)
    text = report.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
