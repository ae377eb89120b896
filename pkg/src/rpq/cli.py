"""Interactive shell: ``rpq -n nodes.pg -e edges.pg``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO

from .engine import SessionConfig, run
from .graph import (
    Graph,
    GraphError,
    default_graph,
    load_graph,
    parse_edge_file,
)
from .parser import QueryError, parse
from .path import Path, Semantic
from .algebra import PathTerm
from . import planner

HELP = """\
Commands:
  /h              show this help
  /limit N        maximum number of results per query
  /depth N        maximum recursion depth
  /maxlen N       maximum path length
  /semantics S    default path semantics: walk, trail, acyclic or simple
  /opt on|off     toggle plan optimization
  /plan QUERY     show the basic and optimized plans of QUERY
  /time on|off    toggle timing output
  /quit           exit
Any other line is run as a query, e.g.
  MATCH TRAIL p = (x)-[Knows+]->(y) WHERE x.name = "Lisa" RETURN p;"""


def format_path(p: Path, g: Graph) -> str:
    parts = [p.nodes[0]]
    for eid, nid in zip(p.edges, p.nodes[1:]):
        parts.append(f"{eid}({g.edges[eid].label})")
        parts.append(nid)
    return " ".join(parts)


def format_cell(value, g: Graph) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Path):
        return format_path(value, g)
    return str(value)


def format_results(result, g: Graph) -> list[str]:
    terms = result.terms
    if len(terms) == 1 and isinstance(terms[0], PathTerm):
        return [
            f"Path #{k} - {format_path(p, g)}" for k, p in enumerate(result.paths, start=1)
        ]
    return ["\t".join(format_cell(v, g) for v in row) for row in result.rows]


def load(nodes_file: Optional[str], edges_file: Optional[str], err: TextIO) -> Graph:
    if nodes_file is None and edges_file is None:
        return default_graph()
    if nodes_file is None or edges_file is None:
        print("warning: both -n and -e are required; loading the default graph", file=err)
        return default_graph()
    try:
        with open(nodes_file, encoding="utf-8") as fh:
            node_text = fh.read()
        with open(edges_file, encoding="utf-8") as fh:
            edge_text = fh.read()
    except OSError as exc:
        print(f"warning: cannot read graph files ({exc}); loading the default graph", file=err)
        return default_graph()
    try:
        return load_graph(node_text, edge_text)
    except GraphError as exc:
        try:
            parse_edge_file(node_text)
            swapped = True
        except GraphError:
            swapped = False
        if swapped:
            print(
                "warning: the node file must be given with -n and the edge file with -e; "
                "loading the default graph",
                file=err,
            )
        else:
            print(f"warning: invalid graph files ({exc}); loading the default graph", file=err)
        return default_graph()


def _positive(arg: str) -> int:
    value = int(arg)
    if value < 1:
        raise ValueError(arg)
    return value


def _toggle(arg: str) -> bool:
    word = arg.strip().lower()
    if word not in ("on", "off"):
        raise ValueError(arg)
    return word == "on"


class Shell:
    def __init__(self, g: Graph, cfg: SessionConfig, out: TextIO):
        self.g = g
        self.cfg = cfg
        self.out = out

    def say(self, text: str = "") -> None:
        print(text, file=self.out)

    def handle(self, line: str) -> bool:
        """Process one input line; returns False when the session should end."""
        line = line.strip()
        if not line:
            return True
        if line.startswith("/"):
            return self.command(line)
        self.query(line)
        return True

    def command(self, line: str) -> bool:
        name, _, arg = line.partition(" ")
        arg = arg.strip()
        cfg = self.cfg
        setters = {
            "/limit": ("result_limit", _positive, "limit"),
            "/depth": ("max_depth", _positive, "max recursion depth"),
            "/maxlen": ("max_length", _positive, "max path length"),
            "/opt": ("optimize", _toggle, "optimization"),
            "/time": ("timing", _toggle, "timing"),
            "/semantics": ("semantic", Semantic.parse, "semantics"),
        }
        if name == "/h":
            self.say(HELP)
        elif name == "/quit":
            return False
        elif name == "/plan":
            self.plan(arg)
        elif name in setters:
            attr, convert, what = setters[name]
            try:
                value = convert(arg)
            except ValueError:
                self.say(f"invalid value {arg!r} for {name}")
                return True
            setattr(cfg, attr, value)
            if isinstance(value, bool):
                shown = "on" if value else "off"
            elif isinstance(value, Semantic):
                shown = value.value
            else:
                shown = str(value)
            self.say(f"{what} set to {shown}")
        else:
            self.say(f"unknown command {name}; type /h for help")
        return True

    def plan(self, text: str) -> None:
        try:
            basic = planner.translate(parse(text), self.cfg.semantic)
        except QueryError as exc:
            self.say(f"error: {exc}")
            return
        self.say("Basic plan:")
        self.say(planner.explain(basic))
        self.say("Optimized plan:")
        self.say(planner.explain(planner.optimize(basic)))

    def query(self, text: str) -> None:
        try:
            result = run(text, self.g, self.cfg)
        except QueryError as exc:
            self.say(f"error: {exc}")
            return
        for line in format_results(result, self.g):
            self.say(line)
        n = len(result)
        noun = "result" if n == 1 else "results"
        if self.cfg.timing:
            self.say(f"{n} {noun} in {result.elapsed:.3f} s")
        else:
            self.say(f"{n} {noun}")


def repl(g: Graph, cfg: SessionConfig, stdin: TextIO = None, stdout: TextIO = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    shell = Shell(g, cfg, stdout)
    interactive = stdin.isatty()
    while True:
        if interactive:
            print("rpq> ", end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            return 0
        if not shell.handle(line):
            return 0
        stdout.flush()


def main(argv: Optional[Sequence[str]] = None, stdin: TextIO = None, stdout: TextIO = None,
         stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = argparse.ArgumentParser(prog="rpq", description="Regular path queries over a property graph.")
    ap.add_argument("-n", dest="nodes", metavar="FILE", help="node file")
    ap.add_argument("-e", dest="edges", metavar="FILE", help="edge file")
    args = ap.parse_args(argv)
    g = load(args.nodes, args.edges, stderr)
    print(f"Graph loaded: {len(g.nodes)} nodes, {len(g.edges)} edges. Type /h for help.", file=stdout)
    return repl(g, SessionConfig(), stdin, stdout)


if __name__ == "__main__":
    sys.exit(main())
