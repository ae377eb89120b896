"""Shared generators for the test suite."""

from __future__ import annotations

import random

from rpq.graph import Edge, Graph, Node, build_graph

LABELS = ("a", "b", "c")


def random_graph(seed, max_nodes: int = 12, max_edges: int = 30, labels=LABELS) -> Graph:
    """Sparse multigraph: at most 3 edges per node on average, self-loops allowed.

    Every label is used at least once and no (source, label, target) triple repeats.
    """
    rng = random.Random(str(seed))
    n = rng.randint(2, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    nodes = []
    for nid in ids:
        props = {"name": nid}
        if rng.random() < 0.8:
            props["age"] = rng.randint(0, 5)
        nodes.append(Node(nid, rng.choice(("P", "M")), props))
    m = rng.randint(len(labels), max(len(labels), min(max_edges, 3 * n)))
    edge_labels = list(labels) + [rng.choice(labels) for _ in range(m - len(labels))]
    rng.shuffle(edge_labels)
    triples: set = set()
    edges = []
    for label in edge_labels:
        for _ in range(20):
            triple = (rng.choice(ids), label, rng.choice(ids))
            if triple not in triples:
                break
        else:
            continue
        triples.add(triple)
        edges.append(Edge(f"e{len(edges)}", label, triple[0], triple[2]))
    return build_graph(nodes, edges)


def random_condition(rng: random.Random, g: Graph, depth: int = 0) -> str:
    """WHERE text mixing source, target, interior and boolean forms."""
    v = rng.choice(g.node_ids)
    leaves = [
        f'x.age {rng.choice(["=", "<", ">=", "<>"])} {rng.randint(0, 5)}',
        f'y.age {rng.choice(["=", ">", "<="])} {rng.randint(0, 5)}',
        f'ID(x) = "{v}"',
        f'ID(y) <> "{v}"',
        f'FIRST().name = "{v}"',
        f'LAST().name = "{v}"',
        f"LABEL(x) = {rng.choice('PM')}",
        f"LABEL(LAST()) <> {rng.choice('PM')}",
        f"NODE(2).age > {rng.randint(0, 5)}",
        f"LABEL(EDGE(1)) = {rng.choice(LABELS)}",
        f"LENGTH() <= {rng.randint(0, 4)}",
        "ISACYCLIC()",
    ]
    if depth < 2 and rng.random() < 0.6:
        left = random_condition(rng, g, depth + 1)
        right = random_condition(rng, g, depth + 1)
        joiner = "AND" if rng.random() < 0.75 else "OR"
        return f"({left}) {joiner} ({right})"
    return rng.choice(leaves)


REGEX_LABELS = ("a", "b", "c", "Knows", "has_creator")


def random_regex(rng: random.Random, depth: int = 0):
    """Seeded regex AST over all seven node kinds; depth at most 5."""
    from rpq.parser import Alt, Concat, LabelAtom, NegLabel, Opt, Plus, Star

    if depth >= 5 or rng.random() < 0.3:
        label = rng.choice(REGEX_LABELS)
        return NegLabel(label) if rng.random() < 0.2 else LabelAtom(label)
    kind = rng.choice((Concat, Alt, Star, Plus, Opt))
    if kind in (Concat, Alt):
        return kind(random_regex(rng, depth + 1), random_regex(rng, depth + 1))
    return kind(random_regex(rng, depth + 1))
