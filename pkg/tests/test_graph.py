import pytest
from hypothesis import given, settings, strategies as st

from rpq.graph import (
    DEFAULT_EDGES,
    DEFAULT_NODES,
    Edge,
    GraphError,
    GraphFormatError,
    Node,
    UnknownNodeError,
    build_graph,
    default_graph,
    dump_edge_file,
    dump_node_file,
    infer_value,
    load_graph,
    parse_edge_file,
    parse_node_file,
    paths0,
    paths1,
)
from rpq.path import Path

from helpers import random_graph


def test_parse_node_row():
    nodes = parse_node_file("@id|@label|name\np1|Person|Moe\n")
    assert nodes == [Node("p1", "Person", {"name": "Moe"})]


def test_empty_bodies():
    assert parse_node_file("@id|@label|name\n") == []
    assert parse_edge_file("@id|@label|@source|@target|@dir\n") == []


def test_duplicate_node_id_names_line():
    with pytest.raises(GraphFormatError) as info:
        parse_node_file("@id|@label|name\np1|Person|Moe\np1|Person|Bart\n")
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_arity_mismatch():
    with pytest.raises(GraphFormatError) as info:
        parse_node_file("@id|@label|name\np1|Person\n")
    assert info.value.line == 2
    with pytest.raises(GraphFormatError):
        parse_edge_file("@id|@label|@source|@target|@dir\ne0|Knows|p1|T\n")


def test_edge_row_and_undirected():
    (e,) = parse_edge_file("@id|@label|@source|@target|@dir\ne0|Knows|p1|p2|T\n")
    assert e == Edge("e0", "Knows", "p1", "p2", True)
    with pytest.raises(GraphFormatError, match="undirected edges unsupported"):
        parse_edge_file("@id|@label|@source|@target|@dir\ne0|Knows|p1|p2|F\n")


def test_duplicate_edge_id():
    text = "@id|@label|@source|@target|@dir\ne0|Knows|p1|p2|T\ne0|Knows|p2|p1|T\n"
    with pytest.raises(GraphFormatError) as info:
        parse_edge_file(text)
    assert info.value.line == 3


def test_swapped_files_are_rejected_by_node_parser():
    with pytest.raises(GraphFormatError):
        parse_node_file(DEFAULT_EDGES)
    with pytest.raises(GraphFormatError):
        parse_edge_file(DEFAULT_NODES)


def test_value_typing():
    assert infer_value("42") == 42
    assert infer_value("4.5") == 4.5
    assert infer_value("Moe") == "Moe"
    assert infer_value("-3") == -3.0
    assert isinstance(infer_value("nan"), str)


def test_unknown_endpoint():
    with pytest.raises(GraphError):
        build_graph([Node("p1", "P", {})], [Edge("e0", "Knows", "p1", "p9")])


def test_default_graph_shape():
    g = default_graph()
    assert len(g.nodes) == 7 and len(g.edges) == 10
    assert set(g.edge_labels) == {"Knows", "Likes", "HasCreator"}
    assert len(paths1(g, "Knows")) == 4
    assert len(paths0(g)) == 7
    assert g.out_edges("p1", "Knows") == [("e0", "p2")]
    assert g.out_paths("p2", "Likes") == (Path(("p2", "m2"), ("e6",)),)
    assert g.out_edges("p1", "Nope") == []
    with pytest.raises(UnknownNodeError):
        g.out_edges("zz", "Knows")


def test_empty_graph():
    g = build_graph([], [])
    assert len(paths0(g)) == 0
    assert g.partitions == {}


def check_csr(g):
    n = len(g.node_ids)
    seen = []
    for label, part in g.partitions.items():
        assert len(part.offsets) == n + 1
        assert part.offsets[0] == 0
        assert all(a <= b for a, b in zip(part.offsets, part.offsets[1:]))
        assert part.offsets[-1] == len(part.columns)
        for i in range(n):
            for eid, t in part.neighbours(i):
                e = g.edges[eid]
                assert e.label == label
                assert g.index[e.source] == i and g.index[e.target] == t
                seen.append(eid)
    assert sorted(seen) == sorted(g.edges)
    assert len(seen) == len(set(seen))


@pytest.mark.invariants
def test_csr_invariants_default():
    check_csr(default_graph())


@pytest.mark.invariants
@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_csr_invariants_random(seed):
    check_csr(random_graph(seed))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_dump_load_round_trip(seed):
    g = random_graph(seed)
    again = load_graph(dump_node_file(g.nodes.values()), dump_edge_file(g.edges.values()))
    assert again.nodes == g.nodes
    assert again.edges == g.edges


def test_float_and_text_round_trip():
    nodes = [Node("a", "T", {"x": 0.1, "s": "hi there", "n": 7})]
    again = parse_node_file(dump_node_file(nodes))
    assert again == nodes
