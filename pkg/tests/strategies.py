"""Hypothesis strategies for regex and query syntax trees."""

from hypothesis import strategies as st

from rpq.algebra import (
    And,
    CheckTerm,
    IdCmp,
    IdTerm,
    LabelCmp,
    LabelTerm,
    LengthCmp,
    LengthTerm,
    NodeTerm,
    Or,
    PathCheck,
    PathTerm,
    PropertyCmp,
    PropertyTerm,
    Ref,
)
from rpq.parser import Alt, Concat, LabelAtom, NegLabel, Opt, ParsedQuery, Plus, Star
from rpq.path import Semantic

identifiers = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
free_text = st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=6)
labels = st.one_of(identifiers, free_text.filter(bool))

leaves = st.one_of(labels.map(LabelAtom), labels.map(NegLabel))


def regexes(max_leaves: int = 12):
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Concat, inner, inner),
            st.builds(Alt, inner, inner),
            st.builds(Star, inner),
            st.builds(Plus, inner),
            st.builds(Opt, inner),
        ),
        max_leaves=max_leaves,
    )


def _depth(r) -> int:
    kids = [getattr(r, a) for a in ("left", "right", "child") if hasattr(r, a)]
    return 1 + max((_depth(k) for k in kids), default=0)


def bounded_regexes(max_depth: int = 6):
    return regexes().filter(lambda r: _depth(r) <= max_depth)


SRC, TGT = Ref("src", name="x"), Ref("tgt", name="y")
node_refs = st.one_of(
    st.just(SRC),
    st.just(TGT),
    st.just(Ref("first")),
    st.just(Ref("last")),
    st.integers(1, 9).map(lambda i: Ref("node", i)),
)
any_refs = st.one_of(node_refs, st.integers(1, 9).map(lambda i: Ref("edge", i)))
ops = st.sampled_from(["=", "<>", "<", ">", "<=", ">="])
numbers = st.one_of(
    st.integers(-10**6, 10**6),
    st.floats(allow_nan=False, allow_infinity=False, width=64),
)
values = st.one_of(free_text, numbers)
prop_keys = identifiers.filter(lambda k: k.upper() not in ("AND", "OR", "RETURN", "LIMIT"))

leaf_conditions = st.one_of(
    st.builds(PropertyCmp, any_refs, prop_keys, ops, values),
    st.builds(LabelCmp, any_refs, st.sampled_from(["=", "<>"]), labels),
    st.builds(IdCmp, any_refs, st.sampled_from(["=", "<>"]), free_text),
    st.builds(LengthCmp, ops, st.integers(0, 30)),
    st.builds(PathCheck, st.sampled_from([Semantic.TRAIL, Semantic.SIMPLE, Semantic.ACYCLIC])),
)
conditions = st.recursive(
    leaf_conditions,
    lambda inner: st.one_of(st.builds(And, inner, inner), st.builds(Or, inner, inner)),
    max_leaves=6,
)

terms = st.one_of(
    st.just(PathTerm("p")),
    st.builds(NodeTerm, node_refs),
    st.builds(PropertyTerm, any_refs, prop_keys),
    st.builds(LabelTerm, any_refs),
    st.builds(IdTerm, any_refs),
    st.just(LengthTerm()),
    st.builds(CheckTerm, st.sampled_from([Semantic.TRAIL, Semantic.SIMPLE, Semantic.ACYCLIC])),
)

queries = st.builds(
    ParsedQuery,
    restrictor=st.one_of(st.none(), st.sampled_from(list(Semantic))),
    path_var=st.just("p"),
    src_var=st.just("x"),
    tgt_var=st.just("y"),
    regex=regexes(8),
    condition=st.one_of(st.none(), conditions),
    terms=st.lists(terms, min_size=1, max_size=4).map(tuple),
    limit=st.one_of(st.none(), st.integers(1, 1000)),
)
