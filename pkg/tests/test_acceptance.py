"""Acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line, visible
without ``-s``.  Run them alone with::

    pytest tests/test_acceptance.py -v
"""

import csv
import io
import os
import random
import subprocess
import sys
import time
from pathlib import Path as FsPath

import pytest

from rpq.algebra import EvalCaps
from rpq.baseline import bfs_paths, brute_force, build_automaton, dfs_paths
from rpq.bench import (
    SYSTEMS,
    BenchConfig,
    catalog,
    instantiate,
    main as bench_main,
    run_bench,
    synthetic_graph,
    workload,
)
from rpq.cli import format_results
from rpq.engine import SessionConfig, run
from rpq.graph import default_graph
from rpq.parser import parse, parse_regex, regex_text
from rpq.path import Path, Semantic
from rpq.planner import (
    Join,
    Projection,
    Recursive,
    RecursiveSeeded,
    Scan1,
    Selection,
    Union,
    explain,
    optimize,
    translate,
)

from helpers import random_condition, random_graph, random_regex

G = default_graph()
TESTS = FsPath(__file__).parent
MOE = 'MATCH TRAIL p = (x)-[(Knows|Likes.HasCreator)+]->(y) WHERE x.name = "Moe" RETURN y.name LIMIT 10'
LISA = 'MATCH TRAIL p = (x)-[Knows+]->(y) WHERE x.name = "Lisa" RETURN p;'


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail

    return emit


def P(*items):
    return Path(items[::2], items[1::2])


# 1 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_1_oracle_equivalence(report):
    graphs = [G] + [random_graph(("acc", i)) for i in range(100)]
    started = time.perf_counter()
    checked, mismatches = 0, []
    for gi, g in enumerate(graphs):
        queries = workload(g, gi)
        assert {q.template for q in queries} == {t.pattern for t in catalog()}
        for q in queries:
            automaton = build_automaton(q.regex)
            for sem in Semantic:
                # WALK is capped at length 8; the restricted semantics terminate
                # on their own at this size, 64 only guards against a defect
                cap = 8 if sem is Semantic.WALK else 64
                caps = EvalCaps(10**9, cap, cap)
                engine = run(q.text(sem), g, SessionConfig(10**9, cap, cap)).path_set()
                bfs = set(bfs_paths(g, automaton, q.source, sem, caps))
                dfs = set(dfs_paths(g, automaton, q.source, sem, caps))
                brute = set(brute_force(g, q.regex, sem, cap, q.source))
                checked += 1
                if not engine == bfs == dfs == brute:
                    mismatches.append((gi, q.query_id, sem.value))
    elapsed = time.perf_counter() - started
    ok = not mismatches and elapsed < 300
    report(
        1,
        ok,
        f"{checked} (graph, query, semantic) cases over {len(graphs)} graphs, "
        f"{len(mismatches)} mismatches {mismatches[:3]}, {elapsed:.1f} s",
    )


# 2 -----------------------------------------------------------------------------


def _where(rng: random.Random, g, kind: str) -> str:
    v = rng.choice(g.node_ids)
    if kind == "source":
        return rng.choice([f'ID(x) = "{v}"', f"x.age >= {rng.randint(0, 5)}", f"LABEL(x) = {rng.choice('PM')}"])
    if kind == "target":
        return rng.choice([f'ID(y) = "{v}"', f"y.age < {rng.randint(0, 5)}", f"LABEL(y) <> {rng.choice('PM')}"])
    if kind == "conjunctive":
        return f'{_where(rng, g, "source")} AND {_where(rng, g, "target")} AND LENGTH() >= 1'
    return random_condition(rng, g)


def test_criterion_2_pushdown_soundness(report):
    kinds = ("source", "target", "conjunctive", "mixed")
    caps = dict(result_limit=10**6, max_depth=8, max_length=8)
    failures, rewritten = [], 0
    for seed in range(200):
        rng = random.Random(f"pushdown:{seed}")
        g = random_graph(("pushdown", seed))
        q = rng.choice(workload(g, seed))
        sem = rng.choice(list(Semantic))
        text = f"MATCH {sem.value} p = (x)-[{q.regex_text}]->(y) WHERE {_where(rng, g, kinds[seed % 4])} RETURN p"
        basic = translate(parse(text))
        rewritten += optimize(basic) != basic
        on = run(text, g, SessionConfig(**caps)).path_set()
        off = run(text, g, SessionConfig(**caps, optimize=False)).path_set()
        if on != off:
            failures.append(text)
    report(
        2,
        not failures,
        f"200 seeded pairs ({rewritten} rewritten by pushdown), {len(failures)} differ {failures[:1]}",
    )


# 3 -----------------------------------------------------------------------------


def _structure(plan) -> tuple:
    # operator kinds, semantics tags and children; conditions by text
    if isinstance(plan, Scan1):
        return ("Scan1", plan.label)
    if isinstance(plan, Selection):
        return ("Selection", plan.condition.to_text(), _structure(plan.child))
    tag = getattr(plan, "semantic", None)
    kids = tuple(_structure(c) for c in plan.children())
    return (type(plan).__name__, tag.value if tag else None) + kids


def _seeds_selected(plan) -> bool:
    # every union branch in the recursion seed starts with the pushed selection
    def starts_selected(node) -> bool:
        if isinstance(node, Selection):
            return True
        if isinstance(node, Join):
            return starts_selected(node.left)
        if isinstance(node, Union):
            return starts_selected(node.left) and starts_selected(node.right)
        return False

    body = plan.child
    return (
        isinstance(body, RecursiveSeeded)
        and isinstance(body.seed, Union)
        and starts_selected(body.seed.left)
        and starts_selected(body.seed.right)
        and "Selection" not in explain(body.base)
    )


def test_criterion_3_moe_plan_structure(report):
    q = parse(MOE)
    t = Semantic.TRAIL
    knows, likes, creator = Scan1("Knows"), Scan1("Likes"), Scan1("HasCreator")
    # the drawing: Union of two separate recursions under the selection
    drawn_basic = Projection(
        t, q.terms, 10,
        Selection(q.condition, Union(Recursive(t, knows), Recursive(t, Join(t, likes, creator)))),
    )
    basic = translate(q)
    optimized = optimize(basic)
    basic_ok = _structure(basic) == _structure(drawn_basic)
    optimized_ok = _seeds_selected(optimized)
    detail = (
        f"basic plan {'matches' if basic_ok else 'differs from'} the drawn Union(Recursive, Recursive) "
        f"(engine builds Recursive(Union(...)), the only form equivalent to the query); "
        f"optimized selection seeds both union branches: {'yes' if optimized_ok else 'no'}"
    )
    report(3, basic_ok and optimized_ok, detail)


# 4 -----------------------------------------------------------------------------


REFERENCE_QUERIES = {
    "Q1": 'MATCH WALK p = (x)-[Knows]->(y) WHERE x.name = "Bart" RETURN y.name',
    "Q2": 'MATCH WALK p = (x)-[Likes]->(y) WHERE y.txt = "Msg1" RETURN x.name',
    "Q3": 'MATCH TRAIL p = (x)-[Knows+]->(y) WHERE x.name = "Moe" AND y.name = "Apu" RETURN p',
    "Q4": 'MATCH TRAIL p = (x)-[(Likes.HasCreator)+]->(y) WHERE x.name = "Moe" AND y.name = "Apu" RETURN p',
}


def test_criterion_4_reference_queries(report):
    results = {}
    for name, text in REFERENCE_QUERIES.items():
        translate(parse(text))
        results[name] = run(text, G)
    q3 = results["Q3"].path_set()
    q4 = results["Q4"].path_set()
    want3 = P("p1", "e0", "p2", "e4", "p4")
    want4 = P("p1", "e1", "m1", "e2", "p2", "e6", "m2", "e7", "p4")
    ok = (
        results["Q1"].rows == [("Apu",)]
        and results["Q2"].rows == [("Moe",)]
        and want3 in q3
        and want4 in q4
        and want4.length == 4
    )
    sizes = ", ".join(f"{k}={len(v)}" for k, v in results.items())
    report(4, ok, f"result sizes {sizes}; Q3 has p1-e0-p2-e4-p4: {want3 in q3}; Q4 has p1-m1-p2-m2-p4: {want4 in q4}")


# 5 -----------------------------------------------------------------------------


def test_criterion_5_sample_output(report):
    result = run(LISA, G)
    lines = format_results(result, G)
    target = P("p3", "e3", "p2", "e4", "p4")
    k = result.paths.index(target) + 1
    expected = f"Path #{k} - p3 e3(Knows) p2 e4(Knows) p4"
    report(5, expected in lines, f"listing contains {expected!r} (k from the pinned order)")


# 6 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_6_relative_performance(report):
    g = synthetic_graph(10_000, seed=0)
    assert len(g.nodes) == 10_000 and len(g.edges) >= 20_000
    cfg = BenchConfig(runs=3, limit=100, timeout_s=120.0)
    losses, lines, slowest = [], [], 0.0
    for pattern in ("A+", "(A.B)+", "(A|B)+"):
        template = next(t for t in catalog() if t.pattern == pattern)
        queries = instantiate(template, g, seed=0)
        bench = run_bench(queries, g, cfg=cfg)
        for q in queries:
            med = {s: bench.median(q.query_id, s) for s in SYSTEMS}
            slowest = max(slowest, max(bench.seconds(q.query_id, "engine")))
            lines.append(f"{q.regex_text} from {q.source}: " + ", ".join(f"{s} {m * 1e3:.2f} ms" for s, m in med.items()))
            if not med["engine"] < min(med["bfs_baseline"], med["dfs_baseline"]):
                losses.append(q.regex_text)
    print("\n".join(lines))
    ok = not losses and slowest <= 10.0
    report(6, ok, f"{len(lines)} queries on {g!r}; engine median lost on {losses}; slowest engine run {slowest:.3f} s")


# 7 -----------------------------------------------------------------------------


def test_criterion_7_invariant_suites(report):
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-m", "invariants", "-p", "no:cacheprovider", str(TESTS)],
        capture_output=True,
        text=True,
        cwd=TESTS.parent,
        env={**os.environ, "PYTHONPATH": str(TESTS)},
    )
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    # plus an exact count of seeded round trips, independent of hypothesis
    rng = random.Random("round-trip")
    asts = [random_regex(rng) for _ in range(1000)]
    broken = [r for r in asts if parse_regex(regex_text(r)) != r]
    ok = proc.returncode == 0 and not broken
    report(7, ok, f"invariant suites: {summary}; seeded round trip: {1000 - len(broken)}/1000")


# 8 -----------------------------------------------------------------------------


def test_criterion_8_workload_accounting(report, tmp_path):
    templates = catalog()
    total = sum(t.count for t in templates)
    out = tmp_path / "report.csv"
    code = bench_main(["--runs", "3", "--limit", "100", "--timeout-s", "120", "--out", str(out)])
    rows = list(csv.DictReader(io.StringIO(out.read_text(encoding="utf-8"))))
    n_queries = len(workload(G, 0))
    ok = (
        code == 0
        and len(templates) == 30
        and total == 166
        and len(rows) == n_queries * 3 * 3
        and {r["system"] for r in rows} == set(SYSTEMS)
    )
    report(
        8,
        ok,
        f"{len(templates)} templates summing to {total}; CSV has {len(rows)} rows = {n_queries} queries x 3 systems x 3 runs",
    )
