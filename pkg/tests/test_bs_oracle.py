"""Cause-set oracle: causal-term steps, the key dependency graph, key
removal, and the two correspondence checkers."""

from typing import List, Set, Tuple

import pytest

import revpi.bs_oracle as bso
from revpi.bs_oracle import (
    AnnotatedTransition,
    CPar,
    CRes,
    Cause,
    DependencyGraph,
    KeyedLabel,
    Plain,
    SilentLabel,
    annotate,
    bs_steps,
    build_dependency_graph,
    causal,
    check_causal_correspondence,
    check_structural_correspondence,
    gamma,
    graph_to_text,
    k_f,
    k_f_of,
    lam,
    rem,
)
from revpi.memory import STAR, SemanticsKind
from revpi.pi_oracle import BoundOutput, FreeOutput, Input
from revpi.semantics import Label, OutA, TauA, Transition, forward_steps
from revpi.syntax import Name, Nil, Out, Par, New, lift, parse

BS = SemanticsKind.BS


def start(src: str):
    return lift(parse(src), BS)


def fire(state, pred):
    steps = [t for t in forward_steps(state, BS) if pred(t)]
    assert len(steps) == 1, [str(t.label) for t in steps]
    return steps[0]


def run(src: str, preds) -> List[Transition]:
    state = start(src)
    trace = []
    for pred in preds:
        t = fire(state, pred)
        trace.append(t)
        state = t.target
    return trace


def subj(s):
    return lambda t: f"{s}<" in str(t.label) or f"{s}(" in str(t.label)


def tau(t):
    return isinstance(t.label.action, TauA)


# ------------------------------------------------- brute-force rem oracle


def brute_rem(g: DependencyGraph, i) -> frozenset:
    """Enumerate every simple path ending at key i, take the vertices they
    visit, contract same-key pairs joined both ways, drop i."""
    targets = [v for v in g.vertices if v[0] == i]
    assert len(targets) == 1
    on_paths: Set[Tuple[int, int]] = {targets[0]}

    def extend(path):
        head = path[0]
        for (u, v) in g.edges:
            if v == head and u not in path:
                on_paths.update(path)
                on_paths.add(u)
                extend([u] + path)

    extend([targets[0]])
    contracted = set()
    for (k, c) in on_paths:
        pair = {(k, 0), (k, 1)}
        if (pair <= on_paths and ((k, 0), (k, 1)) in g.edges
                and ((k, 1), (k, 0)) in g.edges):
            contracted.add(k)
    return frozenset(k for (k, _) in on_paths
                     if k not in contracted and k != i)


CHAIN = DependencyGraph(
    vertices=frozenset({(5, 0), (3, 0), (3, 1), (7, 0)}),
    edges=frozenset({((5, 0), (3, 0)), ((3, 0), (3, 1)), ((3, 1), (3, 0)),
                     ((3, 1), (7, 0))}))

PAIR_ONLY = DependencyGraph(
    vertices=frozenset({(3, 0), (3, 1), (7, 0)}),
    edges=frozenset({((3, 0), (3, 1)), ((3, 1), (3, 0)),
                     ((3, 0), (7, 0)), ((3, 1), (7, 0))}))

NO_PAIRS = DependencyGraph(
    vertices=frozenset({(1, 0), (2, 0), (4, 0)}),
    edges=frozenset({((1, 0), (2, 0)), ((2, 0), (4, 0)), ((1, 0), (4, 0))}))


def test_rem_no_contraction_is_kf_as_set():
    assert rem(NO_PAIRS, 4) == frozenset({1, 2})
    assert set(k_f(NO_PAIRS, 4)) == {1, 2}
    assert rem(NO_PAIRS, 4) == brute_rem(NO_PAIRS, 4)


def test_rem_single_pair_contracts_to_nothing():
    assert rem(PAIR_ONLY, 7) == frozenset()
    assert k_f(PAIR_ONLY, 7) == (3, 3)
    assert rem(PAIR_ONLY, 7) == brute_rem(PAIR_ONLY, 7)


def test_rem_chain_through_pair_keeps_head():
    assert rem(CHAIN, 7) == frozenset({5})
    assert k_f(CHAIN, 7) == (3, 3, 5)
    assert rem(CHAIN, 7) == brute_rem(CHAIN, 7)


def test_rem_requires_unique_record():
    with pytest.raises(ValueError):
        rem(CHAIN, 3)


def test_rem_matches_brute_force_on_engine_graphs():
    sources = ["new a.(b<a> | c<a> | a(z))", "b<a>.c<e> | b(x).x(y)",
               "new a.(b<a>.c<a>) | b(x)", "k<m>.(new a.(b<a>.d<a>)) | b(x)"]
    checked = 0
    for src in sources:
        stack = [(start(src), 0)]
        while stack:
            state, depth = stack.pop()
            g = build_dependency_graph(state)
            for (k, copies) in {k: c for (k, c) in g.vertices}.items():
                if sum(1 for v in g.vertices if v[0] == k) == 1:
                    assert rem(g, k) == brute_rem(g, k)
                    checked += 1
            if depth < 3:
                stack.extend((t.target, depth + 1)
                             for t in forward_steps(state, BS))
    assert checked > 30


# ------------------------------------------------------- dependency graph


def test_independent_outputs_give_isolated_vertices():
    trace = run("b<a> | c<e>", [subj("b"), subj("c")])
    g = build_dependency_graph(trace)
    assert g.vertices == frozenset({(0, 0), (1, 0)})
    assert g.edges == frozenset()


def test_sequence_gives_one_edge():
    trace = run("b<a>.c<e>", [subj("b"), subj("c")])
    g = build_dependency_graph(trace[-1].target)
    assert g.vertices == frozenset({(0, 0), (1, 0)})
    assert g.edges == frozenset({((0, 0), (1, 0))})


def test_tau_doubles_the_key_with_mutual_edges():
    trace = run("b<a>.c<e> | b(x)", [tau, subj("c")])
    g = build_dependency_graph(trace)
    assert g.vertices == frozenset({(0, 0), (0, 1), (1, 0)})
    assert ((0, 0), (0, 1)) in g.edges and ((0, 1), (0, 0)) in g.edges
    assert ((0, 0), (1, 0)) in g.edges
    assert k_f(g, 1) == (0, 0)
    assert rem(g, 1) == frozenset()


def test_extrusion_citations_become_edges():
    trace = run("new a.(b<a> | c<a> | a(z))",
                [subj("b"), subj("c"), lambda t: "(z)" in str(t.label)])
    g = build_dependency_graph(trace)
    assert ((0, 0), (1, 0)) in g.edges
    assert ((0, 0), (2, 0)) in g.edges
    assert rem(g, 1) == frozenset({0})
    assert rem(g, 2) == frozenset({0})


def test_empty_trace_gives_empty_graph():
    g = build_dependency_graph([])
    assert g.vertices == frozenset() and g.edges == frozenset()


def test_graph_to_text_lists_vertices_and_edges():
    text = graph_to_text(PAIR_ONLY)
    assert "vertex 3#0" in text and "vertex 3#1" in text
    assert "3#0 -> 3#1" in text and "3#1 -> 7#0" in text


def test_rem_monotone_under_trace_extension():
    trace = run("new a.(b<a> | c<a> | a(z))",
                [subj("b"), subj("c"), lambda t: "(z)" in str(t.label)])
    values = [rem(build_dependency_graph(trace[:n]), 0)
              for n in range(1, len(trace) + 1)]
    assert values == [frozenset()] * 3
    values = [rem(build_dependency_graph(trace[:n]), 1) for n in (2, 3)]
    assert values == [frozenset({0})] * 2


def test_tau_free_rem_is_set_reduction_of_kf():
    trace = run("new a.(b<a> | c<a> | a(z))",
                [subj("b"), subj("c"), lambda t: "(z)" in str(t.label)])
    g = build_dependency_graph(trace)
    for t in trace:
        assert rem(g, t.label.key) == frozenset(k_f(g, t.label.key))


def test_annotate_carries_cause_multisets():
    trace = run("b<a>.c<e> | b(x)", [tau, subj("c")])
    ann = annotate(trace)
    assert [a.causes for a in ann] == [None, (0, 0)]
    assert all(isinstance(a, AnnotatedTransition) for a in ann)
    assert k_f_of(trace[0]) is None


# ------------------------------------------------------------ causal terms


def test_causal_normalizes_composites():
    a = causal(parse("new a.(b<a> | 0)"))
    assert isinstance(a, CRes) and isinstance(a.body, CPar)
    with pytest.raises(ValueError):
        Plain(parse("b<a> | 0"))


def test_lam_erases_wrappers():
    inner = Cause(frozenset({4}), Plain(Out(Name("b"), Name("a"), Nil())))
    term = CRes("a", CPar(inner, Plain(Nil())))
    assert lam(term) == New("a", Par(Out(Name("b"), Name("a"), Nil()), Nil()))


def test_prefix_fires_with_empty_causes_then_exposes_key():
    a = causal(parse("b<a>.c<e>"))
    [(kb1, z1, a1)] = bs_steps(a, 0)
    assert kb1 == frozenset() and z1 == KeyedLabel(0, FreeOutput("b", "a"))
    [(kb2, z2, a2)] = bs_steps(a1, 1)
    assert kb2 == frozenset({0})
    assert z2 == KeyedLabel(1, FreeOutput("c", "e"))
    assert a2 == Cause(frozenset({0}),
                       Cause(frozenset({1}), Plain(Nil())))


def test_open_drops_restriction_and_maps_to_bound_output():
    a = causal(parse("new a.b<a>"))
    [(kb, z, a2)] = bs_steps(a, 0)
    assert kb == frozenset()
    assert z == KeyedLabel(0, BoundOutput("b", "a"))
    assert a2 == Cause(frozenset({0}), Plain(Nil()))


def test_restriction_blocks_private_subjects():
    assert bs_steps(causal(parse("new a.a<b>")), 0) == []
    assert bs_steps(causal(parse("new a.a(z)")), 0) == []


def test_tau_merges_cause_sets_into_both_residuals():
    a = causal(parse("k<m>.b<a> | j<n>.b(x)"))
    (_, _, a1) = next(s for s in bs_steps(a, 0)
                      if s[1] == KeyedLabel(0, FreeOutput("k", "m")))
    (_, _, a2) = next(s for s in bs_steps(a1, 1)
                      if s[1] == KeyedLabel(1, FreeOutput("j", "n")))
    [(kb, z, a3)] = [s for s in bs_steps(a2, 2)
                     if isinstance(s[1], SilentLabel)]
    assert kb == frozenset()
    merged = frozenset({0, 1})
    assert a3 == CPar(
        Cause(frozenset({0}), Cause(merged, Plain(Nil()))),
        Cause(frozenset({1}), Cause(merged, Plain(Nil()))))


def test_communication_substitutes_received_name():
    a = causal(parse("b<a> | b(x).x<c>"))
    [(kb, z, a2)] = [s for s in bs_steps(a, 0)
                     if isinstance(s[1], SilentLabel)]
    assert lam(a2) == parse("0 | a<c>")


def test_close_reerects_restriction():
    a = causal(parse("new a.(b<a>.c<a>) | b(x)"))
    [(_, z, a2)] = [s for s in bs_steps(a, 0)
                    if isinstance(s[1], SilentLabel)]
    assert isinstance(a2, CRes) and a2.name == "a"
    assert lam(a2) == New("a", parse("c<a> | 0"))


def test_bound_output_blocked_by_free_occurrence_in_sibling():
    a = causal(parse("new a.b<a> | a<c>"))
    labels = [z for (_, z, _) in bs_steps(a, 0)]
    assert labels == [KeyedLabel(0, FreeOutput("a", "c"))]


# ------------------------------------------------------------------ gamma


def test_gamma_keeps_key_and_drops_cause_and_instantiator():
    l = Label(2, frozenset({5, STAR}), STAR, OutA("b", Name("a")))
    assert gamma(l) == KeyedLabel(2, FreeOutput("b", "a"))


def test_gamma_tau_is_silent():
    trace = run("b<a> | b(x)", [tau])
    assert gamma(trace[0].label) == SilentLabel()


def test_gamma_bound_output_by_record_emptiness():
    trace = run("new a.(b<a> | c<a>)", [subj("b"), subj("c")])
    assert gamma(trace[0].label) == KeyedLabel(0, BoundOutput("b", "a"))
    assert gamma(trace[1].label) == KeyedLabel(1, FreeOutput("c", "a"))


# ------------------------------------------------------------ correspondence


CORPUS = [
    "b<a>.c<e>",
    "b<a> | b(x).x<c>",
    "b<a>.c<e> | b(x).x(y)",
    "new a.(b<a> | c<a> | a(z))",
    "new a.(b<a>.c<a>) | b(x)",
    "new a.(b<a>.(d<a> | f<a>)) | b(x)",
    "new a.(new b.(c<b> | d<a> | b<a>))",
    "b(x).x<e> | b<a>.a(z)",
]


@pytest.mark.parametrize("src", CORPUS)
def test_structural_correspondence_on_corpus(src):
    v = check_structural_correspondence(parse(src), depth=3)
    assert v.ok and not v.exhausted, str(v)


@pytest.mark.parametrize("src", CORPUS)
def test_causal_correspondence_on_corpus(src):
    v = check_causal_correspondence(parse(src), depth=3)
    assert v.ok and not v.exhausted, str(v)


def test_second_extruder_cause_set_is_first_key():
    trace = run("new a.(b<a> | c<a> | a(z))", [subj("b"), subj("c")])
    g = build_dependency_graph(trace)
    assert rem(g, trace[1].label.key) == frozenset({trace[0].label.key})
    assert check_structural_correspondence(
        parse("new a.(b<a> | c<a> | a(z))"), depth=3).ok


def test_double_extrusion_third_action_depends_on_both():
    trace = run("new a.(new b.(c<b> | d<a> | b<a>))",
                [subj("c"), subj("d"),
                 lambda t: str(t.label).startswith("(2")])
    g = build_dependency_graph(trace)
    assert rem(g, trace[2].label.key) == frozenset({0, 1})


def test_mutated_rem_breaks_tau_traces(monkeypatch):
    def no_contraction(g, i):
        return frozenset(k for (k, _) in bso._into(g, i)) - {i}

    monkeypatch.setattr(bso, "rem", no_contraction)
    v = check_structural_correspondence(parse("b<a>.c<e> | b(x).x(y)"),
                                        depth=3)
    assert not v.ok
    assert "unmatched" in str(v)


def test_budget_exhaustion_is_reported_distinctly():
    v = check_structural_correspondence(parse("b<a> | b(x).x<c>"),
                                        depth=3, max_states=1)
    assert v.ok and v.exhausted
    assert "budget" in str(v)


def test_structural_mismatch_reports_detail(monkeypatch):
    monkeypatch.setattr(bso, "forward_steps", lambda x, kind: [])
    v = check_structural_correspondence(parse("b<a>"), depth=2)
    assert not v.ok and "unmatched" in v.detail
