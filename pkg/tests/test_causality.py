"""Concurrency diagnosis, commuting squares and trace equivalence."""

import pytest

from revpi.causality import (
    residual,
    verdict,
    causality_edges,
    causal_order,
    causally_related,
    concurrent,
    direct_causal_pairs,
    find_square,
    is_inverse_pair,
    label_equiv,
    object_cause,
    redex_conflict,
    structural_cause,
    traces_equivalent,
    transitions_like,
)
from revpi.memory import STAR, Memory, SemanticsKind, init as init_memory
from revpi.semantics import (
    BoutA,
    InA,
    Label,
    OutA,
    TauA,
    backward_steps,
    forward_steps,
)
from revpi.syntax import Name, lift, parse

RPI, BS, CVY = SemanticsKind.RPI, SemanticsKind.BS, SemanticsKind.CVY
S = frozenset({STAR})

COMM = "b<a> | b(x).x<c>"
EXTR = "new a.(b<a> | c<a> | a(z))"


def start(src, kind):
    return lift(parse(src), kind)


def fire(x, kind, pred, key=None):
    picked = [t for t in forward_steps(x, kind, key) if pred(t)]
    assert len(picked) == 1, picked
    return picked[0]


def undo(x, kind, key):
    picked = [t for t in backward_steps(x, kind) if t.label.key == key]
    assert len(picked) == 1, picked
    return picked[0]


def is_out(t):
    return isinstance(t.label.action, OutA)


def sends(subj):
    return lambda t: isinstance(t.label.action, OutA) and t.label.action.subj == subj


def is_in(t):
    return isinstance(t.label.action, InA)


def is_tau(t):
    return isinstance(t.label.action, TauA)


def opens(subj):
    return lambda t: (isinstance(t.label.action, BoutA)
                      and t.label.action.subj == subj)


def test_label_equiv_ignores_extrusion_record():
    l1 = Label(1, S, STAR, BoutA("b", "a", init_memory(RPI)))
    l2 = Label(1, S, STAR, BoutA("b", "a", Memory(RPI, frozenset({0}))))
    assert label_equiv(l1, l2)
    assert not label_equiv(l1, Label(2, S, STAR, l1.action))
    assert not label_equiv(l1, Label(1, S, STAR, OutA("b", Name("a"))))


def test_structural_cause_from_prefix_nesting():
    x = start(COMM, RPI)
    t_in = fire(x, RPI, is_in)
    t_cont = fire(t_in.target, RPI, sends("x"))
    assert t_cont.label.action == OutA("x", Name("c"))
    assert structural_cause(t_in, t_cont)
    assert not structural_cause(t_cont, t_in)
    assert causally_related(t_in, t_cont, RPI)
    assert find_square(t_in, t_cont, RPI) is None


def test_parallel_prefixes_commute():
    x = start(COMM, RPI)
    t_out = fire(x, RPI, is_out)
    t_in = fire(t_out.target, RPI, is_in)
    assert concurrent(t_out, t_in, RPI)
    sq = find_square(t_out, t_in, RPI)
    assert sq is not None
    t_in2, t_out2 = sq
    assert label_equiv(t_in2.label, t_in.label)
    assert label_equiv(t_out2.label, t_out.label)
    assert t_in2.source == x and t_out2.target == t_in.target


def test_undo_then_refire_is_a_conflict():
    x = start(COMM, RPI)
    t_out = fire(x, RPI, is_out)
    y = fire(t_out.target, RPI, is_in).target
    back = undo(y, RPI, 0)
    refire = fire(back.target, RPI, sends("b"))
    assert refire.label.key == 2
    assert redex_conflict(back, refire)
    assert causally_related(back, refire, RPI)
    assert find_square(back, refire, RPI) is None
    unlocked = fire(back.target, RPI, sends("x"))
    assert not redex_conflict(back, unlocked)
    assert concurrent(back, unlocked, RPI)
    assert find_square(back, unlocked, RPI) is not None


def test_inverse_pair_is_not_concurrent():
    x = start(COMM, RPI)
    t = fire(x, RPI, is_tau)
    trev = undo(t.target, RPI, 0)
    assert is_inverse_pair(t, trev)
    assert not is_inverse_pair(t, t)
    assert not object_cause(t, trev)
    assert causally_related(t, trev, RPI)


def test_tau_records_both_fired_components():
    x = start(COMM, RPI)
    t = fire(x, RPI, is_tau)
    assert t.meta.fired == frozenset({("L",), ("R",)})
    trev = undo(t.target, RPI, 0)
    assert trev.meta.fired == frozenset({("L",), ("R",)})


def test_bs_extrusions_are_object_related():
    x = start(EXTR, BS)
    tb = fire(x, BS, opens("b"))
    tc = fire(tb.target, BS, opens("c"))
    assert tc.label.cause == frozenset({STAR, 0})
    assert object_cause(tb, tc)
    assert causally_related(tb, tc, BS)


@pytest.mark.parametrize("kind", [RPI, CVY])
def test_extrusions_commute_without_citation(kind):
    x = start(EXTR, kind)
    tb = fire(x, kind, opens("b"))
    tc = fire(tb.target, kind, opens("c"))
    assert tc.label.cause == S
    assert concurrent(tb, tc, kind)
    sq = find_square(tb, tc, kind)
    assert sq is not None
    tc2, tb2 = sq
    assert tc2.source == x and tb2.target == tc.target


def test_cvy_cause_lookup_conflicts_with_later_extrusion():
    x = start(EXTR, CVY)
    tb = fire(x, CVY, opens("b"))
    tin = fire(tb.target, CVY, is_in)
    tc = fire(tin.target, CVY, opens("c"))
    assert causally_related(tin, tc, CVY)
    assert not object_cause(tin, tc)
    assert find_square(tin, tc, CVY) is None


def test_bs_cause_lookup_commutes_with_later_extrusion():
    x = start(EXTR, BS)
    tb = fire(x, BS, opens("b"))
    tin = fire(tb.target, BS, is_in)
    tc = fire(tin.target, BS, opens("c"))
    assert concurrent(tin, tc, BS)
    assert find_square(tin, tc, BS) is not None


def test_bs_register_reset_conflicts_with_fresh_extrusion():
    x0 = start(EXTR, BS)
    tb = fire(x0, BS, opens("b"))
    back = undo(tb.target, BS, 0)
    assert back.meta.reg_writes == frozenset({"a"})
    tc = fire(back.target, BS, opens("c"), key=1)
    assert tc.meta.reg_writes == frozenset({"a"})
    assert causally_related(back, tc, BS)
    assert find_square(back, tc, BS) is None


def test_rpi_extrusion_undo_commutes_with_fresh_extrusion():
    x0 = start(EXTR, RPI)
    tb = fire(x0, RPI, opens("b"))
    back = undo(tb.target, RPI, 0)
    tc = fire(back.target, RPI, opens("c"), key=1)
    assert concurrent(back, tc, RPI)
    sq = find_square(back, tc, RPI)
    assert sq is not None
    tc2, back2 = sq
    assert tc2.source == tb.target and back2.target == tc.target


def test_trace_equivalence_by_swapping():
    x = start(EXTR, RPI)
    tb = fire(x, RPI, opens("b"))
    tc = fire(tb.target, RPI, opens("c"))
    swapped_first = fire(x, RPI, opens("c"), key=1)
    swapped_second = fire(swapped_first.target, RPI, opens("b"), key=0)
    assert swapped_second.target == tc.target
    assert traces_equivalent([tb, tc], [swapped_first, swapped_second], RPI)
    canon_first = fire(x, RPI, opens("c"))
    canon_second = fire(canon_first.target, RPI, opens("b"))
    assert canon_first.label.key == 0
    assert traces_equivalent([tb, tc], [canon_first, canon_second], RPI) is False


def test_trace_equivalence_by_cancelling():
    x = start(COMM, RPI)
    t = fire(x, RPI, is_tau)
    trev = undo(t.target, RPI, 0)
    assert traces_equivalent([t, trev], [], RPI)
    assert traces_equivalent([t], [], RPI) is False


def test_causal_order_over_a_run():
    x = start(EXTR, CVY)
    tb = fire(x, CVY, opens("b"))
    tin = fire(tb.target, CVY, is_in)
    tc = fire(tin.target, CVY, opens("c"))
    trace = [tb, tin, tc]
    assert direct_causal_pairs(trace, CVY) == {(0, 1), (1, 2)}
    assert causal_order(trace, CVY) == {(0, 1), (1, 2), (0, 2)}
    edges = causality_edges(trace, CVY)
    assert {"from": 0, "to": 1, "type": "object"} in edges
    assert {"from": 1, "to": 2, "type": "index"} in edges


def test_residual_commutes_forward_then_backward():
    x = start(EXTR, RPI)
    tb = fire(x, RPI, opens("b"))
    tc = fire(tb.target, RPI, opens("c"))
    back = undo(tc.target, RPI, 0)
    assert concurrent(tc, back, RPI)
    r = residual(back, tc, RPI)
    assert r.source == tb.target and r.label.key == 0
    tin = fire(tb.target, RPI,
               lambda t: isinstance(t.label.action, InA)
               and t.label.cause == frozenset({0}))
    with pytest.raises(ValueError, match="not concurrent"):
        residual(tin, tb, RPI)


def test_verdict_fields():
    x = start(EXTR, BS)
    tb = fire(x, BS, opens("b"))
    tc = fire(tb.target, BS, opens("c"))
    v = verdict(tb, tc, BS)
    assert v.object and v.related and not v.structural and not v.concurrent


def test_transitions_like_matches_modulo_record():
    x = start(EXTR, RPI)
    tb = fire(x, RPI, opens("b"))
    tc = fire(tb.target, RPI, opens("c"))
    alike = transitions_like(x, tc, RPI)
    assert len(alike) == 1
    assert alike[0].label.action.mem == init_memory(RPI)
