"""Causality, concurrency, residuals and trace equivalence.

Two transitions are causally related when one's executed prefix encloses
the other's (structural cause), when either one's key is cited in the
other's cause set (object cause), or when they contend for the same key.
Under the set-indexed-set memory an extra clause applies: consulting a
restriction's extruder index and extending that index do not commute, so
such pairs are related as well.

Concurrent composable transitions can be swapped; swapping plus cancelling
a transition followed by its own undo generate the equivalence on traces
that the consistency checker decides (by bounded search).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .memory import SemanticsKind
from .semantics import (
    BoutA,
    Label,
    TauA,
    Transition,
    backward_steps,
    forward_steps,
)
from .syntax import RProcess, stored_causes, structural_pairs

Trace = Tuple[Transition, ...]


def label_equiv(l1: Label, l2: Label) -> bool:
    """Labels equal up to the extrusion record carried by a bound output."""
    if (l1.key, l1.cause, l1.inst) != (l2.key, l2.cause, l2.inst):
        return False
    a1, a2 = l1.action, l2.action
    if isinstance(a1, BoutA) and isinstance(a2, BoutA):
        return (a1.subj, a1.obj) == (a2.subj, a2.obj)
    return a1 == a2


def is_inverse_pair(t1: Transition, t2: Transition) -> bool:
    """t2 is exactly t1 undone (same label, opposite direction)."""
    return (t1.direction != t2.direction
            and t1.source == t2.target
            and t1.target == t2.source
            and t1.label == t2.label)


def structural_cause_keys(i1: int, i2: int, x: RProcess) -> bool:
    """i2's record sits inside the continuation of the past prefix keyed
    i1 in x."""
    return (i1, i2) in structural_pairs(x)


def structural_cause(t1: Transition, t2: Transition) -> bool:
    """The prefix executed as t1 encloses the one executed as t2, read off
    the terms where both keys are present."""
    i1, i2 = t1.label.key, t2.label.key
    return (structural_cause_keys(i1, i2, t2.target)
            or structural_cause_keys(i2, i1, t1.source))


def _stored(t: Transition) -> FrozenSet:
    """Cause set the step left in (or removed from) its records; for a
    silent step this holds citations the tau label does not show."""
    state = t.target if t.direction == "fwd" else t.source
    return stored_causes(state, t.label.key)


def object_cause(t1: Transition, t2: Transition) -> bool:
    """Either transition's cause set cites the other's key, on the label
    or in the records it touched."""
    if is_inverse_pair(t1, t2):
        return False
    if t1.label.key in t2.label.cause or t2.label.key in t1.label.cause:
        return True
    return t1.label.key in _stored(t2) or t2.label.key in _stored(t1)


def index_conflict(t1: Transition, t2: Transition) -> bool:
    """One transition consulted a restriction's extruder index that the
    other extended (read/write conflict on the index)."""
    return bool(t1.meta.cause_reads & t2.meta.index_writes
                or t1.meta.index_writes & t2.meta.cause_reads)


def redex_conflict(t1: Transition, t2: Transition) -> bool:
    """Composable undo-then-redo of the same prefix occurrence: t2 fires
    (possibly under another key) an occurrence t1 just restored.  Both
    metas locate fired prefixes in the state between the two."""
    return (t1.direction == "bwd" and t2.direction == "fwd"
            and t1.target == t2.source
            and bool(t1.meta.fired & t2.meta.fired))


def causally_related(t1: Transition, t2: Transition,
                     kind: SemanticsKind) -> bool:
    if t1 == t2 or t1.label.key == t2.label.key:
        return True
    if structural_cause(t1, t2) or structural_cause(t2, t1):
        return True
    if object_cause(t1, t2):
        return True
    if redex_conflict(t1, t2) or redex_conflict(t2, t1):
        return True
    if isinstance(t1.label.action, TauA) and isinstance(t2.label.action, TauA):
        if (t1.label.key in t2.meta.close_reads
                or t2.label.key in t1.meta.close_reads):
            # the later close re-erects a restriction whose memory cites
            # the earlier close; the nesting order of the two erected
            # restrictions is observable, so no swap (a visible extrusion
            # cited the same way does commute, its payload is label-only)
            return True
    if kind is SemanticsKind.CVY and index_conflict(t1, t2):
        return True
    if kind is SemanticsKind.BS:
        # two movers of the same first-extruder register do not commute:
        # whichever goes first decides what the other reads
        if t1.meta.reg_writes & t2.meta.reg_writes:
            return True
        if t1.direction != t2.direction:
            # seating or unseating the register is order-sensitive
            # against any access to the same record
            touches1 = t1.meta.index_writes | t1.meta.cause_reads
            touches2 = t2.meta.index_writes | t2.meta.cause_reads
            if (t1.meta.reg_writes & touches2) or (t2.meta.reg_writes & touches1):
                return True
    return False


def concurrent(t1: Transition, t2: Transition, kind: SemanticsKind) -> bool:
    return not causally_related(t1, t2, kind)


@dataclass(frozen=True)
class CausalVerdict:
    structural: bool
    object: bool
    related: bool
    concurrent: bool


def verdict(t1: Transition, t2: Transition, kind: SemanticsKind) -> CausalVerdict:
    related = causally_related(t1, t2, kind)
    return CausalVerdict(
        structural=structural_cause(t1, t2) or structural_cause(t2, t1),
        object=object_cause(t1, t2),
        related=related,
        concurrent=not related,
    )


# ----------------------------------------------------------------- residuals


def transitions_like(state: RProcess, t: Transition,
                     kind: SemanticsKind) -> List[Transition]:
    """Transitions of `state` in t's direction wearing an equivalent label."""
    if t.direction == "fwd":
        cands = forward_steps(state, kind, key=t.label.key)
    else:
        cands = [b for b in backward_steps(state, kind)
                 if b.label.key == t.label.key]
    return [c for c in cands if label_equiv(c.label, t.label)]


def find_square(t1: Transition, t2: Transition,
                kind: SemanticsKind) -> Optional[Tuple[Transition, Transition]]:
    """For composable t1: X -> Y, t2: Y -> Z, search the commuted pair
    t2': X -> Y1, t1': Y1 -> Z with equivalent labels."""
    for t2p in transitions_like(t1.source, t2, kind):
        for t1p in transitions_like(t2p.target, t1, kind):
            if t1p.target == t2.target:
                return (t2p, t1p)
    return None


def residual(t2: Transition, t1: Transition, kind: SemanticsKind) -> Transition:
    """The step t2 taken before t1 instead of after it: for t1: X -> Y and
    t2: Y -> Z concurrent, the transition t2': X -> Y1 of the commuting
    square."""
    if causally_related(t1, t2, kind):
        raise ValueError("not concurrent")
    sq = find_square(t1, t2, kind)
    if sq is None:
        raise ValueError("no commuting square")
    return sq[0]


# ------------------------------------------------------------ trace algebra


def compose_ok(trace: Sequence[Transition]) -> bool:
    return all(trace[i].target == trace[i + 1].source
               for i in range(len(trace) - 1))


def _swaps(trace: Trace, i: int, kind: SemanticsKind) -> List[Trace]:
    u, v = trace[i], trace[i + 1]
    if causally_related(u, v, kind):
        return []
    out = []
    sq = find_square(u, v, kind)
    if sq:
        v2, u2 = sq
        out.append(trace[:i] + (v2, u2) + trace[i + 2:])
    return out


def _cancels(trace: Trace, i: int) -> List[Trace]:
    if is_inverse_pair(trace[i], trace[i + 1]):
        return [trace[:i] + trace[i + 2:]]
    return []


def traces_equivalent(tr1: Sequence[Transition], tr2: Sequence[Transition],
                      kind: SemanticsKind, max_steps: int = 8,
                      max_states: int = 100_000) -> Optional[bool]:
    """Decide equivalence up to swapping concurrent neighbours and
    cancelling undo pairs.  Swaps preserve length and cancellations only
    shrink, so both traces are rewritten breadth-first and they are
    equivalent exactly when the two closures meet.  Returns None when the
    budget runs out before an answer."""
    seen1: Set[Trace] = {tuple(tr1)}
    seen2: Set[Trace] = {tuple(tr2)}
    frontiers = [list(seen1), list(seen2)]
    for _ in range(max_steps):
        if seen1 & seen2:
            return True
        if not frontiers[0] and not frontiers[1]:
            return False
        for seen, k in ((seen1, 0), (seen2, 1)):
            nxt: List[Trace] = []
            for tr in frontiers[k]:
                for i in range(len(tr) - 1):
                    for cand in _swaps(tr, i, kind) + _cancels(tr, i):
                        if cand not in seen:
                            seen.add(cand)
                            nxt.append(cand)
                            if len(seen) > max_states:
                                return None
            frontiers[k] = nxt
    if seen1 & seen2:
        return True
    return False if not frontiers[0] and not frontiers[1] else None


# -------------------------------------------------- causality over a trace


def direct_causal_pairs(trace: Sequence[Transition],
                        kind: SemanticsKind) -> Set[Tuple[int, int]]:
    """Pairs (a, b) of trace positions where a directly causes b."""
    out: Set[Tuple[int, int]] = set()
    n = len(trace)
    for a, b in product(range(n), repeat=2):
        if a == b:
            continue
        t1, t2 = trace[a], trace[b]
        if structural_cause(t1, t2) and a < b:
            out.add((a, b))
        if t1.label.key in t2.label.cause and not is_inverse_pair(t1, t2):
            out.add((a, b) if a < b else (b, a))
        if a < b and redex_conflict(t1, t2):
            out.add((a, b))
        if kind is SemanticsKind.CVY and a < b and index_conflict(t1, t2):
            out.add((a, b))
    return out


def causal_order(trace: Sequence[Transition],
                 kind: SemanticsKind) -> Set[Tuple[int, int]]:
    """Transitive closure of the direct pairs."""
    edges = direct_causal_pairs(trace, kind)
    succ: Dict[int, Set[int]] = {}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)
    closed: Set[Tuple[int, int]] = set()
    for a in range(len(trace)):
        stack = list(succ.get(a, ()))
        seen: Set[int] = set()
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            closed.add((a, b))
            stack.extend(succ.get(b, ()))
    return closed


def causality_edges(trace: Sequence[Transition],
                    kind: SemanticsKind) -> List[dict]:
    """Typed edge list for presentation: which earlier step each later
    step depends on, and through what mechanism."""
    out = []
    n = len(trace)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            t1, t2 = trace[a], trace[b]
            if a < b and structural_cause(t1, t2):
                out.append({"from": a, "to": b, "type": "structural"})
            if t1.label.key in t2.label.cause and not is_inverse_pair(t1, t2):
                out.append({"from": min(a, b), "to": max(a, b), "type": "object"})
            if a < b and redex_conflict(t1, t2):
                out.append({"from": a, "to": b, "type": "redex"})
            if (kind is SemanticsKind.CVY and a < b
                    and index_conflict(t1, t2)):
                out.append({"from": a, "to": b, "type": "index"})
    dedup = []
    seen = set()
    for e in out:
        k = (e["from"], e["to"], e["type"])
        if k not in seen:
            seen.add(k)
            dedup.append(e)
    return dedup
