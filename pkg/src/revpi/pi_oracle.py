"""A plain late pi-calculus transition system, used as ground truth.

The reversible engine, with its keys, causes and memories forgotten (the
erase functions in syntax), must behave exactly like the ordinary calculus
going forward.  This module derives ordinary transitions independently of
the engine so the two can be played against each other.

No alpha-conversion is performed: source terms are expected to keep bound
names distinct from other names in scope (the corpus does), which makes
the side conditions below equivalent to the textbook ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Set, Tuple, Union

from .memory import SemanticsKind
from .semantics import (
    BoutA,
    InA,
    Label,
    OutA,
    TauA,
    forward_steps,
)
from .syntax import (
    In,
    Name,
    New,
    Nil,
    Out,
    Par,
    Process,
    RProcess,
    erase,
    free_names,
    substitute,
)


@dataclass(frozen=True)
class FreeOutput:
    subj: str
    obj: str

    def __str__(self) -> str:
        return f"{self.subj}<{self.obj}>"


@dataclass(frozen=True)
class Input:
    subj: str
    var: str

    def __str__(self) -> str:
        return f"{self.subj}({self.var})"


@dataclass(frozen=True)
class BoundOutput:
    subj: str
    obj: str

    def __str__(self) -> str:
        return f"{self.subj}<new {self.obj}>"


@dataclass(frozen=True)
class Tau:
    def __str__(self) -> str:
        return "tau"


PiLabel = Union[FreeOutput, Input, BoundOutput, Tau]


def _label_names(l: PiLabel) -> FrozenSet[str]:
    match l:
        case FreeOutput(s, o) | BoundOutput(s, o):
            return frozenset({s, o})
        case Input(s, _):
            return frozenset({s})
        case Tau():
            return frozenset()
    raise TypeError(l)


def _bound_name(l: PiLabel) -> Optional[str]:
    match l:
        case BoundOutput(_, o):
            return o
        case Input(_, v):
            return v
    return None


PiStep = Tuple[PiLabel, Process]


def _syncs(send: PiStep, recv: PiStep, send_left: bool) -> List[PiStep]:
    """Communication between a sending and a receiving premise."""
    ls, ps = send
    lr, pr = recv
    if not isinstance(lr, Input):
        return []
    if isinstance(ls, FreeOutput) and ls.subj == lr.subj:
        pr = substitute(pr, lr.var, Name(ls.obj))
        return [(Tau(), Par(ps, pr) if send_left else Par(pr, ps))]
    if isinstance(ls, BoundOutput) and ls.subj == lr.subj:
        # scope closes around both residuals
        if ls.obj in free_names(pr) - {lr.var}:
            return []
        pr = substitute(pr, lr.var, Name(ls.obj))
        pair = Par(ps, pr) if send_left else Par(pr, ps)
        return [(Tau(), New(ls.obj, pair))]
    return []


def pi_steps(p: Process) -> List[PiStep]:
    """All late-semantics transitions of p."""
    match p:
        case Nil():
            return []
        case Out(b, a, cont):
            return [(FreeOutput(b.base, a.base), cont)]
        case In(b, x, cont):
            return [(Input(b.base, x), cont)]
        case Par(left, right):
            ls = pi_steps(left)
            rs = pi_steps(right)
            out: List[PiStep] = []
            for (l, t) in ls:
                bn = _bound_name(l)
                if bn is not None and bn in free_names(right):
                    continue
                out.append((l, Par(t, right)))
            for (l, t) in rs:
                bn = _bound_name(l)
                if bn is not None and bn in free_names(left):
                    continue
                out.append((l, Par(left, t)))
            for srec in ls:
                for rrec in rs:
                    out += _syncs(srec, rrec, True)
                    out += _syncs(rrec, srec, False)
            return out
        case New(a, body):
            out = []
            for (l, t) in pi_steps(body):
                if a not in _label_names(l):
                    out.append((l, New(a, t)))
                elif isinstance(l, FreeOutput) and l.obj == a and l.subj != a:
                    # the restriction opens and moves into the label
                    out.append((BoundOutput(l.subj, a), t))
            return out
    raise TypeError(p)


def erase_label(l: Label) -> PiLabel:
    """The ordinary label of a forward framework transition.  An extrusion
    whose restriction had already leaked (nonempty record before this
    step) erases to a free output: the erased source term has no binder
    left for the label to carry."""
    a = l.action
    match a:
        case OutA(subj, obj):
            return FreeOutput(subj, obj.base)
        case InA(subj, var):
            return Input(subj, var)
        case BoutA(subj, obj, mem):
            if mem.empty:
                return BoundOutput(subj, obj)
            return FreeOutput(subj, obj)
        case TauA():
            return Tau()
    raise TypeError(a)


@dataclass(frozen=True)
class BisimVerdict:
    ok: bool
    state: Optional[RProcess] = None
    missing: FrozenSet[PiStep] = frozenset()
    extra: FrozenSet[PiStep] = frozenset()

    def __str__(self) -> str:
        if self.ok:
            return "bisimilar"
        return (f"mismatch at {self.state}: engine lacks {set(self.missing)},"
                f" engine adds {set(self.extra)}")


def check_forward_bisim(x: RProcess, kind: SemanticsKind,
                        depth: int = 5, max_states: int = 50_000) -> BisimVerdict:
    """Play the forward game between x and its erasure, breadth-first to
    the given depth: at every reachable state the erased successor set of
    the engine must equal the oracle's successor set of the erased state."""
    seen: Set[RProcess] = set()
    frontier = [x]
    for _ in range(depth):
        nxt: List[RProcess] = []
        for state in frontier:
            if state in seen:
                continue
            seen.add(state)
            if len(seen) > max_states:
                return BisimVerdict(True)
            fw = forward_steps(state, kind)
            engine = frozenset((erase_label(t.label), erase(t.target))
                               for t in fw)
            oracle = frozenset(pi_steps(erase(state)))
            if engine != oracle:
                return BisimVerdict(False, state,
                                    missing=oracle - engine,
                                    extra=engine - oracle)
            nxt += [t.target for t in fw if t.target not in seen]
        if not nxt:
            break
        frontier = nxt
    return BisimVerdict(True)
