"""The labelled transition system.

Forward transitions execute prefixes, leaving them in the term decorated
with a fresh key and the cause set the label carried when it left the term.
Backward transitions re-emit the recorded label and restore the prefix.
The handling of restricted names is delegated to the memory structure: a
label crossing new a{m} with a as subject asks the memory which past
extrusions to cite (cause lookup), with a as object records itself in the
memory (extrusion).

Labels are (key, cause, inst): action.  The inst component is the key of
the input that instantiated the action's subject, or *.  A synchronisation
always carries ((i, {*}, *): tau).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import FrozenSet, List, Optional, Tuple, Union

from .memory import (
    STAR,
    Key,
    KeyStar,
    Memory,
    SemanticsKind,
    cause_candidates,
    format_keyset,
    update_candidates,
)
from .syntax import (
    In,
    Lift,
    Name,
    New,
    Nil,
    Out,
    Par,
    PastIn,
    PastOut,
    Process,
    RPar,
    RProcess,
    Res,
    all_keys,
    fresh_key,
    lift,
    occurs_key,
    remove_key,
    substitute_r,
)

CAUSE_INIT: FrozenSet[KeyStar] = frozenset({STAR})


# ------------------------------------------------------------------- labels


@dataclass(frozen=True)
class OutA:
    subj: str
    obj: Name

    def __str__(self) -> str:
        return f"{self.subj}<{self.obj}>"


@dataclass(frozen=True)
class InA:
    subj: str
    var: str

    def __str__(self) -> str:
        return f"{self.subj}({self.var})"


@dataclass(frozen=True)
class BoutA:
    """Extrusion of the restricted name obj over channel subj; mem is the
    extrusion record of the restriction before this extrusion was added."""

    subj: str
    obj: str
    mem: Memory

    def __str__(self) -> str:
        return f"{self.subj}<new {self.obj}{self.mem}>"


@dataclass(frozen=True)
class TauA:
    def __str__(self) -> str:
        return "tau"


Action = Union[OutA, InA, BoutA, TauA]


def action_names(a: Action) -> FrozenSet[str]:
    """Channel names a restriction must compare itself against."""
    match a:
        case OutA(subj, obj):
            return frozenset({subj, obj.base})
        case InA(subj, _):
            return frozenset({subj})
        case BoutA(subj, obj, _):
            return frozenset({subj, obj})
        case TauA():
            return frozenset()
    raise TypeError(a)


@dataclass(frozen=True)
class Label:
    key: Key
    cause: FrozenSet[KeyStar]
    inst: KeyStar
    action: Action

    def __str__(self) -> str:
        if isinstance(self.action, TauA):
            return f"({self.key},*,*):tau"
        return f"({self.key},{format_keyset(self.cause)},{self.inst}):{self.action}"


Path = Tuple[str, ...]

# a leaf rule fires the prefix at its own node
FIRE_HERE: FrozenSet[Path] = frozenset({()})


@dataclass(frozen=True)
class Meta:
    """Derivation bookkeeping the labels do not carry.

    cause_reads / index_writes: which restrictions the derivation consulted
    (cause lookups) or wrote (extrusions surviving in the label); the
    concurrency analysis of the set-indexed-set semantics needs them, since
    reading the extruder index and extending it do not commute.

    reg_writes: restrictions whose first-extruder register this step seats
    (an extrusion finding it unset) or unseats (undoing the extrusion it
    points at).  Register movement is order-sensitive against any other
    access to the same record, which only the indexed-set semantics sees.

    fired: tree positions of the prefix occurrences this step executes,
    located in the state where those prefixes are live (the source of a
    forward step, the target of a backward one).  An undo followed by a
    re-firing of the occurrence it restored is a conflict, not a
    commutable pair, and this is how it is detected.

    close_reads: keys already recorded in the memory a closing
    synchronisation re-erects.  A later close on the same restriction
    chain cites every earlier one here, and since the nesting order of
    the erected restrictions is observable in the term, such silent
    steps do not commute."""

    cause_reads: FrozenSet[str] = frozenset()
    index_writes: FrozenSet[str] = frozenset()
    reg_writes: FrozenSet[str] = frozenset()
    fired: FrozenSet[Path] = frozenset()
    close_reads: FrozenSet[Key] = frozenset()

    def union(self, other: "Meta") -> "Meta":
        return Meta(self.cause_reads | other.cause_reads,
                    self.index_writes | other.index_writes,
                    self.reg_writes | other.reg_writes,
                    self.fired | other.fired,
                    self.close_reads | other.close_reads)

    def with_read(self, a: str) -> "Meta":
        return replace(self, cause_reads=self.cause_reads | {a})

    def with_write(self, a: str, reg: bool = False) -> "Meta":
        return replace(self, index_writes=self.index_writes | {a},
                       reg_writes=self.reg_writes | ({a} if reg
                                                     else frozenset()))

    def drop_write(self, a: str) -> "Meta":
        return replace(self, index_writes=self.index_writes - {a},
                       reg_writes=self.reg_writes - {a})

    def with_close(self, erected: Memory, a: str) -> "Meta":
        # a close drives the first-extruder register through its own key
        # (or reads the holder), so it counts as a register mover
        return replace(self, close_reads=self.close_reads | erected.gamma,
                       reg_writes=self.reg_writes | {a})

    def at(self, seg: str) -> "Meta":
        """Relocate fired positions one level down segment seg."""
        return replace(self, fired=frozenset((seg,) + p
                                             for p in self.fired))


@dataclass(frozen=True)
class Transition:
    source: RProcess
    label: Label
    direction: str  # "fwd" or "bwd"
    target: RProcess
    meta: Meta = field(default_factory=Meta, compare=False)

    def __str__(self) -> str:
        arrow = "-->" if self.direction == "fwd" else "~~>"
        return f"{self.label} {arrow}"


def star_compatible(K: FrozenSet[KeyStar], j: KeyStar) -> bool:
    """K and an instantiator j may meet in a synchronisation."""
    return STAR in K or j == STAR or K == frozenset({j})


_Rec = Tuple[Label, RProcess, Meta]


# ------------------------------------------------------------ term helpers


def is_standard(x: RProcess) -> bool:
    """No executed prefixes, no recorded extrusions."""
    match x:
        case Lift(_):
            return True
        case PastOut() | PastIn():
            return False
        case RPar(l, r):
            return is_standard(l) and is_standard(r)
        case Res(_, mem, body):
            return mem.empty and is_standard(body)
    raise TypeError(x)


def un_lift(x: RProcess) -> Process:
    """Inverse of lift on standard terms; keeps instantiators."""
    match x:
        case Lift(p):
            return p
        case RPar(l, r):
            return Par(un_lift(l), un_lift(r))
        case Res(a, mem, body):
            if not mem.empty:
                raise ValueError("cannot un-lift a recorded extrusion")
            return New(a, un_lift(body))
    raise ValueError("cannot un-lift an executed prefix")


def _map_names_proc(p: Process, src: Name, dst: Name) -> Process:
    match p:
        case Nil():
            return p
        case Out(s, o, c):
            return Out(dst if s == src else s, dst if o == src else o,
                       _map_names_proc(c, src, dst))
        case In(s, v, c):
            return In(dst if s == src else s, v, _map_names_proc(c, src, dst))
        case Par(l, r):
            return Par(_map_names_proc(l, src, dst), _map_names_proc(r, src, dst))
        case New(a, b):
            return New(a, _map_names_proc(b, src, dst))
    raise TypeError(p)


def unsubstitute_r(x: RProcess, val: Name, var: str) -> RProcess:
    """Undo a communication's substitution: occurrences of the received
    name (identified by its instantiator) become the variable again."""
    dst = Name(var)
    match x:
        case Lift(p):
            return Lift(_map_names_proc(p, val, dst))
        case PastOut(s, o, i, K, c):
            return PastOut(dst if s == val else s, dst if o == val else o,
                           i, K, unsubstitute_r(c, val, var))
        case PastIn(s, v, i, K, c):
            return PastIn(dst if s == val else s, v, i, K,
                          unsubstitute_r(c, val, var))
        case RPar(l, r):
            return RPar(unsubstitute_r(l, val, var), unsubstitute_r(r, val, var))
        case Res(a, mem, b):
            return Res(a, mem, unsubstitute_r(b, val, var))
    raise TypeError(x)


def apply_cause_update(x: RProcess, i: Key, old: FrozenSet[KeyStar],
                       new: FrozenSet[KeyStar]) -> RProcess:
    """Rewrite the stored cause of the executed prefix keyed i."""
    if old == new:
        return x
    match x:
        case Lift(_):
            return x
        case PastOut(s, o, k, K, c):
            if k == i and K == old:
                return PastOut(s, o, k, new, c)
            return PastOut(s, o, k, K, apply_cause_update(c, i, old, new))
        case PastIn(s, v, k, K, c):
            if k == i and K == old:
                return PastIn(s, v, k, new, c)
            return PastIn(s, v, k, K, apply_cause_update(c, i, old, new))
        case RPar(l, r):
            return RPar(apply_cause_update(l, i, old, new),
                        apply_cause_update(r, i, old, new))
        case Res(a, mem, b):
            return Res(a, mem, apply_cause_update(b, i, old, new))
    raise TypeError(x)


# --------------------------------------------------------------- forward LTS


def _sync(out_rec: _Rec, in_rec: _Rec, out_left: bool, i: Key,
          kind: SemanticsKind) -> Optional[_Rec]:
    """Combine an output premise and an input premise into a silent step."""
    lo, to, mo = out_rec
    li, ti, mi = in_rec
    ai = li.action
    if not isinstance(ai, InA):
        return None
    ao = lo.action
    mo = mo.at("L" if out_left else "R")
    mi = mi.at("R" if out_left else "L")
    if isinstance(ao, OutA):
        if ao.subj != ai.subj:
            return None
        if not (star_compatible(lo.cause, li.inst)
                and star_compatible(li.cause, lo.inst)):
            return None
        ti = substitute_r(ti, ai.var, Name(ao.obj.base, i))
        pair = RPar(to, ti) if out_left else RPar(ti, to)
        return (Label(i, CAUSE_INIT, STAR, TauA()), pair, mo.union(mi))
    if isinstance(ao, BoutA):
        if ao.subj != ai.subj:
            return None
        if not (star_compatible(lo.cause, li.inst)
                and star_compatible(li.cause, lo.inst)):
            return None
        a = ao.obj
        to = remove_key(to, i)
        ti = substitute_r(ti, ai.var, Name(a, i))
        pair = RPar(to, ti) if out_left else RPar(ti, to)
        closed = Res(a, ao.mem, pair)
        return (Label(i, CAUSE_INIT, STAR, TauA()), closed,
                mo.union(mi).drop_write(a).with_close(ao.mem, a))
    return None


def _fwd(x: RProcess, kind: SemanticsKind, i: Key) -> List[_Rec]:
    match x:
        case Lift(Nil()):
            return []
        case Lift(Out(b, a, p)):
            lbl = Label(i, CAUSE_INIT, b.inst, OutA(b.base, a))
            return [(lbl, PastOut(b, a, i, CAUSE_INIT, lift(p, kind)),
                     Meta(fired=FIRE_HERE))]
        case Lift(In(b, xv, p)):
            lbl = Label(i, CAUSE_INIT, b.inst, InA(b.base, xv))
            return [(lbl, PastIn(b, xv, i, CAUSE_INIT, lift(p, kind)),
                     Meta(fired=FIRE_HERE))]
        case PastOut(s, o, h, K, c):
            return [(l, PastOut(s, o, h, K, t), m.at("C"))
                    for (l, t, m) in _fwd(c, kind, i) if l.key != h]
        case PastIn(s, v, h, K, c):
            return [(l, PastIn(s, v, h, K, t), m.at("C"))
                    for (l, t, m) in _fwd(c, kind, i) if l.key != h]
        case RPar(left, right):
            ls = _fwd(left, kind, i)
            rs = _fwd(right, kind, i)
            out: List[_Rec] = []
            out += [(l, RPar(t, right), m.at("L")) for (l, t, m) in ls]
            out += [(l, RPar(left, t), m.at("R")) for (l, t, m) in rs]
            for lrec in ls:
                for rrec in rs:
                    if lrec[0].key != rrec[0].key:
                        continue
                    s = _sync(lrec, rrec, True, i, kind)
                    if s:
                        out.append(s)
                    s = _sync(rrec, lrec, False, i, kind)
                    if s:
                        out.append(s)
            return out
        case Res(a, mem, body):
            out = []
            for (l, t, m) in _fwd(body, kind, i):
                act = l.action
                m = m.at("B")
                if a not in action_names(act):
                    out.append((l, Res(a, mem, t), m))
                    continue
                extrudes = (isinstance(act, OutA) and act.obj.base == a) or (
                    isinstance(act, BoutA) and act.obj == a)
                if extrudes:
                    subj = act.subj
                    seats = kind is SemanticsKind.BS and mem.w == STAR
                    for K2 in update_candidates(mem, l.cause):
                        t2 = apply_cause_update(t, l.key, l.cause, K2)
                        lbl = Label(l.key, K2, l.inst, BoutA(subj, a, mem))
                        out.append((lbl, Res(a, mem.add(l.key), t2),
                                    m.with_write(a, reg=seats)))
                elif act.subj == a:
                    if mem.empty:
                        continue
                    for K2 in cause_candidates(kind, mem, l.cause, t):
                        t2 = apply_cause_update(t, l.key, l.cause, K2)
                        lbl = Label(l.key, K2, l.inst, act)
                        out.append((lbl, Res(a, mem, t2), m.with_read(a)))
            return out
    raise TypeError(x)


def forward_steps(x: RProcess, kind: SemanticsKind,
                  key: Optional[Key] = None) -> List[Transition]:
    """All forward transitions of x.  The fired prefix gets `key` when
    given (and fresh), otherwise the canonical next key."""
    if key is None:
        key = fresh_key(x)
    elif key in all_keys(x):
        return []
    return [Transition(x, l, "fwd", t, m) for (l, t, m) in _fwd(x, kind, key)]


# -------------------------------------------------------------- backward LTS


# A backward record additionally carries the cause sets the forward
# derivation could be wearing at this point of the tree; the recorded cause
# of the undone prefix must be among them once every enclosing restriction
# has applied its rewrite, otherwise the undo has no forward partner.
_BRec = Tuple[Label, RProcess, Meta, FrozenSet[FrozenSet[KeyStar]]]

_INIT_RUN: FrozenSet[FrozenSet[KeyStar]] = frozenset({CAUSE_INIT})


def _unsync(out_rec: _BRec, in_rec: _BRec, out_left: bool,
            erected: Optional[Memory], a: Optional[str]) -> Optional[_BRec]:
    """Combine two backward premises into an undone silent step.  For a
    scope-closing synchronisation, erected is the memory of the enclosing
    restriction of a, which the output premise's label must carry."""
    lo, to, mo, ro = out_rec
    li, ti, mi, ri = in_rec
    if lo.key != li.key:
        return None
    if lo.cause not in ro or li.cause not in ri:
        return None
    ai = li.action
    if not isinstance(ai, InA):
        return None
    ao = lo.action
    meta = mo.at("L" if out_left else "R").union(mi.at("R" if out_left else "L"))
    if erected is None:
        if not isinstance(ao, OutA):
            return None
        obj = Name(ao.obj.base, lo.key)
    else:
        if not (isinstance(ao, BoutA) and ao.obj == a and ao.mem == erected):
            return None
        obj = Name(a, lo.key)
        meta = meta.drop_write(a).with_close(erected, a)
    if ao.subj != ai.subj:
        return None
    if not (star_compatible(lo.cause, li.inst)
            and star_compatible(li.cause, lo.inst)):
        return None
    ti = unsubstitute_r(ti, obj, ai.var)
    pair = RPar(to, ti) if out_left else RPar(ti, to)
    return (Label(lo.key, CAUSE_INIT, STAR, TauA()), pair, meta, _INIT_RUN)


def _bwd(x: RProcess, kind: SemanticsKind) -> List[_BRec]:
    match x:
        case Lift(_):
            return []
        case PastOut(s, o, i, K, c):
            out: List[_BRec] = []
            if is_standard(c):
                lbl = Label(i, K, s.inst, OutA(s.base, o))
                out.append((lbl, Lift(Out(s, o, un_lift(c))),
                            Meta(fired=FIRE_HERE), _INIT_RUN))
            out += [(l, PastOut(s, o, i, K, t), m.at("C"), r)
                    for (l, t, m, r) in _bwd(c, kind) if l.key != i]
            return out
        case PastIn(s, v, i, K, c):
            out = []
            if is_standard(c):
                lbl = Label(i, K, s.inst, InA(s.base, v))
                out.append((lbl, Lift(In(s, v, un_lift(c))),
                            Meta(fired=FIRE_HERE), _INIT_RUN))
            out += [(l, PastIn(s, v, i, K, t), m.at("C"), r)
                    for (l, t, m, r) in _bwd(c, kind) if l.key != i]
            return out
        case RPar(left, right):
            ls = _bwd(left, kind)
            rs = _bwd(right, kind)
            out = []
            out += [(l, RPar(t, right), m.at("L"), r) for (l, t, m, r) in ls
                    if not occurs_key(right, l.key)]
            out += [(l, RPar(left, t), m.at("R"), r) for (l, t, m, r) in rs
                    if not occurs_key(left, l.key)]
            for lrec in ls:
                for rrec in rs:
                    s = _unsync(lrec, rrec, True, None, None)
                    if s:
                        out.append(s)
                    s = _unsync(rrec, lrec, False, None, None)
                    if s:
                        out.append(s)
            return out
        case Res(a, mem, body):
            out = []
            for (l, t, m, run) in _bwd(body, kind):
                act = l.action
                m = m.at("B")
                if a not in action_names(act):
                    out.append((l, Res(a, mem, t), m, run))
                    continue
                extrudes = (isinstance(act, OutA) and act.obj.base == a) or (
                    isinstance(act, BoutA) and act.obj == a)
                if extrudes:
                    if not mem.contains(l.key):
                        continue
                    popped = mem.pop(l.key)
                    run2 = frozenset(k2 for k in run
                                     for k2 in update_candidates(popped, k))
                    if not run2:
                        continue
                    unseats = kind is SemanticsKind.BS and mem.w == l.key
                    lbl = Label(l.key, l.cause, l.inst, BoutA(act.subj, a, popped))
                    out.append((lbl, Res(a, popped, t),
                                m.with_write(a, reg=unseats), run2))
                elif act.subj == a:
                    if mem.empty:
                        continue
                    run2 = frozenset(k2 for k in run
                                     for k2 in cause_candidates(kind, mem, k, body))
                    if not run2:
                        continue
                    out.append((l, Res(a, mem, t), m.with_read(a), run2))
            if isinstance(body, RPar):
                ls = _bwd(body.left, kind)
                rs = _bwd(body.right, kind)
                for lrec in ls:
                    for rrec in rs:
                        s = _unsync(lrec, rrec, True, mem, a)
                        if s:
                            out.append(s)
                        s = _unsync(rrec, lrec, False, mem, a)
                        if s:
                            out.append(s)
            return out
    raise TypeError(x)


def backward_steps(x: RProcess, kind: SemanticsKind) -> List[Transition]:
    """All backward transitions of x (undo one recorded action).  A record
    is undoable only if its stored cause is derivable by the mirrored
    forward step at the current memories."""
    return [Transition(x, l, "bwd", t, m) for (l, t, m, run) in _bwd(x, kind)
            if l.cause in run]


def all_steps(x: RProcess, kind: SemanticsKind) -> List[Transition]:
    return forward_steps(x, kind) + backward_steps(x, kind)
