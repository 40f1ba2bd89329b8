"""Causal-term semantics with explicit cause sets, used as ground truth
for the indexed-set instantiation of the engine.

Causal terms carry sets of keys as wrappers (K :: A).  Firing a prefix
exposes the accumulated wrappers as the label's cause set and leaves the
continuation wrapped with the fresh key.  A communication is silent and
unkeyed: the participants' cause sets are merged and imposed on both
residuals, so later actions inside either continuation inherit them.

On the engine side, the history of a term induces a dependency graph on
keys (communication keys appear as two vertices joined both ways).  The
key-removal algorithm restricts the graph to the paths into the fired key
and contracts the communication pairs; what remains is exactly the cause
set the causal-term semantics would have produced.  The two checkers at
the bottom play the engine against this oracle, per step and per causal
order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

from .causality import causal_order
from .memory import Key, SemanticsKind, STAR
from .pi_oracle import (
    BoundOutput,
    FreeOutput,
    Input,
    PiLabel,
    Tau,
    _label_names,
    erase_label,
)
from .semantics import (
    Label,
    TauA,
    Transition,
    forward_steps,
)
from .syntax import (
    In,
    Name,
    New,
    Nil,
    Out,
    Par,
    PastIn,
    PastOut,
    Process,
    Lift,
    RPar,
    RProcess,
    Res,
    erase,
    free_names,
    fresh_key,
    lift,
    substitute,
)

KeySet = FrozenSet[Key]


# ------------------------------------------------------------- causal terms


@dataclass(frozen=True)
class Plain:
    """An unexecuted subprocess (nil or a prefix; composites normalize)."""

    proc: Process

    def __post_init__(self):
        if isinstance(self.proc, (Par, New)):
            raise ValueError("normalize composites with causal()")


@dataclass(frozen=True)
class Cause:
    causes: KeySet
    body: "CausalTerm"


@dataclass(frozen=True)
class CPar:
    left: "CausalTerm"
    right: "CausalTerm"


@dataclass(frozen=True)
class CRes:
    name: str
    body: "CausalTerm"


CausalTerm = Union[Plain, Cause, CPar, CRes]


def causal(p: Process) -> CausalTerm:
    """Causal term of a plain process."""
    match p:
        case Par(l, r):
            return CPar(causal(l), causal(r))
        case New(a, body):
            return CRes(a, causal(body))
    return Plain(p)


def lam(a: CausalTerm) -> Process:
    """Erase the cause wrappers."""
    match a:
        case Plain(p):
            return p
        case Cause(_, body):
            return lam(body)
        case CPar(l, r):
            return Par(lam(l), lam(r))
        case CRes(n, body):
            return New(n, lam(body))
    raise TypeError(a)


def _subst(a: CausalTerm, var: str, val: Name) -> CausalTerm:
    match a:
        case Plain(p):
            return Plain(substitute(p, var, val))
        case Cause(K, body):
            return Cause(K, _subst(body, var, val))
        case CPar(l, r):
            return CPar(_subst(l, var, val), _subst(r, var, val))
        case CRes(n, body):
            if n == var:
                return a
            return CRes(n, _subst(body, var, val))
    raise TypeError(a)


def _replace_wrapper(a: CausalTerm, key: Key, causes: KeySet) -> CausalTerm:
    """Rewrite the freshly placed {key} wrapper into the merged cause set."""
    match a:
        case Plain(_):
            return a
        case Cause(K, body):
            if K == frozenset({key}):
                return Cause(causes, body)
            return Cause(K, _replace_wrapper(body, key, causes))
        case CPar(l, r):
            return CPar(_replace_wrapper(l, key, causes),
                        _replace_wrapper(r, key, causes))
        case CRes(n, body):
            return CRes(n, _replace_wrapper(body, key, causes))
    raise TypeError(a)


# ------------------------------------------------------------------- labels


@dataclass(frozen=True)
class KeyedLabel:
    key: Key
    action: PiLabel

    def __str__(self) -> str:
        return f"{self.key}:{self.action}"


@dataclass(frozen=True)
class SilentLabel:
    def __str__(self) -> str:
        return "tau"


Zeta = Union[KeyedLabel, SilentLabel]

BSStep = Tuple[KeySet, Zeta, CausalTerm]


def gamma(l: Label) -> Zeta:
    """The causal-term-side label of a framework label: the key and the
    erased action for visible steps, a bare silent label for tau."""
    if isinstance(l.action, TauA):
        return SilentLabel()
    return KeyedLabel(l.key, erase_label(l))


def _com(send: BSStep, recv: BSStep, send_left: bool,
         key: Key) -> List[BSStep]:
    ks, zs, ts = send
    kr, zr, tr = recv
    if not (isinstance(zs, KeyedLabel) and isinstance(zr, KeyedLabel)):
        return []
    if not isinstance(zr.action, Input):
        return []
    act = zs.action
    merged = ks | kr
    if isinstance(act, FreeOutput) and act.subj == zr.action.subj:
        tr = _subst(tr, zr.action.var, Name(act.obj))
        ts = _replace_wrapper(ts, key, merged)
        tr = _replace_wrapper(tr, key, merged)
        pair = CPar(ts, tr) if send_left else CPar(tr, ts)
        return [(frozenset(), SilentLabel(), pair)]
    if isinstance(act, BoundOutput) and act.subj == zr.action.subj:
        if act.obj in free_names(lam(tr)) - {zr.action.var}:
            return []
        tr = _subst(tr, zr.action.var, Name(act.obj))
        ts = _replace_wrapper(ts, key, merged)
        tr = _replace_wrapper(tr, key, merged)
        pair = CPar(ts, tr) if send_left else CPar(tr, ts)
        return [(frozenset(), SilentLabel(), CRes(act.obj, pair))]
    return []


def bs_steps(a: CausalTerm, key: Key) -> List[BSStep]:
    """All transitions of a causal term; the fired prefix takes `key`."""
    match a:
        case Plain(Nil()):
            return []
        case Plain(Out(b, o, cont)):
            z = KeyedLabel(key, FreeOutput(b.base, o.base))
            return [(frozenset(), z, Cause(frozenset({key}), causal(cont)))]
        case Plain(In(b, x, cont)):
            z = KeyedLabel(key, Input(b.base, x))
            return [(frozenset(), z, Cause(frozenset({key}), causal(cont)))]
        case Cause(K, body):
            out: List[BSStep] = []
            for (kb, z, t) in bs_steps(body, key):
                kb2 = kb | K if isinstance(z, KeyedLabel) else kb
                out.append((kb2, z, Cause(K, t)))
            return out
        case CPar(left, right):
            ls = bs_steps(left, key)
            rs = bs_steps(right, key)
            out = []
            for (kb, z, t) in ls:
                if _blocked_by(z, right):
                    continue
                out.append((kb, z, CPar(t, right)))
            for (kb, z, t) in rs:
                if _blocked_by(z, left):
                    continue
                out.append((kb, z, CPar(left, t)))
            for srec in ls:
                for rrec in rs:
                    out += _com(srec, rrec, True, key)
                    out += _com(rrec, srec, False, key)
            return out
        case CRes(n, body):
            out = []
            for (kb, z, t) in bs_steps(body, key):
                if isinstance(z, SilentLabel):
                    out.append((kb, z, CRes(n, t)))
                    continue
                act = z.action
                if n not in _label_names(act):
                    out.append((kb, z, CRes(n, t)))
                elif (isinstance(act, FreeOutput) and act.obj == n
                        and act.subj != n):
                    # the restriction opens; it moves into the label
                    out.append((kb, KeyedLabel(z.key,
                                               BoundOutput(act.subj, n)), t))
            return out
    raise TypeError(a)


def _blocked_by(z: Zeta, sibling: CausalTerm) -> bool:
    if not isinstance(z, KeyedLabel):
        return False
    act = z.action
    bound = act.obj if isinstance(act, BoundOutput) else (
        act.var if isinstance(act, Input) else None)
    return bound is not None and bound in free_names(lam(sibling))


# -------------------------------------------------------- dependency graph


Vertex = Tuple[Key, int]  # key, copy index (communications have two)


@dataclass(frozen=True)
class DependencyGraph:
    vertices: FrozenSet[Vertex]
    edges: FrozenSet[Tuple[Vertex, Vertex]]


def build_dependency_graph(
        x: Union[RProcess, Sequence[Transition]]) -> DependencyGraph:
    """Dependences between the keys recorded in a history: an edge from
    every record to every record nested in its continuation, an edge from
    every key a record cites in its cause set, and both copies of a
    communication key joined in both directions.  Accepts a state or a
    trace (the trace's last target)."""
    if not isinstance(x, (Lift, PastOut, PastIn, RPar, Res)):
        if not x:
            return DependencyGraph(frozenset(), frozenset())
        x = x[-1].target
    counts: Dict[Key, int] = {}
    vertices: List[Vertex] = []
    edges: Set[Tuple[Vertex, Vertex]] = set()
    cites: List[Tuple[Key, Vertex]] = []

    def walk(t: RProcess, above: Tuple[Vertex, ...]) -> None:
        match t:
            case Lift(_):
                return
            case PastOut(_, _, i, K, c) | PastIn(_, _, i, K, c):
                vid = (i, counts.get(i, 0))
                counts[i] = counts.get(i, 0) + 1
                vertices.append(vid)
                for anc in above:
                    edges.add((anc, vid))
                cites.extend((k, vid) for k in K if k != STAR and k != i)
                walk(c, above + (vid,))
            case RPar(l, r):
                walk(l, above)
                walk(r, above)
            case Res(_, _, b):
                walk(b, above)

    walk(x, ())
    for (k, vid) in cites:
        for copy in range(counts.get(k, 0)):
            edges.add(((k, copy), vid))
    for (k, n) in counts.items():
        if n == 2:
            edges.add(((k, 0), (k, 1)))
            edges.add(((k, 1), (k, 0)))
    return DependencyGraph(frozenset(vertices), frozenset(edges))


def _into(g: DependencyGraph, i: Key) -> Set[Vertex]:
    """Vertices on paths whose target is key i (including i itself)."""
    targets = [v for v in g.vertices if v[0] == i]
    if len(targets) != 1:
        raise ValueError(f"key {i} does not identify one record")
    preds: Dict[Vertex, Set[Vertex]] = {}
    for (u, v) in g.edges:
        preds.setdefault(v, set()).add(u)
    seen: Set[Vertex] = set(targets)
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in preds.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def k_f(g: DependencyGraph, i: Key) -> Tuple[Key, ...]:
    """Multiset of keys on paths into i, without i itself, as a sorted
    tuple (communication keys appear twice)."""
    keys = Counter(k for (k, _) in _into(g, i))
    keys[i] -= 1
    return tuple(sorted(keys.elements()))


def rem(g: DependencyGraph, i: Key) -> KeySet:
    """Key removal: restrict to paths into i, contract the bidirectional
    communication pairs away, drop i; what remains is the cause set."""
    sub = _into(g, i)
    mult = Counter(k for (k, _) in sub)
    contracted = {k for (k, n) in mult.items()
                  if n == 2 and ((k, 0), (k, 1)) in g.edges}
    return frozenset(k for (k, _) in sub if k not in contracted) - {i}


def graph_to_text(g: DependencyGraph) -> str:
    """Edge list with vertex copy annotations, for debugging."""
    lines = [f"vertex {k}#{c}" for (k, c) in sorted(g.vertices)]
    lines += [f"{uk}#{uc} -> {vk}#{vc}"
              for ((uk, uc), (vk, vc)) in sorted(g.edges)]
    return "\n".join(lines)


def k_f_of(t: Transition) -> Optional[Tuple[Key, ...]]:
    """Cause multiset of a visible forward transition."""
    if isinstance(t.label.action, TauA):
        return None
    return k_f(build_dependency_graph(t.target), t.label.key)


@dataclass(frozen=True)
class AnnotatedTransition:
    transition: Transition
    causes: Optional[Tuple[Key, ...]]  # K_F; None on silent steps


def annotate(trace: Sequence[Transition]) -> List[AnnotatedTransition]:
    return [AnnotatedTransition(t, k_f_of(t)) for t in trace]


# ----------------------------------------------------------------- checkers


@dataclass(frozen=True)
class CorrespondenceVerdict:
    ok: bool
    exhausted: bool = False
    detail: str = ""

    def __str__(self) -> str:
        if self.ok:
            return "corresponds" + (" (budget reached)" if self.exhausted else "")
        return self.detail


class _Mismatch(Exception):
    pass


Extruders = FrozenSet[Tuple[str, Key]]  # name -> key of its last extrusion


def _effective_kb(kb: KeySet, z: Zeta, ext: Extruders,
                  eff_by_key: Dict[Key, KeySet]) -> KeySet:
    """Full cause ancestry of a step: subject causes, plus the imposed
    object causes (an extrusion causes every later action using the
    extruded name anywhere in its label), closed through the ancestries of
    the cited steps."""
    if isinstance(z, SilentLabel):
        return frozenset()
    seen = dict(ext)
    direct = kb | {seen[n] for n in _label_names(z.action) if n in seen}
    out = set(direct)
    for k in direct:
        out |= eff_by_key.get(k, frozenset())
    return frozenset(out)


def _extend(ext: Extruders, z: Zeta) -> Extruders:
    if isinstance(z, KeyedLabel) and isinstance(z.action, BoundOutput):
        return frozenset({(n, k) for (n, k) in ext
                          if n != z.action.obj} | {(z.action.obj, z.key)})
    return ext


def _matched_runs(p: Process, depth: int, max_states: int):
    """Depth-first product walk of the engine (indexed-set memory) and the
    causal-term semantics.  At every reached pair each side's steps must be
    matched by the other on mapped label, erased target, and cause set
    (key removal against the oracle's effective set); yields the maximal
    matched runs as (trace, zetas, effective cause sets).  Raises _Mismatch
    when one side cannot follow the other."""
    kind = SemanticsKind.BS
    x0 = lift(p, kind)
    a0 = causal(p)
    if erase(x0) != lam(a0):
        raise _Mismatch(f"erasures differ at the root: {x0} / {a0}")
    budget = [max_states]

    def step(x: RProcess, a: CausalTerm, ext: Extruders,
             eff_by_key: Dict[Key, KeySet], left: int,
             trace: List[Transition], zetas: List[Zeta],
             kbs: List[KeySet]):
        budget[0] -= 1
        if left == 0 or budget[0] <= 0:
            yield (list(trace), list(zetas), list(kbs)), budget[0] <= 0
            return
        fsteps = forward_steps(x, kind)
        bsteps = bs_steps(a, fresh_key(x))
        pairs: List[Tuple[Transition, KeySet, Zeta, CausalTerm]] = []
        for t in fsteps:
            z = gamma(t.label)
            want = erase(t.target)
            want_kb = (rem(build_dependency_graph(t.target), t.label.key)
                       if isinstance(z, KeyedLabel) else None)
            hits = [(kb, z2, a2) for (kb, z2, a2) in bsteps
                    if z2 == z and lam(a2) == want
                    and (want_kb is None
                         or _effective_kb(kb, z2, ext, eff_by_key) == want_kb)]
            if not hits:
                raise _Mismatch(
                    f"engine step {t.label} from {erase(x)} unmatched "
                    f"(wanted cause set "
                    f"{'-' if want_kb is None else sorted(want_kb)})")
            pairs.extend((t, kb, z2, a2) for (kb, z2, a2) in hits)
        for (kb, z, a2) in bsteps:
            eff = _effective_kb(kb, z, ext, eff_by_key)
            ok = any(gamma(t.label) == z and erase(t.target) == lam(a2)
                     and (isinstance(z, SilentLabel)
                          or rem(build_dependency_graph(t.target),
                                 t.label.key) == eff)
                     for t in fsteps)
            if not ok:
                raise _Mismatch(
                    f"oracle step {z} with cause set {sorted(eff)} "
                    f"unmatched from {lam(a)}")
        if not pairs:
            yield (list(trace), list(zetas), list(kbs)), False
            return
        seen_here: Set[Tuple[Transition, CausalTerm]] = set()
        for (t, kb, z, a2) in pairs:
            if (t, a2) in seen_here:
                continue
            seen_here.add((t, a2))
            eff = _effective_kb(kb, z, ext, eff_by_key)
            child_eff = eff_by_key
            if isinstance(z, KeyedLabel):
                child_eff = {**eff_by_key, z.key: eff}
            trace.append(t)
            zetas.append(z)
            kbs.append(eff)
            yield from step(t.target, a2, _extend(ext, z), child_eff,
                            left - 1, trace, zetas, kbs)
            trace.pop()
            zetas.pop()
            kbs.pop()

    yield from step(x0, a0, frozenset(), {}, depth, [], [], [])


def check_structural_correspondence(p: Process, depth: int = 4,
                                    max_states: int = 20_000) -> CorrespondenceVerdict:
    """Play the engine (indexed-set memory) against the causal-term
    semantics: along every run to the depth bound, each side's steps must
    be matched by the other with equal mapped labels, equal erasures, and
    key removal of the engine-side cause multiset equal to the oracle's
    effective cause set."""
    exhausted = False
    try:
        for _, hit_budget in _matched_runs(p, depth, max_states):
            exhausted = exhausted or hit_budget
    except _Mismatch as m:
        return CorrespondenceVerdict(False, detail=str(m))
    return CorrespondenceVerdict(True, exhausted=exhausted)


def _closure(pairs: Set[Tuple[int, int]]) -> Set[Tuple[int, int]]:
    closed = set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(closed):
            for (c, d) in list(closed):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
    return closed


def check_causal_correspondence(p: Process, depth: int = 4,
                                max_states: int = 20_000) -> CorrespondenceVerdict:
    """On every matched run, the transitive closure of the order the
    oracle's cause sets induce must coincide with the engine's own
    causality relation, both restricted to visible steps."""
    kind = SemanticsKind.BS
    exhausted = False
    try:
        for (trace, zetas, kbs), hit_budget in _matched_runs(p, depth,
                                                             max_states):
            exhausted = exhausted or hit_budget
            if not trace:
                continue
            vis = {i for i, z in enumerate(zetas)
                   if isinstance(z, KeyedLabel)}
            engine = {(a, b) for (a, b) in causal_order(trace, kind)
                      if a in vis and b in vis}
            oracle = _closure({(a, b) for b in vis for a in vis
                               if a < b and zetas[a].key in kbs[b]})
            if engine != oracle:
                labels = ", ".join(str(z) for z in zetas)
                return CorrespondenceVerdict(
                    False,
                    detail=(f"causal orders differ on [{labels}]: engine "
                            f"{sorted(engine)}, oracle {sorted(oracle)}"))
    except _Mismatch as m:
        return CorrespondenceVerdict(False, detail=str(m))
    return CorrespondenceVerdict(True, exhausted=exhausted)
