"""Terms of the calculus.

Two layers:

- Process: the surface language (what the parser accepts).  Names occurring
  in a Process may carry an instantiator, the key of the input that
  substituted them in; parsed sources never have one.
- RProcess: history-carrying processes.  Executed prefixes stay in the term
  decorated with the key and cause set of the action that consumed them, and
  restrictions carry an extrusion memory.

The concrete grammar:

    process := par
    par     := seq ('|' par)?
    seq     := '0'
             | '(' process ')'
             | 'new' IDENT '.' seq
             | IDENT '<' IDENT '>' ('.' seq)?
             | IDENT '(' IDENT ')' ('.' seq)?

'new' binds tighter than '|'; a prefix with no continuation means .0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import FrozenSet, Iterator, Optional, Set, Tuple, Union

from .memory import (
    STAR,
    Key,
    KeyStar,
    Memory,
    SemanticsKind,
    format_keyset,
    init as init_memory,
)


@dataclass(frozen=True)
class Name:
    """A channel name occurrence; inst is the key of the input that
    instantiated it, or * for names present from the start."""

    base: str
    inst: KeyStar = STAR

    def __str__(self) -> str:
        return self.base if self.inst == STAR else f"{self.base}^{self.inst}"


# ---------------------------------------------------------------- processes


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Out:
    subj: Name
    obj: Name
    cont: "Process"


@dataclass(frozen=True)
class In:
    subj: Name
    var: str
    cont: "Process"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class New:
    name: str
    body: "Process"


Process = Union[Nil, Out, In, Par, New]


# ------------------------------------------------- history-carrying processes


@dataclass(frozen=True)
class Lift:
    """A standard process awaiting execution.  Only Nil and prefixes are
    lifted directly; parallel and restriction nodes become RPar / Res."""

    proc: Process

    def __post_init__(self):
        if isinstance(self.proc, (Par, New)):
            raise ValueError("lift composite nodes with lift(), not Lift()")


@dataclass(frozen=True)
class PastOut:
    subj: Name
    obj: Name
    key: Key
    cause: FrozenSet[KeyStar]
    cont: "RProcess"


@dataclass(frozen=True)
class PastIn:
    subj: Name
    var: str
    key: Key
    cause: FrozenSet[KeyStar]
    cont: "RProcess"


@dataclass(frozen=True)
class RPar:
    left: "RProcess"
    right: "RProcess"


@dataclass(frozen=True)
class Res:
    name: str
    mem: Memory
    body: "RProcess"


RProcess = Union[Lift, PastOut, PastIn, RPar, Res]


def lift(p: Process, kind: SemanticsKind) -> RProcess:
    """Embed a surface process, giving every restriction a fresh memory."""
    if isinstance(p, Par):
        return RPar(lift(p.left, kind), lift(p.right, kind))
    if isinstance(p, New):
        return Res(p.name, init_memory(kind), lift(p.body, kind))
    return Lift(p)


def strip_inst(p: Process) -> Process:
    """Forget instantiators on every name."""
    match p:
        case Nil():
            return p
        case Out(s, o, c):
            return Out(Name(s.base), Name(o.base), strip_inst(c))
        case In(s, v, c):
            return In(Name(s.base), v, strip_inst(c))
        case Par(l, r):
            return Par(strip_inst(l), strip_inst(r))
        case New(a, b):
            return New(a, strip_inst(b))
    raise TypeError(p)


def erase(x: RProcess) -> Process:
    """Forget the history: past prefixes collapse to their continuations,
    instantiators are dropped, and restrictions whose name was already
    extruded disappear (a standard process loses the binder at the first
    bound output)."""
    match x:
        case Lift(p):
            return strip_inst(p)
        case PastOut(cont=c) | PastIn(cont=c):
            return erase(c)
        case RPar(l, r):
            p, q = erase(l), erase(r)
            return Par(p, q)
        case Res(a, mem, body):
            inner = erase(body)
            return New(a, inner) if mem.empty else inner
    raise TypeError(x)


# ------------------------------------------------------------------- parsing


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"syntax error at offset {pos}: {message}")
        self.pos = pos


_SYMBOLS = set("()<>.|")


def _tokens(src: str) -> Iterator[Tuple[str, str, int]]:
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        pos = i + 1
        if c in _SYMBOLS:
            yield ("sym", c, pos)
            i += 1
        elif c == "0":
            yield ("nil", "0", pos)
            i += 1
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            yield ("kw" if word == "new" else "ident", word, pos)
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", pos)
    yield ("eof", "", n + 1)


class _Parser:
    def __init__(self, src: str):
        self.toks = list(_tokens(src))
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def next(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, kind: str, text: str) -> None:
        t, v, pos = self.next()
        if t != kind or v != text:
            shown = v if v else "end of input"
            raise ParseError(f"expected {text!r}, found {shown!r}", pos)

    def ident(self) -> str:
        t, v, pos = self.next()
        if t != "ident":
            shown = v if v else "end of input"
            raise ParseError(f"expected a name, found {shown!r}", pos)
        return v

    def parse(self) -> Process:
        p = self.par()
        t, v, pos = self.peek()
        if t != "eof":
            raise ParseError(f"unexpected {v!r}", pos)
        return p

    def par(self) -> Process:
        left = self.seq()
        t, v, _ = self.peek()
        if t == "sym" and v == "|":
            self.next()
            return Par(left, self.par())
        return left

    def opt_cont(self) -> Process:
        t, v, _ = self.peek()
        if t == "sym" and v == ".":
            self.next()
            return self.seq()
        return Nil()

    def seq(self) -> Process:
        t, v, pos = self.next()
        if t == "nil":
            return Nil()
        if t == "sym" and v == "(":
            p = self.par()
            self.expect("sym", ")")
            return p
        if t == "kw":
            name = self.ident()
            self.expect("sym", ".")
            return New(name, self.seq())
        if t == "ident":
            t2, v2, _ = self.peek()
            if t2 == "sym" and v2 == "<":
                self.next()
                obj = self.ident()
                self.expect("sym", ">")
                return Out(Name(v), Name(obj), self.opt_cont())
            if t2 == "sym" and v2 == "(":
                self.next()
                var = self.ident()
                self.expect("sym", ")")
                return In(Name(v), var, self.opt_cont())
            hint = v2 if v2 else "end of input"
            raise ParseError(f"expected '<' or '(' after {v!r}, found {hint!r}",
                             self.peek()[2])
        shown = v if v else "end of input"
        raise ParseError(f"expected a process, found {shown!r}", pos)


def parse(src: str) -> Process:
    return _Parser(src).parse()


# ------------------------------------------------------------ pretty printing


def _fmt_cause(K: FrozenSet[KeyStar]) -> str:
    return format_keyset(K)


def _pp_seq(p: Process) -> str:
    # render p in a position where the grammar expects a seq
    return f"({pretty(p)})" if isinstance(p, Par) else pretty(p)


def _pp_cont(p: Process) -> str:
    return "" if isinstance(p, Nil) else f".{_pp_seq(p)}"


def pretty(p: Process) -> str:
    match p:
        case Nil():
            return "0"
        case Out(s, o, c):
            return f"{s}<{o}>{_pp_cont(c)}"
        case In(s, v, c):
            return f"{s}({v}){_pp_cont(c)}"
        case Par(l, r):
            return f"{_pp_seq(l)} | {pretty(r)}"
        case New(a, b):
            return f"new {a}.{_pp_seq(b)}"
    raise TypeError(p)


def _ppr_seq(x: RProcess) -> str:
    return f"({pretty_r(x)})" if isinstance(x, RPar) else pretty_r(x)


def _ppr_cont(x: RProcess) -> str:
    if isinstance(x, Lift) and isinstance(x.proc, Nil):
        return ""
    return f".{_ppr_seq(x)}"


def pretty_r(x: RProcess) -> str:
    match x:
        case Lift(p):
            return pretty(p)
        case PastOut(s, o, i, K, c):
            return f"{s}<{o}>[{i},{_fmt_cause(K)}]{_ppr_cont(c)}"
        case PastIn(s, v, i, K, c):
            return f"{s}({v})[{i},{_fmt_cause(K)}]{_ppr_cont(c)}"
        case RPar(l, r):
            return f"{_ppr_seq(l)} | {pretty_r(r)}"
        case Res(a, mem, body):
            return f"new {a}{mem}.{_ppr_seq(body)}"
    raise TypeError(x)


# --------------------------------------------------------------- inspection


def free_names(p: Process) -> Set[str]:
    match p:
        case Nil():
            return set()
        case Out(s, o, c):
            return {s.base, o.base} | free_names(c)
        case In(s, v, c):
            return {s.base} | (free_names(c) - {v})
        case Par(l, r):
            return free_names(l) | free_names(r)
        case New(a, b):
            return free_names(b) - {a}
    raise TypeError(p)


def free_names_r(x: RProcess) -> Set[str]:
    """Free names of a history-carrying process.  A restriction whose name
    was already extruded no longer hides it."""
    match x:
        case Lift(p):
            return free_names(p)
        case PastOut(s, o, _, _, c):
            return {s.base, o.base} | free_names_r(c)
        case PastIn(s, _, _, _, c):
            # an executed input no longer binds: its variable was consumed
            # and any leftover occurrence awaits the synchronisation
            return {s.base} | free_names_r(c)
        case RPar(l, r):
            return free_names_r(l) | free_names_r(r)
        case Res(a, mem, body):
            inner = free_names_r(body)
            return inner - {a} if mem.empty else inner
    raise TypeError(x)


def key_multiset(x: RProcess) -> Counter:
    """Keys of executed prefixes; a communication's key occurs twice."""
    match x:
        case Lift(_):
            return Counter()
        case PastOut(key=i, cont=c) | PastIn(key=i, cont=c):
            out = key_multiset(c)
            out[i] += 1
            return out
        case RPar(l, r):
            return key_multiset(l) + key_multiset(r)
        case Res(body=b):
            return key_multiset(b)
    raise TypeError(x)


def all_keys(x: RProcess) -> Set[Key]:
    """Every integer occurring anywhere: prefix keys, cause sets,
    instantiators, memories.  Used to pick fresh keys."""
    out: Set[Key] = set()

    def name(n: Name):
        if n.inst != STAR:
            out.add(n.inst)

    def proc(p: Process):
        match p:
            case Out(s, o, c):
                name(s), name(o), proc(c)
            case In(s, _, c):
                name(s), proc(c)
            case Par(l, r):
                proc(l), proc(r)
            case New(_, b):
                proc(b)

    def go(y: RProcess):
        match y:
            case Lift(p):
                proc(p)
            case PastOut(s, o, i, K, c):
                out.add(i)
                out.update(k for k in K if k != STAR)
                name(s), name(o), go(c)
            case PastIn(s, _, i, K, c):
                out.add(i)
                out.update(k for k in K if k != STAR)
                name(s), go(c)
            case RPar(l, r):
                go(l), go(r)
            case Res(_, mem, b):
                out.update(mem.gamma)
                out.update(k for k in mem.omega if k != STAR)
                if mem.w != STAR:
                    out.add(mem.w)
                go(b)

    go(x)
    return out


def fresh_key(x: RProcess) -> Key:
    ks = all_keys(x)
    return max(ks) + 1 if ks else 0


def occurs_key(x: RProcess, i: Key) -> bool:
    """Does i occur at all (prefix key, cause, instantiator, memory)?"""
    return i in all_keys(x)


def stored_causes(x: RProcess, i: Key) -> FrozenSet[KeyStar]:
    """Union of the cause sets recorded at the past prefixes keyed i.  A
    silent step stores citations here that its label does not carry."""
    match x:
        case Lift(_):
            return frozenset()
        case PastOut(_, _, k, K, c) | PastIn(_, _, k, K, c):
            ks = stored_causes(c, i)
            return ks | K if k == i else ks
        case RPar(l, r):
            return stored_causes(l, i) | stored_causes(r, i)
        case Res(_, _, b):
            return stored_causes(b, i)
    raise TypeError(x)


def remove_key(x: RProcess, i: Key) -> RProcess:
    """Apply the #i index-forgetting operation to every memory in x."""
    match x:
        case Lift(_):
            return x
        case PastOut() as p:
            return PastOut(p.subj, p.obj, p.key, p.cause, remove_key(p.cont, i))
        case PastIn() as p:
            return PastIn(p.subj, p.var, p.key, p.cause, remove_key(p.cont, i))
        case RPar(l, r):
            return RPar(remove_key(l, i), remove_key(r, i))
        case Res(a, mem, body):
            return Res(a, mem.strip_index(i), remove_key(body, i))
    raise TypeError(x)


def structural_pairs(x: RProcess) -> Set[Tuple[Key, Key]]:
    """(i, j) whenever the executed prefix keyed j sits inside the
    continuation of the executed prefix keyed i."""
    out: Set[Tuple[Key, Key]] = set()

    def go(y: RProcess) -> Set[Key]:
        match y:
            case Lift(_):
                return set()
            case PastOut(key=i, cont=c) | PastIn(key=i, cont=c):
                below = go(c)
                out.update((i, j) for j in below)
                return below | {i}
            case RPar(l, r):
                return go(l) | go(r)
            case Res(body=b):
                return go(b)
        raise TypeError(y)

    go(x)
    return out


def instantiation_related(x: RProcess, k_in: Key, k_act: Key) -> bool:
    """True when the input executed as k_in bound the subject of the prefix
    later executed as k_act (the name carried instantiator k_in)."""

    def inside(y: RProcess) -> bool:
        match y:
            case Lift(_):
                return False
            case PastOut(subj=s, key=i, cont=c) | PastIn(subj=s, key=i, cont=c):
                if i == k_act and s.inst == k_in:
                    return True
                return inside(c)
            case RPar(l, r):
                return inside(l) or inside(r)
            case Res(body=b):
                return inside(b)
        raise TypeError(y)

    def find(y: RProcess) -> bool:
        match y:
            case Lift(_):
                return False
            case PastIn(key=i, cont=c) if i == k_in:
                return inside(c)
            case PastOut(cont=c) | PastIn(cont=c):
                return find(c)
            case RPar(l, r):
                return find(l) or find(r)
            case Res(body=b):
                return find(b)
        raise TypeError(y)

    return find(x)


# ------------------------------------------------------------- substitution


def _fresh_var(base: str, avoid: Set[str]) -> str:
    n = 1
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"


def _sub_name(n: Name, var: str, val: Name) -> Name:
    return val if n == Name(var) else n


def substitute(p: Process, var: str, val: Name) -> Process:
    """Capture-avoiding substitution of val for the plain name var."""
    match p:
        case Nil():
            return p
        case Out(s, o, c):
            return Out(_sub_name(s, var, val), _sub_name(o, var, val),
                       substitute(c, var, val))
        case In(s, v, c):
            s2 = _sub_name(s, var, val)
            if v == var:
                return In(s2, v, c)
            if v == val.base and Name(var) in _proc_names(c):
                v2 = _fresh_var(v, _proc_basenames(c) | {var, val.base})
                c = substitute(c, v, Name(v2))
                return In(s2, v2, substitute(c, var, val))
            return In(s2, v, substitute(c, var, val))
        case Par(l, r):
            return Par(substitute(l, var, val), substitute(r, var, val))
        case New(a, b):
            if a == var:
                return p
            if a == val.base and Name(var) in _proc_names(b):
                a2 = _fresh_var(a, _proc_basenames(b) | {var, val.base})
                b = substitute(b, a, Name(a2))
                return New(a2, substitute(b, var, val))
            return New(a, substitute(b, var, val))
    raise TypeError(p)


def _proc_names(p: Process) -> Set[Name]:
    match p:
        case Nil():
            return set()
        case Out(s, o, c):
            return {s, o} | _proc_names(c)
        case In(s, _, c):
            return {s} | _proc_names(c)
        case Par(l, r):
            return _proc_names(l) | _proc_names(r)
        case New(_, b):
            return _proc_names(b)
    raise TypeError(p)


def _proc_basenames(p: Process) -> Set[str]:
    names = {n.base for n in _proc_names(p)}
    match p:
        case In(var=v, cont=c):
            names |= {v} | _proc_basenames(c)
        case New(name=a, body=b):
            names |= {a} | _proc_basenames(b)
        case Out(cont=c):
            names |= _proc_basenames(c)
        case Par(l, r):
            names |= _proc_basenames(l) | _proc_basenames(r)
    return names


def substitute_r(x: RProcess, var: str, val: Name) -> RProcess:
    """Capture-avoiding substitution on a history-carrying process."""
    match x:
        case Lift(p):
            return Lift(substitute(p, var, val))
        case PastOut(s, o, i, K, c):
            return PastOut(_sub_name(s, var, val), _sub_name(o, var, val),
                           i, K, substitute_r(c, var, val))
        case PastIn(s, v, i, K, c):
            # an executed input is a record, not a binder; a communication
            # substitutes straight through it
            return PastIn(_sub_name(s, var, val), v, i, K,
                          substitute_r(c, var, val))
        case RPar(l, r):
            return RPar(substitute_r(l, var, val), substitute_r(r, var, val))
        case Res(a, mem, b):
            if a == var:
                return x
            if a == val.base and Name(var) in _r_names(b):
                a2 = _fresh_var(a, _r_basenames(b) | {var, val.base})
                b = substitute_r(b, a, Name(a2))
                return Res(a2, mem, substitute_r(b, var, val))
            return Res(a, mem, substitute_r(b, var, val))
    raise TypeError(x)


def _r_names(x: RProcess) -> Set[Name]:
    match x:
        case Lift(p):
            return _proc_names(p)
        case PastOut(s, o, _, _, c):
            return {s, o} | _r_names(c)
        case PastIn(s, _, _, _, c):
            return {s} | _r_names(c)
        case RPar(l, r):
            return _r_names(l) | _r_names(r)
        case Res(body=b):
            return _r_names(b)
    raise TypeError(x)


def _r_basenames(x: RProcess) -> Set[str]:
    match x:
        case Lift(p):
            return _proc_basenames(p)
        case PastOut(s, o, _, _, c):
            return {s.base, o.base} | _r_basenames(c)
        case PastIn(s, v, _, _, c):
            return {s.base, v} | _r_basenames(c)
        case RPar(l, r):
            return _r_basenames(l) | _r_basenames(r)
        case Res(a, _, b):
            return {a} | _r_basenames(b)
    raise TypeError(x)
