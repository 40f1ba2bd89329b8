"""JSON wire formats shared by the CLI and the HTTP service.

Cause sets serialize as lists with "*" first and keys ascending; memories
carry only the index fields their semantics actually uses.
"""

from __future__ import annotations

from typing import Any, Dict, List, Union

from .memory import STAR, Memory, SemanticsKind, star_sort_key
from .semantics import BoutA, InA, Label, OutA, TauA, Transition
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
    Res,
    RProcess,
)

Json = Dict[str, Any]


def keyset_to_json(K) -> List[Union[str, int]]:
    return sorted(K, key=star_sort_key)


def keyset_from_json(xs) -> frozenset:
    return frozenset(xs)


def memory_to_json(m: Memory) -> Json:
    out: Json = {"kind": m.kind.value, "gamma": sorted(m.gamma)}
    if m.kind is SemanticsKind.BS:
        out["w"] = m.w
    if m.kind is SemanticsKind.CVY:
        out["omega"] = keyset_to_json(m.omega)
    return out


def memory_from_json(d: Json) -> Memory:
    kind = SemanticsKind(d["kind"])
    return Memory(kind=kind,
                  gamma=frozenset(d["gamma"]),
                  w=d.get("w", STAR),
                  omega=keyset_from_json(d.get("omega", [STAR])))


def name_to_json(n: Name) -> Json:
    return {"base": n.base, "inst": n.inst}


def name_from_json(d: Json) -> Name:
    return Name(d["base"], d.get("inst", STAR))


def action_to_json(a) -> Json:
    if isinstance(a, OutA):
        return {"type": "out", "subj": a.subj, "obj": name_to_json(a.obj)}
    if isinstance(a, InA):
        return {"type": "in", "subj": a.subj, "var": a.var}
    if isinstance(a, BoutA):
        return {"type": "bout", "subj": a.subj, "obj": a.obj,
                "mem": memory_to_json(a.mem)}
    if isinstance(a, TauA):
        return {"type": "tau"}
    raise TypeError(a)


def action_from_json(d: Json):
    match d["type"]:
        case "out":
            return OutA(d["subj"], name_from_json(d["obj"]))
        case "in":
            return InA(d["subj"], d["var"])
        case "bout":
            return BoutA(d["subj"], d["obj"], memory_from_json(d["mem"]))
        case "tau":
            return TauA()
    raise ValueError(d["type"])


def label_to_json(l: Label) -> Json:
    return {"key": l.key, "cause": keyset_to_json(l.cause), "inst": l.inst,
            "action": action_to_json(l.action)}


def label_from_json(d: Json) -> Label:
    return Label(d["key"], keyset_from_json(d["cause"]), d["inst"],
                 action_from_json(d["action"]))


def transition_to_json(t: Transition) -> Json:
    out = label_to_json(t.label)
    out["dir"] = t.direction
    return out


def process_to_json(p: Process) -> Json:
    match p:
        case Nil():
            return {"t": "nil"}
        case Out(s, o, c):
            return {"t": "out", "subj": name_to_json(s),
                    "obj": name_to_json(o), "cont": process_to_json(c)}
        case In(s, v, c):
            return {"t": "in", "subj": name_to_json(s), "var": v,
                    "cont": process_to_json(c)}
        case Par(l, r):
            return {"t": "par", "left": process_to_json(l),
                    "right": process_to_json(r)}
        case New(a, b):
            return {"t": "new", "name": a, "body": process_to_json(b)}
    raise TypeError(p)


def process_from_json(d: Json) -> Process:
    match d["t"]:
        case "nil":
            return Nil()
        case "out":
            return Out(name_from_json(d["subj"]), name_from_json(d["obj"]),
                       process_from_json(d["cont"]))
        case "in":
            return In(name_from_json(d["subj"]), d["var"],
                      process_from_json(d["cont"]))
        case "par":
            return Par(process_from_json(d["left"]),
                       process_from_json(d["right"]))
        case "new":
            return New(d["name"], process_from_json(d["body"]))
    raise ValueError(d["t"])


def rprocess_to_json(x: RProcess) -> Json:
    match x:
        case Lift(p):
            return {"t": "lift", "proc": process_to_json(p)}
        case PastOut(s, o, i, K, c):
            return {"t": "pastout", "subj": name_to_json(s),
                    "obj": name_to_json(o), "key": i,
                    "cause": keyset_to_json(K), "cont": rprocess_to_json(c)}
        case PastIn(s, v, i, K, c):
            return {"t": "pastin", "subj": name_to_json(s), "var": v,
                    "key": i, "cause": keyset_to_json(K),
                    "cont": rprocess_to_json(c)}
        case RPar(l, r):
            return {"t": "rpar", "left": rprocess_to_json(l),
                    "right": rprocess_to_json(r)}
        case Res(a, mem, b):
            return {"t": "res", "name": a, "mem": memory_to_json(mem),
                    "body": rprocess_to_json(b)}
    raise TypeError(x)


def rprocess_from_json(d: Json) -> RProcess:
    match d["t"]:
        case "lift":
            return Lift(process_from_json(d["proc"]))
        case "pastout":
            return PastOut(name_from_json(d["subj"]),
                           name_from_json(d["obj"]), d["key"],
                           keyset_from_json(d["cause"]),
                           rprocess_from_json(d["cont"]))
        case "pastin":
            return PastIn(name_from_json(d["subj"]), d["var"], d["key"],
                          keyset_from_json(d["cause"]),
                          rprocess_from_json(d["cont"]))
        case "rpar":
            return RPar(rprocess_from_json(d["left"]),
                        rprocess_from_json(d["right"]))
        case "res":
            return Res(d["name"], memory_from_json(d["mem"]),
                       rprocess_from_json(d["body"]))
    raise ValueError(d["t"])
