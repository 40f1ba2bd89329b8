"""HTTP session service for interactive exploration.

Sessions live in memory.  Each holds a term, its trace, and a monotonic key
counter; forward enumeration stamps the counter value so keys stay unique
across undo/redo (the engine's canonical numbering would reuse a freed key).
Transition ids are content tokens: direction, list position, and a digest of
the wire form.  A stale token no longer matches the current enumeration and
is rejected with 409.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import threading
import uuid
from dataclasses import dataclass, field
from typing import Dict, List

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .bs_oracle import k_f_of
from .causality import causality_edges
from .jsonio import rprocess_to_json, transition_to_json
from .memory import SemanticsKind
from .semantics import Transition, backward_steps, forward_steps
from .syntax import ParseError, RProcess, lift, parse, pretty_r

log = logging.getLogger("revpi.server")

_TOKEN = re.compile(r"^(fwd|bwd)(\d+)-([0-9a-f]{8})$")


def transition_token(direction: str, pos: int, t: Transition) -> str:
    blob = json.dumps(transition_to_json(t), sort_keys=True)
    return f"{direction}{pos}-{hashlib.sha1(blob.encode()).hexdigest()[:8]}"


@dataclass
class Session:
    id: str
    kind: SemanticsKind
    source: str
    initial: RProcess
    current: RProcess
    key_counter: int = 0
    trace: List[Transition] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def enabled(self, direction: str) -> List[Transition]:
        if direction == "fwd":
            return forward_steps(self.current, self.kind,
                                 key=self.key_counter)
        return backward_steps(self.current, self.kind)

    def replay(self) -> RProcess:
        x = self.initial
        for t in self.trace:
            if t.source != x:
                raise RuntimeError(f"trace broken at key {t.label.key}")
            x = t.target
        return x

    def check_replay(self) -> None:
        if self.replay() != self.current:
            raise RuntimeError("replayed trace does not reach current state")


def transition_row(direction: str, pos: int, t: Transition) -> dict:
    row = {"id": transition_token(direction, pos, t)}
    row.update(transition_to_json(t))
    row["pretty"] = str(t.label)
    return row


class CreateSession(BaseModel):
    source: str
    semantics: str = "rpi"


class StepRequest(BaseModel):
    transition_id: str


def state_doc(s: Session) -> dict:
    return {"id": s.id, "semantics": s.kind.value, "source": s.source,
            "state": rprocess_to_json(s.current),
            "pretty": pretty_r(s.current),
            "key_counter": s.key_counter, "trace_len": len(s.trace)}


def create_app() -> FastAPI:
    app = FastAPI(title="revpi session service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: Dict[str, Session] = {}
    store_lock = threading.Lock()

    def get_session(sid: str) -> Session:
        with store_lock:
            s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid}")
        return s

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSession):
        try:
            kind = SemanticsKind(req.semantics)
        except ValueError:
            raise HTTPException(400, f"unknown semantics {req.semantics!r}")
        try:
            x = lift(parse(req.source), kind)
        except ParseError as exc:
            raise HTTPException(400, f"malformed source: {exc}")
        s = Session(id=uuid.uuid4().hex[:12], kind=kind, source=req.source,
                    initial=x, current=x)
        with store_lock:
            sessions[s.id] = s
        log.info("session %s created (%s): %s", s.id, kind.value, req.source)
        return state_doc(s)

    @app.get("/sessions/{sid}/state")
    def get_state(sid: str):
        s = get_session(sid)
        with s.lock:
            return state_doc(s)

    @app.get("/sessions/{sid}/transitions")
    def get_transitions(sid: str, dir: str = "fwd"):
        if dir not in ("fwd", "bwd"):
            raise HTTPException(400, f"dir must be fwd or bwd, got {dir!r}")
        s = get_session(sid)
        with s.lock:
            rows = [transition_row(dir, i, t)
                    for i, t in enumerate(s.enabled(dir))]
        return {"dir": dir, "transitions": rows}

    @app.post("/sessions/{sid}/step")
    def step(sid: str, req: StepRequest):
        m = _TOKEN.match(req.transition_id)
        if m is None:
            raise HTTPException(400,
                                f"malformed transition id {req.transition_id!r}")
        direction, pos = m.group(1), int(m.group(2))
        s = get_session(sid)
        with s.lock:
            ts = s.enabled(direction)
            if (pos >= len(ts)
                    or transition_token(direction, pos, ts[pos])
                    != req.transition_id):
                raise HTTPException(409, "transition no longer enabled")
            t = ts[pos]
            s.current = t.target
            s.trace.append(t)
            if direction == "fwd":
                s.key_counter += 1
            s.check_replay()
            log.info("session %s: applied %s", s.id, t.label)
            doc = state_doc(s)
            doc["applied"] = transition_row(direction, pos, t)
        return doc

    @app.get("/sessions/{sid}/trace")
    def get_trace(sid: str):
        s = get_session(sid)
        with s.lock:
            entries = []
            for t in s.trace:
                row = transition_to_json(t)
                row["pretty"] = str(t.label)
                kf = k_f_of(t) if t.direction == "fwd" else None
                row["k_f"] = list(kf) if kf is not None else None
                entries.append(row)
            return {"id": s.id, "semantics": s.kind.value,
                    "source": s.source, "entries": entries}

    @app.get("/sessions/{sid}/causality")
    def get_causality(sid: str):
        s = get_session(sid)
        with s.lock:
            nodes = [{"id": i, "key": t.label.key, "dir": t.direction,
                      "label": str(t.label)}
                     for i, t in enumerate(s.trace)]
            edges = [e for e in causality_edges(s.trace, s.kind)
                     if e["type"] in ("structural", "object")]
        return {"nodes": nodes, "edges": edges}

    @app.get("/sessions/{sid}/replay")
    def get_replay(sid: str):
        s = get_session(sid)
        with s.lock:
            try:
                replayed = s.replay()
            except RuntimeError as exc:
                raise HTTPException(500, str(exc))
            return {"ok": replayed == s.current,
                    "state": rprocess_to_json(replayed),
                    "pretty": pretty_r(replayed)}

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        with store_lock:
            if sid not in sessions:
                raise HTTPException(404, f"unknown session {sid}")
            del sessions[sid]
        log.info("session %s deleted", sid)

    return app


app = create_app()
