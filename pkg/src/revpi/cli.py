"""Command line front end.

Subcommands: parse a term, list or apply transitions on a saved state, run a
scripted trace, drive the property checks, and launch the HTTP service.
States travel as JSON documents so commands compose through files or pipes.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from .jsonio import (
    process_to_json,
    rprocess_from_json,
    rprocess_to_json,
    transition_to_json,
)
from .memory import SemanticsKind
from .semantics import Transition, backward_steps, forward_steps
from .syntax import ParseError, lift, parse, pretty, pretty_r
from .verification import CHECKS, Corpus, CorpusEntry, DEFAULT_CORPUS, run_check

log = logging.getLogger("revpi")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BAD_ID = 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_state(path: str, kind: SemanticsKind):
    """Accept either a serialized state document or a plain source term."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        return rprocess_from_json(json.loads(text))
    return lift(parse(text), kind)


def _enumerate(x, kind: SemanticsKind, direction: str) -> List[Transition]:
    if direction == "fwd":
        return forward_steps(x, kind)
    return backward_steps(x, kind)


def transition_row(i: int, t: Transition) -> dict:
    row = {"id": i}
    row.update(transition_to_json(t))
    row["pretty"] = str(t.label)
    return row


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_parse(args) -> int:
    p = parse(_read(args.file))
    if args.pretty:
        print(pretty(p))
    else:
        _emit(process_to_json(p))
    return EXIT_OK


def _cmd_steps(args) -> int:
    kind = SemanticsKind(args.semantics)
    x = _load_state(args.state, kind)
    ts = _enumerate(x, kind, args.dir)
    log.debug("%d %s transitions from %s", len(ts), args.dir, pretty_r(x))
    _emit([transition_row(i, t) for i, t in enumerate(ts)])
    return EXIT_OK


def _cmd_step(args) -> int:
    kind = SemanticsKind(args.semantics)
    x = _load_state(args.state, kind)
    ts = _enumerate(x, kind, args.dir)
    if not 0 <= args.id < len(ts):
        print(f"transition id {args.id} out of range "
              f"({len(ts)} {args.dir} transitions enabled)", file=sys.stderr)
        return EXIT_BAD_ID
    t = ts[args.id]
    log.info("applied %s", t.label)
    _emit(rprocess_to_json(t.target))
    return EXIT_OK


def _cmd_trace(args) -> int:
    script = json.loads(_read(args.script))
    kind = SemanticsKind(script.get("semantics", "rpi"))
    x = lift(parse(script["source"]), kind)
    applied = []
    for n, step in enumerate(script.get("steps", [])):
        direction = step.get("dir", "fwd")
        ts = _enumerate(x, kind, direction)
        tid = step["id"]
        if not 0 <= tid < len(ts):
            print(f"step {n}: transition id {tid} out of range "
                  f"({len(ts)} {direction} transitions enabled)",
                  file=sys.stderr)
            return EXIT_BAD_ID
        t = ts[tid]
        applied.append(transition_row(tid, t))
        x = t.target
    _emit({"steps": applied, "state": rprocess_to_json(x),
           "pretty": pretty_r(x)})
    return EXIT_OK


def _corpus_from_dir(directory: str, depth: Optional[int]) -> Corpus:
    """One entry per source file; the file's text is the term."""
    entries = []
    for path in sorted(Path(directory).iterdir()):
        if path.is_file():
            entries.append(CorpusEntry(name=path.stem,
                                       source=path.read_text().strip(),
                                       depth=depth or 4))
    if not entries:
        raise ValueError(f"no corpus files in {directory}")
    return Corpus(version=f"dir:{directory}", entries=tuple(entries))


def _cmd_check(args) -> int:
    corpus = (DEFAULT_CORPUS if args.corpus is None
              else _corpus_from_dir(args.corpus, args.depth))
    kind = SemanticsKind(args.semantics) if args.semantics else None
    reports = run_check(args.prop, corpus, kind=kind, depth=args.depth)
    for r in reports:
        print(r.summary(), file=sys.stderr)
    _emit([r.as_dict() for r in reports])
    return EXIT_OK if all(r.ok for r in reports) else EXIT_ERROR


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import app

    uvicorn.run(app, host=args.host, port=args.port,
                log_level=(os.environ.get("RPI_LOG") or "info").lower())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="revpi",
        description="Reversible pi-calculus workbench: step processes "
                    "forward and backward under three causal semantics.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_semantics(p):
        p.add_argument("--semantics", choices=[k.value for k in SemanticsKind],
                       default="rpi", help="memory discipline to run under")

    p = sub.add_parser("parse", help="parse a term and print its JSON form")
    p.add_argument("file", help="source file, or - for stdin")
    p.add_argument("--pretty", action="store_true",
                   help="print the normalized term instead of JSON")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("steps", help="list enabled transitions as JSON")
    add_semantics(p)
    p.add_argument("--state", required=True,
                   help="state document or source term file, - for stdin")
    p.add_argument("--dir", choices=["fwd", "bwd"], default="fwd")
    p.set_defaults(fn=_cmd_steps)

    p = sub.add_parser("step", help="apply one transition by listed id")
    add_semantics(p)
    p.add_argument("--state", required=True)
    p.add_argument("--dir", choices=["fwd", "bwd"], default="fwd")
    p.add_argument("--id", type=int, required=True)
    p.set_defaults(fn=_cmd_step)

    p = sub.add_parser("trace", help="run a scripted sequence of steps")
    p.add_argument("--script", required=True,
                   help='JSON {"source", "semantics", "steps":[{"dir","id"}]}')
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("check", help="run a property check over a corpus")
    p.add_argument("prop", choices=sorted(CHECKS))
    p.add_argument("--semantics",
                   choices=[k.value for k in SemanticsKind], default=None,
                   help="restrict to one semantics (default: all three)")
    p.add_argument("--corpus", default=None,
                   help="directory of source term files (default: built-in)")
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("serve", help="launch the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(fn=_cmd_serve)

    return ap


def main(argv: Optional[List[str]] = None) -> int:
    level = os.environ.get("RPI_LOG")
    if level:
        logging.basicConfig(level=level.upper())
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
