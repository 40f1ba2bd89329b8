"""Corpus-driven property checks: step inversion, commuting squares,
trace-equivalence consistency, erasure bisimulation, and the cause-set
correspondence, each bounded by per-entry depths.

The checks enumerate exhaustively to the bound and report the first
counterexampleverbatim, so a failure is a replayable witness rather than a
statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import bs_oracle, causality, pi_oracle
from .memory import SemanticsKind
from .semantics import Transition, backward_steps, forward_steps
from .syntax import RProcess, fresh_key, lift, parse

ALL_KINDS = (SemanticsKind.RPI, SemanticsKind.BS, SemanticsKind.CVY)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: str
    depth: int = 4
    kinds: Tuple[SemanticsKind, ...] = ALL_KINDS


@dataclass(frozen=True)
class Corpus:
    version: str
    entries: Tuple[CorpusEntry, ...]

    def for_kind(self, kind: SemanticsKind) -> List[CorpusEntry]:
        return [e for e in self.entries if kind in e.kinds]


def _e(name: str, source: str, depth: int = 4) -> CorpusEntry:
    parse(source)  # every entry must parse
    return CorpusEntry(name, source, depth)


DEFAULT_CORPUS = Corpus(
    version="1",
    entries=(
        # worked examples: communication with substitution, the
        # three-extruder race, double extrusion across nested
        # restrictions, and a close that re-erects its restriction
        _e("comm-subst", "b<a> | b(x).x<c>"),
        _e("three-extruders", "new a.(b<a> | c<a> | a(z))"),
        _e("double-extrusion", "new a.(new b.(c<b> | d<a> | b<a>))"),
        _e("close-reopen", "new a.(b<a>.c<a>) | b(x)"),
        # small generated terms: outputs, inputs, sequencing, races
        _e("inert", "0", 2),
        _e("one-out", "b<a>", 2),
        _e("one-in", "b(x)", 2),
        _e("seq2", "b<a>.c<e>", 3),
        _e("par-outs", "b<a> | c<e>", 3),
        _e("race", "b<a> | b(x)", 3),
        _e("seq-after-tau", "b<a>.c<e> | b(x).x(y)"),
        _e("open-simple", "new a.b<a>", 2),
        _e("two-opens", "new a.(b<a> | c<a>)", 3),
        _e("open-then-use", "new a.(b<a> | a(z))", 3),
        _e("close-chain", "new a.(b<a>.a(w)) | b(x).x<c>"),
        _e("prefix-before-close", "k<m>.(new a.(b<a>.d<a>)) | b(x)"),
        _e("reopen-twice", "new a.(b<a>.(d<a> | f<a>)) | b(x)"),
        _e("opens-with-readers", "new a.(b<a> | c<a>) | b(x) | c(y)"),
        _e("subst-subject", "b(x).x<e> | b<a>.a(z)"),
        _e("open-under-prefix", "new a.(b<a>.(c<e> | a(z)))"),
        _e("subst-par", "b(x).(x<c> | d<e>) | b<a>"),
        _e("double-use", "new a.(new b.(c<b> | b<a> | a(z)))"),
        _e("three-party", "b<a>.c<e> | b(x) | c(y)"),
        _e("two-receivers", "b<a> | b(x) | b(y)"),
        _e("chain3", "b<a>.c<e>.d<f>", 3),
    ),
)


@dataclass
class CheckReport:
    prop: str
    kind: Optional[str]
    entries: int = 0
    explored: int = 0
    violations: int = 0
    exhausted: bool = False
    counterexample: Optional[str] = None
    witnesses: List[Sequence[Transition]] = field(default_factory=list,
                                                  repr=False)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        state = "PASS" if self.ok else "FAIL"
        if self.exhausted:
            state += " (budget reached)"
        where = f" [{self.kind}]" if self.kind else ""
        out = (f"{state} {self.prop}{where}: {self.entries} entries, "
               f"{self.explored} explored, {self.violations} violations")
        if self.counterexample:
            out += f"\n  first counterexample: {self.counterexample}"
        return out

    def as_dict(self) -> Dict:
        return {
            "property": self.prop,
            "kind": self.kind,
            "entries": self.entries,
            "explored": self.explored,
            "violations": self.violations,
            "ok": self.ok,
            "exhausted": self.exhausted,
            "counterexample": self.counterexample,
        }

    def _hit(self, text: str, *traces: Sequence[Transition]) -> None:
        self.violations += 1
        if self.counterexample is None:
            self.counterexample = text
            self.witnesses = [list(t) for t in traces]


def _trace_str(trace: Sequence[Transition]) -> str:
    return "; ".join(f"{t.direction} {t.label}" for t in trace)


def _reachable(x: RProcess, kind: SemanticsKind,
               depth: int) -> List[RProcess]:
    seen = {x}
    order = [x]
    frontier = [x]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for t in forward_steps(s, kind):
                if t.target not in seen:
                    seen.add(t.target)
                    order.append(t.target)
                    nxt.append(t.target)
        frontier = nxt
    return order


def check_loop_lemma(corpus: Corpus = DEFAULT_CORPUS,
                     kind: SemanticsKind = SemanticsKind.RPI,
                     depth: Optional[int] = None) -> CheckReport:
    """Every forward step can be undone by a backward step with the same
    label back to its source, and every backward step can be redone."""
    report = CheckReport("loop lemma", kind.value)
    for entry in corpus.for_kind(kind):
        report.entries += 1
        d = min(entry.depth, depth) if depth else entry.depth
        for state in _reachable(lift(parse(entry.source), kind), kind, d):
            for t in forward_steps(state, kind):
                report.explored += 1
                undo = [b for b in backward_steps(t.target, kind)
                        if b.label == t.label and b.target == state]
                if not undo:
                    report._hit(f"{entry.name}: no inverse for fwd "
                                f"{t.label} from {state}", [t])
            for t in backward_steps(state, kind):
                report.explored += 1
                redo = [f for f in forward_steps(t.target, kind,
                                                 key=t.label.key)
                        if f.label == t.label and f.target == state]
                if not redo:
                    report._hit(f"{entry.name}: no inverse for bwd "
                                f"{t.label} from {state}", [t])
    return report


def check_square_lemma(corpus: Corpus = DEFAULT_CORPUS,
                       kind: SemanticsKind = SemanticsKind.RPI,
                       depth: Optional[int] = None) -> CheckReport:
    """Concurrent composable steps commute: for t1: X -> Y then t2: Y -> Z
    not causally related, the opposite order exists with matching labels
    and the same endpoint."""
    report = CheckReport("square lemma", kind.value)
    for entry in corpus.for_kind(kind):
        report.entries += 1
        d = min(entry.depth, depth) if depth else entry.depth
        for state in _reachable(lift(parse(entry.source), kind), kind, d):
            firsts = forward_steps(state, kind) + backward_steps(state, kind)
            for t1 in firsts:
                seconds = (forward_steps(t1.target, kind)
                           + backward_steps(t1.target, kind))
                for t2 in seconds:
                    if not causality.concurrent(t1, t2, kind):
                        continue
                    report.explored += 1
                    if causality.find_square(t1, t2, kind) is None:
                        report._hit(
                            f"{entry.name}: no square for "
                            f"{t1.direction} {t1.label} ; "
                            f"{t2.direction} {t2.label} from {state}",
                            [t1, t2])
    return report


def _all_traces(x: RProcess, kind: SemanticsKind, depth: int,
                cap: int) -> Tuple[List[Tuple[Transition, ...]], bool]:
    traces: List[Tuple[Transition, ...]] = []
    exhausted = False
    stack: List[Tuple[Tuple[Transition, ...], RProcess]] = [((), x)]
    while stack:
        trace, state = stack.pop()
        if len(traces) >= cap:
            exhausted = True
            break
        traces.append(trace)
        if len(trace) == depth:
            continue
        steps = forward_steps(state, kind) + backward_steps(state, kind)
        for t in steps:
            stack.append((trace + (t,), t.target))
    return traces, exhausted


def check_causal_consistency(corpus: Corpus = DEFAULT_CORPUS,
                             kind: SemanticsKind = SemanticsKind.RPI,
                             depth: Optional[int] = None,
                             max_traces: int = 6_000) -> CheckReport:
    """Coinitial traces are cofinal exactly when they are equivalent up to
    square swaps and cancellation.  Within an endpoint group every trace
    must be equivalent to the group's representative; across groups,
    spot-checked pairs must not be."""
    report = CheckReport("causal consistency", kind.value)
    for entry in corpus.for_kind(kind):
        report.entries += 1
        d = min(entry.depth, depth) if depth else entry.depth
        start = lift(parse(entry.source), kind)
        traces, exhausted = _all_traces(start, kind, d, max_traces)
        report.exhausted = report.exhausted or exhausted
        groups: Dict[RProcess, List[Tuple[Transition, ...]]] = {}
        for tr in traces:
            end = tr[-1].target if tr else start
            groups.setdefault(end, []).append(tr)
        for end, group in groups.items():
            rep = group[0]
            for tr in group[1:]:
                report.explored += 1
                verdict = causality.traces_equivalent(list(rep), list(tr),
                                                      kind)
                if verdict is None:
                    report.exhausted = True
                elif not verdict:
                    report._hit(
                        f"{entry.name}: cofinal traces not equivalent: "
                        f"[{_trace_str(rep)}] vs [{_trace_str(tr)}]",
                        rep, tr)
        # soundness direction: equivalent traces must share endpoints, so
        # representatives of different groups must never be equivalent
        reps = [g[0] for g in groups.values() if g[0]]
        for i, r1 in enumerate(reps[:8]):
            for r2 in reps[i + 1:8]:
                report.explored += 1
                if causality.traces_equivalent(list(r1), list(r2), kind):
                    report._hit(
                        f"{entry.name}: non-cofinal traces equivalent: "
                        f"[{_trace_str(r1)}] vs [{_trace_str(r2)}]", r1, r2)
    return report


def check_bisim(corpus: Corpus = DEFAULT_CORPUS,
                kind: SemanticsKind = SemanticsKind.RPI,
                depth: Optional[int] = None) -> CheckReport:
    """Forward behaviour matches the plain-process semantics of the
    erasure, state by state."""
    report = CheckReport("erasure bisimulation", kind.value)
    for entry in corpus.for_kind(kind):
        report.entries += 1
        d = min(entry.depth, depth) if depth else entry.depth
        verdict = pi_oracle.check_forward_bisim(
            lift(parse(entry.source), kind), kind, depth=d)
        report.explored += 1
        if not verdict.ok:
            report._hit(f"{entry.name}: {verdict}")
    return report


def check_bs_correspondence(corpus: Corpus = DEFAULT_CORPUS,
                            depth: int = 3) -> CheckReport:
    """Two-sided structural matching against the causal-term semantics,
    plus coincidence of the induced causal orders."""
    report = CheckReport("cause-set correspondence", SemanticsKind.BS.value)
    for entry in corpus.for_kind(SemanticsKind.BS):
        report.entries += 1
        d = min(entry.depth, depth)
        structural = bs_oracle.check_structural_correspondence(
            parse(entry.source), depth=d)
        causal = bs_oracle.check_causal_correspondence(
            parse(entry.source), depth=d)
        report.explored += 2
        report.exhausted = (report.exhausted or structural.exhausted
                            or causal.exhausted)
        if not structural.ok:
            report._hit(f"{entry.name}: {structural.detail}")
        if not causal.ok:
            report._hit(f"{entry.name}: {causal.detail}")
    return report


CHECKS = {
    "loop": check_loop_lemma,
    "square": check_square_lemma,
    "consistency": check_causal_consistency,
    "bisim": check_bisim,
    "bs-corr": check_bs_correspondence,
}


def run_check(name: str, corpus: Corpus = DEFAULT_CORPUS,
              kind: Optional[SemanticsKind] = None,
              depth: Optional[int] = None) -> List[CheckReport]:
    """Run one named check; kind=None fans out over all kinds."""
    if name == "bs-corr":
        return [check_bs_correspondence(corpus, depth=depth or 3)]
    check = CHECKS[name]
    kinds = [kind] if kind else list(ALL_KINDS)
    return [check(corpus, k, depth=depth) for k in kinds]
