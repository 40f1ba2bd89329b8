"""Extrusion memories attached to restrictions.

A restriction in a history-carrying process is written ``new a{m}. X`` where
``m`` records which past actions extruded ``a``.  Three interchangeable
memory structures are provided; picking one picks a causal semantics for
name extrusion:

- ``rpi``: a plain set of keys.  Any one recorded extruder can be cited as
  the cause of a later action on the name, and the citation can be swapped
  for another extruder.
- ``bs``: a set plus a single index ``w`` remembering the first extruder.
  The first extruder causes everything that later crosses the restriction.
- ``cvy``: a set plus a set-valued index that accumulates every extruder;
  all of them cause later crossings.

All operations are pure; a Memory is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Set, Union

STAR = "*"

Key = int
# a key position that may hold the undefined marker
KeyStar = Union[int, str]


class SemanticsKind(str, Enum):
    RPI = "rpi"
    BS = "bs"
    CVY = "cvy"


def star_sort_key(k: KeyStar):
    """Sort order with ``*`` first, then keys ascending."""
    return (0, -1) if k == STAR else (1, k)


def format_keyset(ks) -> str:
    return "{" + ",".join(str(k) for k in sorted(ks, key=star_sort_key)) + "}"


@dataclass(frozen=True)
class Memory:
    """One restriction's extrusion record.

    gamma holds the keys of past extrusions of the restricted name.  w and
    omega are only meaningful for the bs / cvy kinds respectively; they are
    kept at their initial values otherwise so equality stays structural.
    """

    kind: SemanticsKind
    gamma: FrozenSet[Key] = frozenset()
    w: KeyStar = STAR
    omega: FrozenSet[KeyStar] = field(default_factory=lambda: frozenset({STAR}))

    def __post_init__(self):
        if self.w != STAR and self.w not in self.gamma:
            raise ValueError(f"index {self.w!r} not among recorded keys")
        if not (self.omega - {STAR} <= self.gamma):
            raise ValueError("index set mentions unrecorded keys")

    @property
    def empty(self) -> bool:
        """True when no extrusion has been recorded (fresh restriction)."""
        return not self.gamma

    def add(self, i: Key) -> "Memory":
        """Record extrusion i (the + operation)."""
        g = self.gamma | {i}
        if self.kind is SemanticsKind.BS:
            return replace(self, gamma=g, w=i if self.w == STAR else self.w)
        if self.kind is SemanticsKind.CVY:
            return replace(self, gamma=g, omega=self.omega | {i})
        return replace(self, gamma=g)

    def contains(self, i: Key) -> bool:
        return i in self.gamma

    def strip_index(self, i: Key) -> "Memory":
        """Forget i in the index positions only (the #i operation).

        The key stays in gamma; a closed private channel still remembers who
        extruded it, but the extrusion no longer causes anything.
        """
        if self.kind is SemanticsKind.BS and self.w == i:
            return replace(self, w=STAR)
        if self.kind is SemanticsKind.CVY:
            return replace(self, omega=self.omega - {i})
        return self

    def pop(self, i: Key) -> "Memory":
        """Remove every trace of i (undoing the extrusion recorded as i)."""
        g = self.gamma - {i}
        w = STAR if self.w == i else self.w
        return replace(self, gamma=g, w=w, omega=self.omega - {i})

    def __str__(self) -> str:
        if self.kind is SemanticsKind.BS:
            return f"{format_keyset(self.gamma)}_{self.w}"
        if self.kind is SemanticsKind.CVY:
            return f"{format_keyset(self.gamma)}_{format_keyset(self.omega)}"
        return format_keyset(self.gamma)


def init(kind: SemanticsKind) -> Memory:
    return Memory(kind=SemanticsKind(kind))


def update_candidates(m: Memory, K: FrozenSet[KeyStar]) -> Set[FrozenSet[KeyStar]]:
    """Cause sets a label with cause K may leave with after crossing new a{m}
    when a is the label's *object* (an extrusion about to be recorded).

    rpi and cvy keep K unchanged; bs adds the first-extruder index.
    """
    if m.kind is SemanticsKind.BS:
        return {K | {m.w}}
    return {K}


def cause_candidates(
    kind: SemanticsKind, m: Memory, K: FrozenSet[KeyStar], x=None
) -> Set[FrozenSet[KeyStar]]:
    """Cause sets a label with cause K may leave with after crossing new a{m}
    when a is the label's *subject* (using an already-extruded name).

    Requires a recorded extrusion.  For rpi the crossing must commit to one
    concrete past extruder; a previously committed choice {k} may be kept or
    retargeted to an instantiation-related extruder (x is the process under
    the restriction, consulted for that relation).
    """
    if m.empty:
        return set()
    if kind is SemanticsKind.BS:
        return {K | {m.w}}
    if kind is SemanticsKind.CVY:
        return {K | m.omega}
    # rpi
    if K == frozenset({STAR}):
        return {frozenset({k}) for k in m.gamma}
    if len(K) == 1:
        (k,) = K
        out: Set[FrozenSet[KeyStar]] = set()
        if k in m.gamma:
            out.add(K)
        if x is not None:
            from .syntax import instantiation_related

            for k2 in m.gamma:
                if k2 != k and instantiation_related(x, k, k2):
                    out.add(frozenset({k2}))
        return out
    return set()
