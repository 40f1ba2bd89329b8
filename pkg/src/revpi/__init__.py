"""Workbench for a reversible pi-calculus with pluggable extrusion memories.

One transition engine, three memory structures for extruded names (rpi, bs,
cvy), causality analysis over the generated transitions, two independent
oracles (a standard pi-calculus LTS and a causal-term reconstruction for the
bs semantics), metatheory checkers, a CLI and an HTTP session service.
"""

from .memory import STAR, Memory, SemanticsKind, init as init_memory

__all__ = ["STAR", "Memory", "SemanticsKind", "init_memory"]
__version__ = "0.1.0"
