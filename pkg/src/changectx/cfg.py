"""Per-method control-flow graphs at statement granularity."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import Guarded, If, Labeled, Loop, MethodUnit, Simple, Statement, Switch, Try, tree_ids

log = logging.getLogger(__name__)

ENTRY = -1
EXIT = -2


@dataclass(frozen=True)
class ControlFlowGraph:
    method: int
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def successors(self) -> dict[int, list[int]]:
        succ: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return succ

    def predecessors(self) -> dict[int, list[int]]:
        pred: dict[int, list[int]] = {n: [] for n in self.nodes}
        for a, b in sorted(self.edges):
            pred[b].append(a)
        return pred


@dataclass
class _Frame:
    kind: str  # loop | switch | label
    label: Optional[str]
    brk: int
    cont: Optional[int] = None


class _Builder:
    def __init__(self) -> None:
        self.edges: set[tuple[int, int]] = set()
        self.frames: list[_Frame] = []
        self.diagnostics: list[str] = []

    def edge(self, a: int, b: int) -> None:
        self.edges.add((a, b))

    def seq(self, nodes: Iterable, nxt: int) -> int:
        entry = nxt
        for node in reversed(tuple(nodes)):
            entry = self.node(node, entry)
        return entry

    def node(self, n, nxt: int, label: Optional[str] = None) -> int:
        if isinstance(n, Simple):
            self.edge(n.sid, self._jump_target(n, nxt))
            return n.sid
        if isinstance(n, If):
            then = self.seq(n.then, nxt)
            other = self.seq(n.orelse, nxt) if n.orelse is not None else nxt
            self.edge(n.header, then)
            self.edge(n.header, other)
            return n.header
        if isinstance(n, Loop):
            self.frames.append(_Frame("loop", label, nxt, n.header))
            body = self.seq(n.body, n.header)
            self.frames.pop()
            self.edge(n.header, body)
            self.edge(n.header, nxt)
            return body if n.post_test else n.header
        if isinstance(n, Switch):
            return self._switch(n, nxt, label)
        if isinstance(n, Try):
            return self._try(n, nxt)
        if isinstance(n, Guarded):
            self.edge(n.header, self.seq(n.body, nxt))
            return n.header
        if isinstance(n, Labeled):
            if len(n.body) == 1 and isinstance(n.body[0], (Loop, Switch)):
                return self.node(n.body[0], nxt, label=n.label)
            self.frames.append(_Frame("label", n.label, nxt))
            entry = self.seq(n.body, nxt)
            self.frames.pop()
            return entry
        raise TypeError(f"unknown statement node {n!r}")

    def _jump_target(self, n: Simple, nxt: int) -> int:
        if n.jump in ("return", "throw"):
            return EXIT
        if n.jump == "break":
            for f in reversed(self.frames):
                if (n.target is None and f.kind in ("loop", "switch")) or (n.target is not None and f.label == n.target):
                    return f.brk
        elif n.jump == "continue":
            for f in reversed(self.frames):
                if f.kind == "loop" and (n.target is None or f.label == n.target):
                    return f.cont
        else:
            return nxt
        msg = f"UnstructuredJump: statement {n.sid}: {n.jump} {n.target or ''} has no enclosing target; edge to EXIT".strip()
        self.diagnostics.append(msg)
        log.warning(msg)
        return EXIT

    def _switch(self, n: Switch, nxt: int, label: Optional[str]) -> int:
        self.frames.append(_Frame("switch", label, nxt))
        entries = [0] * len(n.cases)
        fall = nxt
        for k in range(len(n.cases) - 1, -1, -1):
            case = n.cases[k]
            entries[k] = self.seq(case.body, nxt if case.arrow else fall)
            fall = entries[k]
        self.frames.pop()
        order = [k for k, c in enumerate(n.cases) if not c.is_default]
        order += [k for k, c in enumerate(n.cases) if c.is_default]
        for pos, k in enumerate(order):
            case = n.cases[k]
            self.edge(case.label, entries[k])
            if not case.is_default:
                fail = n.cases[order[pos + 1]].label if pos + 1 < len(order) else nxt
                self.edge(case.label, fail)
        self.edge(n.header, n.cases[order[0]].label if order else nxt)
        return n.header

    def _try(self, n: Try, nxt: int) -> int:
        after = self.seq(n.final, nxt) if n.final is not None else nxt
        body = self.seq(n.body, after)
        for c in n.catches:
            self.edge(c.header, self.seq(c.body, after))
            self.edge(c.header, after)
        covered = tree_ids(n.body)
        if n.resources is not None:
            covered.append(n.resources)
        for sid in covered:
            for c in n.catches:
                self.edge(sid, c.header)
        entry = body
        if n.resources is not None:
            self.edge(n.resources, body)
            entry = n.resources
        elif not covered and n.catches:
            # nothing can throw; keep handlers reachable as a chain
            for a, b in zip(n.catches, n.catches[1:]):
                self.edge(a.header, b.header)
            entry = n.catches[0].header
        return entry


def build_cfg(method: MethodUnit, statements: Optional[Iterable[Statement]] = None, method_index: int = -1) -> ControlFlowGraph:
    """Control-flow graph of ``method`` over its statement ids plus ENTRY/EXIT."""
    statements = list(statements) if statements is not None else None
    b = _Builder()
    body = b.seq(method.body, EXIT)
    if method.entry is not None:
        b.edge(ENTRY, method.entry)
        b.edge(method.entry, body)
    else:
        b.edge(ENTRY, body)
    nodes = set(method.statement_ids) | {ENTRY, EXIT}
    if statements is not None:
        nodes |= {s.id for s in statements}
    if method_index < 0 and statements:
        method_index = statements[0].method
    return ControlFlowGraph(method_index, frozenset(nodes), frozenset(b.edges), tuple(b.diagnostics))


def reachable(succ: dict[int, list[int]], start: int, blocked: Optional[int] = None) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        n = stack.pop()
        for m in succ.get(n, ()):
            if m != blocked and m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def edges_by_node(edges: Iterable[tuple[int, int]]) -> dict[int, list[int]]:
    out: dict[int, list[int]] = defaultdict(list)
    for a, b in edges:
        out[a].append(b)
    return out
