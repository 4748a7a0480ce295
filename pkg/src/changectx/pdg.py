"""Program dependence graph: control dependences from post-dominance, data
dependences from reaching definitions, call linkage by callee name."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cfg import ENTRY, EXIT, ControlFlowGraph, build_cfg
from .model import SourceVersion, Statement

CONTROL = "control"
DATA = "data"
OUTPUT = "output"


@dataclass(frozen=True)
class ProgramDependenceGraph:
    version_label: str
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int, str]]
    call_edges: frozenset[tuple[int, int]] = frozenset()
    statements: tuple[Statement, ...] = field(default=(), compare=False, repr=False)

    def dump(self) -> str:
        """One ``from kind to`` triple per line, sorted."""
        rows = [(a, b, k) for a, b, k in self.edges] + [(a, b, "call") for a, b in self.call_edges]
        rows.sort()
        return "".join(f"{a} {k} {b}\n" for a, b, k in rows)

    def method_of(self, sid: int) -> int:
        return self.statements[sid].method


def post_dominators(cfg: ControlFlowGraph) -> dict[int, set[int]]:
    """Post-dominator sets over the CFG augmented with ENTRY -> EXIT."""
    succ = cfg.successors()
    succ.setdefault(ENTRY, []).append(EXIT)
    pred: dict[int, list[int]] = defaultdict(list)
    for a, bs in succ.items():
        for b in bs:
            pred[b].append(a)
    # reverse postorder of the reversed graph, rooted at EXIT
    order: list[int] = []
    seen = {EXIT}
    stack = [(EXIT, iter(pred[EXIT]))]
    while stack:
        node, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            order.append(node)
        elif nxt not in seen:
            seen.add(nxt)
            stack.append((nxt, iter(pred[nxt])))
    order.reverse()
    everything = set(cfg.nodes)
    pdom = {n: set(everything) for n in cfg.nodes}
    pdom[EXIT] = {EXIT}
    changed = True
    while changed:
        changed = False
        for n in order:
            if n == EXIT:
                continue
            ss = [pdom[s] for s in succ.get(n, ())]
            new = set.intersection(*ss) if ss else set()
            new.add(n)
            if new != pdom[n]:
                pdom[n] = new
                changed = True
    return pdom


def _immediate(pdom: dict[int, set[int]]) -> dict[int, Optional[int]]:
    ipdom: dict[int, Optional[int]] = {}
    for n, ds in pdom.items():
        strict = ds - {n}
        ipdom[n] = None
        for d in strict:
            if len(pdom[d]) == len(ds) - 1:
                ipdom[n] = d
                break
    return ipdom


def control_dependences(cfg: ControlFlowGraph, statements: Sequence[Statement] = ()) -> set[tuple[int, int]]:
    """Edges (h, s): s post-dominates some but not all successors of h."""
    pdom = post_dominators(cfg)
    ipdom = _immediate(pdom)
    out: set[tuple[int, int]] = set()
    for a, b in cfg.edges:
        if a == ENTRY or b in pdom[a]:
            continue
        stop = ipdom[a]
        runner: Optional[int] = b
        while runner is not None and runner != stop:
            if runner not in (a, EXIT, ENTRY):
                out.add((a, runner))
            runner = ipdom[runner]
    return out


def reaching_definitions(cfg: ControlFlowGraph, defs: dict[int, frozenset[str]]) -> dict[int, frozenset[tuple[str, int]]]:
    """IN sets of the reaching-definitions fixpoint, keyed by CFG node."""
    succ = cfg.successors()
    pred = cfg.predecessors()
    gen = {n: frozenset((v, n) for v in defs.get(n, ())) for n in cfg.nodes}
    killed_vars = {n: defs.get(n, frozenset()) for n in cfg.nodes}
    in_: dict[int, frozenset] = {n: frozenset() for n in cfg.nodes}
    out: dict[int, frozenset] = {n: gen[n] for n in cfg.nodes}
    work = sorted(cfg.nodes)
    pending = set(work)
    while work:
        n = work.pop(0)
        pending.discard(n)
        new_in = frozenset().union(*(out[p] for p in pred[n])) if pred[n] else frozenset()
        in_[n] = new_in
        kv = killed_vars[n]
        new_out = gen[n] | frozenset(d for d in new_in if d[0] not in kv)
        if new_out != out[n]:
            out[n] = new_out
            for s in succ[n]:
                if s not in pending:
                    pending.add(s)
                    work.append(s)
    return in_


def data_dependences(
    cfg: ControlFlowGraph, statements: Sequence[Statement], *, output: bool = False
) -> set[tuple[int, int]] | tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    """Flow dependences (d, u) for every definition of v at d reaching a use of v at u.

    With ``output=True`` also returns def-def pairs as a second set.
    """
    by_id = {s.id: s for s in statements}
    defs = {sid: s.defs for sid, s in by_id.items() if sid in cfg.nodes}
    in_ = reaching_definitions(cfg, defs)
    flow: set[tuple[int, int]] = set()
    outdeps: set[tuple[int, int]] = set()
    for sid, s in by_id.items():
        if sid not in cfg.nodes:
            continue
        for v, d in in_[sid]:
            if v in s.uses:
                flow.add((d, sid))
            if output and v in s.defs:
                outdeps.add((d, sid))
    return (flow, outdeps) if output else flow


def build_pdg(version: SourceVersion, *, output_deps: bool = False) -> ProgramDependenceGraph:
    edges: set[tuple[int, int, str]] = set()
    statements = version.statements
    for idx, method in enumerate(version.methods):
        stmts = [statements[i] for i in method.statement_ids]
        cfg = build_cfg(method, stmts, idx)
        for a, b in control_dependences(cfg, stmts):
            edges.add((a, b, CONTROL))
        if output_deps:
            flow, outdeps = data_dependences(cfg, stmts, output=True)
            edges.update((a, b, OUTPUT) for a, b in outdeps)
        else:
            flow = data_dependences(cfg, stmts)
        edges.update((a, b, DATA) for a, b in flow)

    entries: dict[str, list[tuple[int, bool]]] = defaultdict(list)
    for m in version.methods:
        if m.entry is not None and not m.synthetic:
            entries[m.name].append((m.entry, bool(m.params)))
    calls: set[tuple[int, int]] = set()
    for s in statements:
        for callee in s.callees:
            for entry, takes_args in entries.get(callee, ()):
                calls.add((s.id, entry))
                if takes_args:  # arguments flow into the parameter definitions
                    edges.add((s.id, entry, DATA))
    return ProgramDependenceGraph(
        version.label,
        frozenset(s.id for s in statements),
        frozenset(edges),
        frozenset(calls),
        statements,
    )


def neighbors(edges: Iterable[tuple[int, int, str]]) -> dict[int, set[int]]:
    out: dict[int, set[int]] = defaultdict(set)
    for a, b, _ in edges:
        out[a].add(b)
        out[b].add(a)
    return out
