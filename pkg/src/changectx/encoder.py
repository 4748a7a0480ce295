"""Context-encoded representation of a change.

Removed statements are sliced in the before-PDG, added statements in the
after-PDG. The two slices are merged into one marked sequence: ``+`` for
added, ``-`` for removed, a blank marker for unchanged context that appears in
either slice (emitted once). Rendering is ``"<marker> <text>"`` per line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

from .differ import ChangeSet
from .model import SourceVersion, Statement
from .pdg import ProgramDependenceGraph
from .slicer import SliceConfig, slice_distances

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 512
ADDED, REMOVED, CONTEXT = "+", "-", " "


@dataclass(frozen=True)
class Entry:
    marker: str
    text: str
    hops: int = 0
    before_id: Optional[int] = None
    after_id: Optional[int] = None

    @property
    def tokens(self) -> int:
        return (0 if self.marker == CONTEXT else 1) + len(self.text.split())

    def render(self) -> str:
        return f"{self.marker} {self.text}"


@dataclass(frozen=True)
class ContextEncodedRepresentation:
    entries: tuple[Entry, ...] = ()
    token_count: int = 0
    truncated: bool = False
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def render(self) -> str:
        return "".join(e.render() + "\n" for e in self.entries)

    def __str__(self) -> str:
        return self.render()


def count_tokens(text: str) -> int:
    """Whitespace-delimited lexemes of a rendered representation."""
    return len(text.split())


def merge_entries(
    before: tuple[Statement, ...],
    after: tuple[Statement, ...],
    changeset: ChangeSet,
    before_sel: dict[int, int],
    after_sel: dict[int, int],
) -> list[Entry]:
    """Order the selected statements of both versions into one sequence.

    ``*_sel`` map statement id to hop distance. Added and unchanged statements
    sit at their after-version position; a removed statement goes right
    after its nearest matched predecessor in the same file.
    """
    b2a = dict(changeset.matched)
    a2b = {a: b for b, a in changeset.matched}
    keyed: list[tuple[tuple, Entry]] = []
    emitted_pairs: set[int] = set()

    for aid, hops in after_sel.items():
        s = after[aid]
        if aid in changeset.added:
            keyed.append(((s.path, aid, 0, 0), Entry(ADDED, s.normalized, 0, None, aid)))
        elif aid in a2b:
            bid = a2b[aid]
            h = min(hops, before_sel.get(bid, hops))
            keyed.append(((s.path, aid, 0, 0), Entry(CONTEXT, s.normalized, h, bid, aid)))
            emitted_pairs.add(bid)

    # matched predecessor lookup per file, by before id
    matched_sorted = sorted(changeset.matched)
    for bid, hops in before_sel.items():
        s = before[bid]
        if bid in changeset.removed:
            pred = _nearest_matched(matched_sorted, bid, s.path, before)
            keyed.append(((s.path, pred, 1, bid), Entry(REMOVED, s.normalized, 0, bid, None)))
        elif bid in b2a and bid not in emitted_pairs:
            aid = b2a[bid]
            keyed.append(((s.path, aid, 0, 0), Entry(CONTEXT, s.normalized, hops, bid, aid)))
    keyed.sort(key=lambda kv: kv[0])
    return [e for _, e in keyed]


def _nearest_matched(matched_sorted, bid: int, path: str, before) -> int:
    best = -1
    for b, a in matched_sorted:
        if b >= bid:
            break
        if before[b].path == path:
            best = a
    return best


def truncate(rep: ContextEncodedRepresentation, budget: int = DEFAULT_BUDGET) -> ContextEncodedRepresentation:
    """Fit ``rep`` into ``budget`` tokens.

    Unmarked context goes first, farthest hop first (later lines first on
    ties); then marked lines from the end. A single remaining line is never
    dropped: if it alone exceeds the budget the result stays over budget with
    ``truncated`` set.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if rep.token_count <= budget:
        return rep
    entries = list(rep.entries)
    total = rep.token_count
    keep = [True] * len(entries)
    context = sorted(
        (i for i, e in enumerate(entries) if e.marker == CONTEXT),
        key=lambda i: (-entries[i].hops, -i),
    )
    marked = sorted((i for i, e in enumerate(entries) if e.marker != CONTEXT), reverse=True)
    remaining = len(entries)
    for i in context + marked:
        if total <= budget or remaining <= 1:
            break
        keep[i] = False
        total -= entries[i].tokens
        remaining -= 1
    kept = tuple(e for e, k in zip(entries, keep) if k)
    return replace(rep, entries=kept, token_count=total, truncated=True)


def _build(entries, budget: int, diagnostics=()) -> ContextEncodedRepresentation:
    rep = ContextEncodedRepresentation(tuple(entries), sum(e.tokens for e in entries), False, tuple(diagnostics))
    return truncate(rep, budget)


def encode_change(
    before_pdg: ProgramDependenceGraph,
    after_pdg: ProgramDependenceGraph,
    changeset: ChangeSet,
    config: Optional[SliceConfig] = None,
    budget: int = DEFAULT_BUDGET,
    *,
    context: bool = True,
) -> ContextEncodedRepresentation:
    """Build the representation; ``context=False`` keeps changed lines only."""
    if changeset.empty:
        msg = "EmptyChange: no added or removed statements"
        log.info(msg)
        return ContextEncodedRepresentation(diagnostics=(msg,))
    config = config or SliceConfig()
    if context:
        before_sel = slice_distances(before_pdg, changeset.removed, config)
        after_sel = slice_distances(after_pdg, changeset.added, config)
    else:
        before_sel = {i: 0 for i in changeset.removed}
        after_sel = {i: 0 for i in changeset.added}
    entries = merge_entries(before_pdg.statements, after_pdg.statements, changeset, before_sel, after_sel)
    return _build(entries, budget)


def encode_surrounding(
    before: SourceVersion,
    after: SourceVersion,
    changeset: ChangeSet,
    window: int = 3,
    budget: int = DEFAULT_BUDGET,
) -> ContextEncodedRepresentation:
    """Baseline: changed lines plus ``window`` statements on each side, per file."""
    if changeset.empty:
        return ContextEncodedRepresentation(diagnostics=("EmptyChange: no added or removed statements",))
    before_sel = _window(before, changeset.removed, window)
    after_sel = _window(after, changeset.added, window)
    entries = merge_entries(before.statements, after.statements, changeset, before_sel, after_sel)
    return _build(entries, budget)


def _window(version: SourceVersion, seeds, window: int) -> dict[int, int]:
    sel: dict[int, int] = {}
    for sid in sorted(seeds):
        path = version.statements[sid].path
        for k in range(sid - window, sid + window + 1):
            if 0 <= k < len(version.statements) and version.statements[k].path == path:
                d = abs(k - sid)
                if k not in sel or d < sel[k]:
                    sel[k] = d
    return sel
