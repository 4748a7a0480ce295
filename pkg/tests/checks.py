"""Shared assertions over encoded commits."""

from collections import Counter

from changectx.encoder import ADDED, CONTEXT, REMOVED
from changectx.slicer import slice_distances


def marker_mismatches(commit, rep, config) -> list[str]:
    """Differences between the marked lines and the slices they should come from."""
    cs = commit.changeset
    before_sel = slice_distances(commit.before_pdg, cs.removed, config)
    after_sel = slice_distances(commit.after_pdg, cs.added, config)
    b, a = commit.before.statements, commit.after.statements
    want_plus = Counter(a[i].normalized for i in cs.added if i in after_sel)
    want_minus = Counter(b[i].normalized for i in cs.removed if i in before_sel)
    a2b = {y: x for x, y in cs.matched}
    want_ctx = Counter(
        a[y].normalized for y in sorted(a2b) if y in after_sel or a2b[y] in before_sel
    )
    got = {m: Counter() for m in (ADDED, REMOVED, CONTEXT)}
    for e in rep.entries:
        got[e.marker][e.text] += 1
    problems = []
    for marker, want in ((ADDED, want_plus), (REMOVED, want_minus), (CONTEXT, want_ctx)):
        if got[marker] != want:
            problems.append(f"{marker!r}: got {dict(got[marker])} want {dict(want)}")
    return problems
