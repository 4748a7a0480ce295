"""Statement-level alignment of two versions of a commit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import SourceVersion


@dataclass(frozen=True)
class ChangeSet:
    added: frozenset[int]
    removed: frozenset[int]
    matched: frozenset[tuple[int, int]]

    @property
    def empty(self) -> bool:
        return not self.added and not self.removed

    @property
    def size(self) -> int:
        return len(self.added) + len(self.removed)


def lcs_pairs(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    """Index pairs of a longest common subsequence of ``a`` and ``b``.

    Common prefix and suffix are peeled off first; the middle goes through
    Myers' O(ND) greedy search with a stored trace for backtracking.
    """
    n, m = len(a), len(b)
    pre = 0
    while pre < n and pre < m and a[pre] == b[pre]:
        pre += 1
    suf = 0
    while suf < n - pre and suf < m - pre and a[n - 1 - suf] == b[m - 1 - suf]:
        suf += 1
    pairs = [(i, i) for i in range(pre)]
    mid = _myers(a[pre : n - suf], b[pre : m - suf])
    pairs.extend((i + pre, j + pre) for i, j in mid)
    pairs.extend((n - suf + k, m - suf + k) for k in range(suf))
    return pairs


def _myers(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return []
    offset = n + m + 1
    v = [0] * (2 * offset + 2)
    trace: list[list[int]] = []
    for d in range(n + m + 1):
        # snapshot of diagonals -(d+1)..d+1, all that step d reads
        trace.append(v[offset - d - 1 : offset + d + 2])
        for k in range(-d, d + 1, 2):
            if k == -d or (k != d and v[offset + k - 1] < v[offset + k + 1]):
                x = v[offset + k + 1]  # step down: insertion
            else:
                x = v[offset + k - 1] + 1  # step right: deletion
            y = x - k
            while x < n and y < m and a[x] == b[y]:
                x += 1
                y += 1
            v[offset + k] = x
            if x >= n and y >= m:
                return _backtrack(trace, a, b, d)
    raise AssertionError("unreachable")


def _backtrack(trace, a, b, d_end) -> list[tuple[int, int]]:
    x, y = len(a), len(b)
    pairs: list[tuple[int, int]] = []
    for d in range(d_end, 0, -1):
        v = trace[d]
        base = d + 1
        k = x - y
        if k == -d or (k != d and v[base + k - 1] < v[base + k + 1]):
            prev_k = k + 1
        else:
            prev_k = k - 1
        prev_x = v[base + prev_k]
        prev_y = prev_x - prev_k
        while x > prev_x and y > prev_y:
            x -= 1
            y -= 1
            pairs.append((x, y))
        x, y = prev_x, prev_y
    while x > 0 and y > 0:
        x -= 1
        y -= 1
        pairs.append((x, y))
    pairs.reverse()
    return pairs


def align_versions(before: SourceVersion, after: SourceVersion) -> ChangeSet:
    """Match statements per file by LCS over normalized text."""
    added: set[int] = set()
    removed: set[int] = set()
    matched: set[tuple[int, int]] = set()
    paths = sorted(set(before.paths) | set(after.paths))
    for path in paths:
        bs = before.file_statements(path)
        as_ = after.file_statements(path)
        pairs = lcs_pairs([s.normalized for s in bs], [s.normalized for s in as_])
        mb = {i for i, _ in pairs}
        ma = {j for _, j in pairs}
        matched.update((bs[i].id, as_[j].id) for i, j in pairs)
        removed.update(s.id for i, s in enumerate(bs) if i not in mb)
        added.update(s.id for j, s in enumerate(as_) if j not in ma)
    return ChangeSet(frozenset(added), frozenset(removed), frozenset(matched))
