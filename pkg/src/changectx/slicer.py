"""Depth-bounded backward/forward slicing over a PDG."""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .pdg import CONTROL, DATA, ProgramDependenceGraph

log = logging.getLogger(__name__)

BACKWARD = "backward"
FORWARD = "forward"


class SeedNotInGraph(KeyError):
    pass


@dataclass(frozen=True)
class SliceConfig:
    depth: int = 3
    directions: frozenset[str] = frozenset({BACKWARD, FORWARD})
    edge_kinds: frozenset[str] = frozenset({CONTROL, DATA})
    interprocedural: bool = True

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not self.directions or not set(self.directions) <= {BACKWARD, FORWARD}:
            raise ValueError(f"bad directions: {sorted(self.directions)}")
        if not self.edge_kinds:
            raise ValueError("edge_kinds must not be empty")
        object.__setattr__(self, "directions", frozenset(self.directions))
        object.__setattr__(self, "edge_kinds", frozenset(self.edge_kinds))


def _adjacency(pdg: ProgramDependenceGraph, config: SliceConfig):
    fwd: dict[int, list[int]] = defaultdict(list)
    bwd: dict[int, list[int]] = defaultdict(list)
    cross_method = bool(pdg.statements)
    for a, b, kind in sorted(pdg.edges):
        if kind not in config.edge_kinds:
            continue
        if not config.interprocedural and cross_method and pdg.method_of(a) != pdg.method_of(b):
            continue
        fwd[a].append(b)
        bwd[b].append(a)
    calls: dict[int, list[int]] = defaultdict(list)
    if config.interprocedural:
        for a, b in sorted(pdg.call_edges):
            calls[a].append(b)
            calls[b].append(a)
    return fwd, bwd, calls


def _bfs(seeds: Iterable[int], adj, calls, depth: int) -> dict[int, int]:
    dist = {s: 0 for s in seeds}
    queue = deque(dist)
    while queue:
        n = queue.popleft()
        d = dist[n]
        if d == depth:
            continue
        for m in adj.get(n, ()):
            if m not in dist:
                dist[m] = d + 1
                queue.append(m)
        for m in calls.get(n, ()):
            if m not in dist:
                dist[m] = d + 1
                queue.append(m)
    return dist


def slice_distances(
    pdg: ProgramDependenceGraph,
    seeds: Iterable[int],
    config: Optional[SliceConfig] = None,
    missing: Optional[list[int]] = None,
) -> dict[int, int]:
    """Hop distance from the nearest seed for every statement in the slice.

    Backward and forward traversals are run separately and merged, so a
    statement reached only by going up one edge and down another (a sibling)
    is not included. Seeds outside the graph are logged and skipped; pass a
    list as ``missing`` to collect them.
    """
    config = config or SliceConfig()
    valid = []
    for s in sorted(set(seeds)):
        if s in pdg.nodes:
            valid.append(s)
        else:
            log.warning("SeedNotInGraph: %s not in %s PDG", s, pdg.version_label)
            if missing is not None:
                missing.append(s)
    fwd, bwd, calls = _adjacency(pdg, config)
    dist: dict[int, int] = {}
    if BACKWARD in config.directions:
        dist.update(_bfs(valid, bwd, calls, config.depth))
    if FORWARD in config.directions:
        for n, d in _bfs(valid, fwd, calls, config.depth).items():
            if n not in dist or d < dist[n]:
                dist[n] = d
    return dist


def slice(pdg: ProgramDependenceGraph, seeds: Iterable[int], config: Optional[SliceConfig] = None) -> set[int]:  # noqa: A001
    return set(slice_distances(pdg, seeds, config))
