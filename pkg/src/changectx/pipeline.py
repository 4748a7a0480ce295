"""Commit-level glue: parse both versions, build PDGs, align, encode."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .differ import ChangeSet, align_versions
from .encoder import DEFAULT_BUDGET, ContextEncodedRepresentation, encode_change
from .model import SourceVersion
from .parser import build_version
from .pdg import OUTPUT, ProgramDependenceGraph, build_pdg
from .slicer import SliceConfig

FileTriple = tuple[str, str, str]  # path, before text, after text


@dataclass(frozen=True)
class AnalyzedCommit:
    before: SourceVersion
    after: SourceVersion
    changeset: ChangeSet
    before_pdg: Optional[ProgramDependenceGraph] = None
    after_pdg: Optional[ProgramDependenceGraph] = None

    @property
    def diagnostics(self) -> tuple[str, ...]:
        return self.before.diagnostics + self.after.diagnostics


def analyze(files: Iterable[FileTriple], *, with_pdg: bool = True, output_deps: bool = False) -> AnalyzedCommit:
    files = list(files)
    before = build_version("before", [(p, b) for p, b, _ in files if b])
    after = build_version("after", [(p, a) for p, _, a in files if a])
    changeset = align_versions(before, after)
    if not with_pdg:
        return AnalyzedCommit(before, after, changeset)
    return AnalyzedCommit(before, after, changeset, build_pdg(before, output_deps=output_deps), build_pdg(after, output_deps=output_deps))


def represent(
    files: Iterable[FileTriple],
    config: Optional[SliceConfig] = None,
    budget: int = DEFAULT_BUDGET,
    *,
    context: bool = True,
) -> tuple[AnalyzedCommit, ContextEncodedRepresentation]:
    config = config or SliceConfig()
    commit = analyze(files, output_deps=OUTPUT in config.edge_kinds)
    rep = encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, config, budget, context=context)
    if commit.diagnostics:
        rep = ContextEncodedRepresentation(rep.entries, rep.token_count, rep.truncated, rep.diagnostics + commit.diagnostics)
    return commit, rep
