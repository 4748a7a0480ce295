"""Domain types shared by the analysis modules.

Statements are the unit of everything downstream: PDG nodes, diff units and
representation lines. Block structure is kept on the owning MethodUnit as a
small statement tree so control flow can be rebuilt without re-parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class Kind(str, Enum):
    DECLARATION = "declaration"
    ASSIGNMENT = "assignment"
    CALL = "call"
    RETURN = "return"
    IF_HEADER = "if-header"
    LOOP_HEADER = "loop-header"
    SWITCH_HEADER = "switch-header"
    CASE_LABEL = "case-label"
    BLOCK_CLOSE = "block-close"
    OTHER = "other"


BRANCH_KINDS = frozenset({Kind.IF_HEADER, Kind.LOOP_HEADER, Kind.SWITCH_HEADER, Kind.CASE_LABEL})


@dataclass(frozen=True)
class Statement:
    id: int
    text: str
    normalized: str
    kind: Kind
    defs: frozenset[str]
    uses: frozenset[str]
    callees: frozenset[str]
    method: int
    nesting: int
    line_span: tuple[int, int]
    path: str = ""


# Statement tree. Leaves reference statement ids; composite nodes mirror the
# Java constructs the parser understands.


@dataclass(frozen=True)
class Simple:
    sid: int
    # one of None, "return", "throw", "break", "continue"
    jump: Optional[str] = None
    target: Optional[str] = None


@dataclass(frozen=True)
class If:
    header: int
    then: tuple["Node", ...]
    orelse: Optional[tuple["Node", ...]] = None


@dataclass(frozen=True)
class Loop:
    header: int
    body: tuple["Node", ...]
    # do-while: body runs before the header
    post_test: bool = False


@dataclass(frozen=True)
class Case:
    label: int
    is_default: bool
    body: tuple["Node", ...]
    arrow: bool = False


@dataclass(frozen=True)
class Switch:
    header: int
    cases: tuple[Case, ...]


@dataclass(frozen=True)
class Catch:
    header: int
    body: tuple["Node", ...]


@dataclass(frozen=True)
class Try:
    resources: Optional[int]
    body: tuple["Node", ...]
    catches: tuple[Catch, ...]
    final: Optional[tuple["Node", ...]] = None


@dataclass(frozen=True)
class Guarded:
    """A header that always runs its body once (``synchronized``)."""

    header: int
    body: tuple["Node", ...]


@dataclass(frozen=True)
class Labeled:
    label: str
    body: tuple["Node", ...]


Node = Union[Simple, If, Loop, Switch, Try, Guarded, Labeled]


def tree_ids(nodes) -> list[int]:
    """All statement ids under ``nodes`` in textual order."""
    out: list[int] = []
    for node in nodes:
        _collect(node, out)
    out.sort()
    return out


def _collect(node, out: list[int]) -> None:
    if isinstance(node, Simple):
        out.append(node.sid)
    elif isinstance(node, If):
        out.append(node.header)
        for n in node.then:
            _collect(n, out)
        for n in node.orelse or ():
            _collect(n, out)
    elif isinstance(node, (Loop, Guarded)):
        out.append(node.header)
        for n in node.body:
            _collect(n, out)
    elif isinstance(node, Switch):
        out.append(node.header)
        for case in node.cases:
            out.append(case.label)
            for n in case.body:
                _collect(n, out)
    elif isinstance(node, Try):
        if node.resources is not None:
            out.append(node.resources)
        for n in node.body:
            _collect(n, out)
        for c in node.catches:
            out.append(c.header)
            for n in c.body:
                _collect(n, out)
        for n in node.final or ():
            _collect(n, out)
    elif isinstance(node, Labeled):
        for n in node.body:
            _collect(n, out)


@dataclass(frozen=True)
class MethodUnit:
    name: str
    params: tuple[str, ...]
    statement_ids: range
    file: str
    # id of the signature statement, None for synthetic units (fields, snippets)
    entry: Optional[int] = None
    body: tuple[Node, ...] = ()
    qualname: str = ""

    @property
    def synthetic(self) -> bool:
        return self.name.startswith("<")


@dataclass(frozen=True)
class SourceVersion:
    label: str
    files: tuple[tuple[str, str], ...]
    statements: tuple[Statement, ...]
    methods: tuple[MethodUnit, ...]
    diagnostics: tuple[str, ...] = field(default=())

    def file_statements(self, path: str) -> list[Statement]:
        return [s for s in self.statements if s.path == path]

    @property
    def paths(self) -> list[str]:
        return [p for p, _ in self.files]
