"""Statement segmentation for the Java subset.

One Statement per simple (semicolon-terminated) statement, per control
header, per case/default label and per method signature. Braces produce no
statements; the block structure is recorded as a statement tree on each
MethodUnit (see ``model``) and as the ``nesting`` depth of every statement.

Lines that carry only structural keywords (``try {``, ``} else {``,
``finally``, ``do {``), annotations, and package/import declarations are not
covered by any statement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from .lexer import (
    KEYWORDS,
    DefUse,
    LineIndex,
    Token,
    UnbalancedSource,
    analyze_tokens,
    mask_source,
    match_brackets,
    normalize,
    parse_type,
    signature_params,
    skip_annotation,
    skip_modifiers,
    tokenize,
)
from .model import (
    Case,
    Catch,
    Guarded,
    If,
    Kind,
    Labeled,
    Loop,
    MethodUnit,
    Simple,
    SourceVersion,
    Statement,
    Switch,
    Try,
)

log = logging.getLogger(__name__)

TYPE_KEYWORDS = ("class", "interface", "enum", "record")


@dataclass
class ParsedFile:
    path: str
    statements: list[Statement] = field(default_factory=list)
    methods: list[MethodUnit] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


class _FileParser:
    def __init__(self, text: str, path: str, first_id: int, first_method: int):
        self.text = text
        self.path = path
        self.clean, masked = mask_source(text)
        self.toks: list[Token] = tokenize(masked)
        self.tv = [t.value for t in self.toks]
        self.lines = LineIndex(text)
        self.match = match_brackets(self.toks)
        self.next_id = first_id
        self.first_method = first_method
        self.out = ParsedFile(path)
        # method currently being filled
        self._unit_name: Optional[str] = None
        self._unit_start = 0
        self._unit_params: tuple[str, ...] = ()
        self._unit_entry: Optional[int] = None
        self._unit_body: list = []
        self._unit_qual = ""
        self._class_stack: list[str] = []

    # ------------------------------------------------------------ units

    @property
    def _method_index(self) -> int:
        return self.first_method + len(self.out.methods)

    def _open_unit(self, name: str, params=(), qual: str = "") -> None:
        self._unit_name = name
        self._unit_start = self.next_id
        self._unit_params = tuple(params)
        self._unit_entry = None
        self._unit_body = []
        self._unit_qual = qual or ".".join(self._class_stack + [name])

    def _close_unit(self) -> None:
        if self._unit_name is None:
            return
        if self.next_id > self._unit_start:
            self.out.methods.append(
                MethodUnit(
                    name=self._unit_name,
                    params=self._unit_params,
                    statement_ids=range(self._unit_start, self.next_id),
                    file=self.path,
                    entry=self._unit_entry,
                    body=tuple(self._unit_body),
                    qualname=self._unit_qual,
                )
            )
        self._unit_name = None

    def _ensure_unit(self, name: str) -> None:
        if self._unit_name != name:
            self._close_unit()
            self._open_unit(name)

    # ------------------------------------------------------------ emit

    def _emit(self, a: int, b: int, kind: Optional[Kind], nesting: int, *, defuse=None) -> int:
        """Create a statement from tokens a..b inclusive and return its id."""
        toks, tv = self.toks, self.tv
        start, end = toks[a].start, toks[b].end
        if defuse is None:
            seg = tv[a : b + 1]
            du, facts = analyze_tokens(seg)
            if kind is None:
                kind = _simple_kind(seg, du, facts)
        else:
            du = defuse
        sid = self.next_id
        self.next_id += 1
        self.out.statements.append(
            Statement(
                id=sid,
                text=self.text[start:end].strip(),
                normalized=normalize(self.clean[start:end]),
                kind=kind,
                defs=du.defs,
                uses=du.uses,
                callees=du.callees,
                method=self._method_index,
                nesting=nesting,
                line_span=(self.lines.line(start), self.lines.line(end - 1)),
                path=self.path,
            )
        )
        return sid

    # ------------------------------------------------------------ members

    def parse(self) -> ParsedFile:
        self._members(0, len(self.toks), toplevel=True)
        self._close_unit()
        return self.out

    def _members(self, i: int, end: int, toplevel: bool, enum_body: bool = False) -> None:
        tv, match = self.tv, self.match
        if enum_body:
            i = self._skip_enum_constants(i, end)
        while i < end:
            t = tv[i]
            if t == ";":
                i += 1
                continue
            if toplevel and t in ("package", "import"):
                i = self._find(i, ";", end) + 1
                continue
            j = skip_modifiers(tv, i, match, end)
            if j < end and (tv[j] in TYPE_KEYWORDS or (tv[j] == "@" and j + 1 < end and tv[j + 1] == "interface")):
                i = self._type_decl(j, end)
                continue
            sig = self._method_signature(i, end, require_body=toplevel)
            if sig is not None:
                i = self._method(i, *sig)
                continue
            if not toplevel:
                if j < end and tv[j] == "{":
                    name = "<clinit>" if "static" in tv[i:j] else "<init>"
                    self._close_unit()
                    self._open_unit(name)
                    self._unit_body.extend(self._block(j, 0))
                    self._close_unit()
                    i = match[j] + 1
                    continue
                self._ensure_unit("<fields>")
                start = self._skip_annotations(i, end)
                k = self._simple_end(start, end)
                sid = self._emit(start, k, None, 0)
                self._unit_body.append(Simple(sid))
                i = k + 1
                continue
            # top-level snippet statement
            self._ensure_unit("<snippet>")
            nodes, i = self._stmt(i, 0, end)
            self._unit_body.extend(nodes)
        # a class body ends any open field/snippet run
        if not toplevel:
            self._close_unit()

    def _skip_enum_constants(self, i: int, end: int) -> int:
        while i < end:
            t = self.tv[i]
            if t in ("(", "{", "[") and i in self.match:
                i = self.match[i] + 1
                continue
            if t == ";":
                return i + 1
            i += 1
        return i

    def _type_decl(self, j: int, end: int) -> int:
        tv = self.tv
        name = tv[j + 1] if j + 1 < end else "?"
        if tv[j] == "@":
            name = tv[j + 2] if j + 2 < end else "?"
        k = j
        while k < end and tv[k] != "{":
            if tv[k] in ("(", "[") and k in self.match:
                k = self.match[k]
            k += 1
        if k >= end:
            return end
        self._close_unit()
        self._class_stack.append(name)
        self._members(k + 1, self.match[k], toplevel=False, enum_body=tv[j] == "enum")
        self._class_stack.pop()
        return self.match[k] + 1

    def _method_signature(self, i: int, end: int, require_body: bool):
        """Return (sig_start, paren_index, body_brace_or_semicolon) or None."""
        tv, match = self.tv, self.match
        j = skip_modifiers(tv, i, match, end)
        had_prefix = j > i
        if j < end and tv[j] == "<":
            depth = 0
            while j < end:
                depth += tv[j] == "<"
                depth -= tv[j] == ">"
                j += 1
                if depth == 0:
                    break
            had_prefix = True
        if j >= end or tv[j] in KEYWORDS and tv[j] not in ("void", "boolean", "byte", "char", "short", "int", "long", "float", "double"):
            return None
        k = parse_type(tv, j)
        if k is None or k >= end:
            return None
        if tv[k] == "(":
            # constructor: modifiers are required outside a class body; inside one a
            # bare `Name(` followed by `{` is still a constructor
            name_idx, paren = k - 1, k
            if k != j + 1:
                return None
        elif k + 1 < end and tv[k + 1] == "(" and tv[k] not in KEYWORDS and (tv[k][0].isalpha() or tv[k][0] in "_$"):
            name_idx, paren = k, k + 1
        else:
            return None
        close = match.get(paren)
        if close is None:
            return None
        q = close + 1
        while q + 1 < end and tv[q] == "[" and tv[q + 1] == "]":
            q += 2
        if q < end and tv[q] == "throws":
            while q < end and tv[q] not in ("{", ";"):
                q += 1
        start = self._skip_annotations(i, end)
        if q < end and tv[q] == "{":
            return start, name_idx, paren, q
        if q < end and tv[q] == ";" and not require_body:
            if tv[k] == "(" and not had_prefix:
                return None
            return start, name_idx, paren, q
        if q < end and tv[q] == "default" and not require_body:
            return start, name_idx, paren, self._find(q, ";", end)
        return None

    def _skip_annotations(self, i: int, end: int) -> int:
        while i < end and self.tv[i] == "@" and i + 1 < end and self.tv[i + 1] != "interface":
            i = skip_annotation(self.tv, i, self.match)
        return i

    def _method(self, i: int, sig_start: int, name_idx: int, paren: int, q: int) -> int:
        tv = self.tv
        if tv[q] != "{":
            return q + 1  # abstract / interface method
        name = tv[name_idx]
        params = signature_params(tv, paren, self.match)
        self._close_unit()
        self._open_unit(name, params)
        du = DefUse(frozenset(params), frozenset(), frozenset())
        self._unit_entry = self._emit(sig_start, q - 1, Kind.DECLARATION, 0, defuse=du)
        self._unit_body.extend(self._block(q, 0))
        self._close_unit()
        return self.match[q] + 1

    # ------------------------------------------------------------ bodies

    def _find(self, i: int, value: str, end: int) -> int:
        while i < end and self.tv[i] != value:
            if self.tv[i] in ("(", "[", "{") and i in self.match:
                i = self.match[i]
            i += 1
        return min(i, end - 1) if end else i

    def _simple_end(self, i: int, end: int) -> int:
        """Index of the terminating ';' of a simple statement starting at i."""
        tv, match = self.tv, self.match
        j = i
        while j < end:
            t = tv[j]
            if t in ("(", "[", "{") and j in match:
                j = match[j] + 1
                continue
            if t == ";":
                return j
            if t == "}":
                self.out.diagnostics.append(f"{self.path}: missing ';' near offset {self.toks[j].start}")
                return j - 1
            j += 1
        self.out.diagnostics.append(f"{self.path}: unterminated statement at offset {self.toks[i].start}")
        return end - 1

    def _block(self, i: int, nesting: int) -> list:
        """``i`` points at '{'; parse the block's statements."""
        close = self.match[i]
        nodes: list = []
        k = i + 1
        while k < close:
            got, k = self._stmt(k, nesting, close)
            nodes.extend(got)
        return nodes

    def _body(self, i: int, nesting: int, end: int):
        if i < end and self.tv[i] == "{":
            return tuple(self._block(i, nesting)), self.match[i] + 1
        if i >= end:
            return (), i
        nodes, k = self._stmt(i, nesting, end)
        return tuple(nodes), k

    def _header(self, i: int) -> int:
        """``i`` points at a keyword followed by '('; return index of ')'."""
        if i + 1 < len(self.tv) and self.tv[i + 1] == "(":
            return self.match[i + 1]
        raise UnbalancedSource(f"expected '(' after {self.tv[i]!r} at offset {self.toks[i].start}")

    def _stmt(self, i: int, nesting: int, end: int):
        """Parse one statement at ``i``; return (nodes, next index)."""
        tv, match = self.tv, self.match
        t = tv[i]
        if t == "{":
            return list(self._block(i, nesting)), match[i] + 1
        if t == ";":
            return [], i + 1
        if (
            i + 1 < end
            and tv[i + 1] == ":"
            and t not in KEYWORDS
            and (t[0].isalpha() or t[0] in "_$")
        ):
            inner, k = self._stmt(i + 2, nesting, end) if i + 2 < end else ([], i + 2)
            return [Labeled(t, tuple(inner))], k
        if t == "if":
            close = self._header(i)
            h = self._emit(i, close, Kind.IF_HEADER, nesting)
            then, k = self._body(close + 1, nesting + 1, end)
            orelse = None
            if k < end and tv[k] == "else":
                orelse, k = self._body(k + 1, nesting + 1, end)
            return [If(h, then, orelse)], k
        if t in ("while", "for"):
            close = self._header(i)
            h = self._emit(i, close, Kind.LOOP_HEADER, nesting)
            body, k = self._body(close + 1, nesting + 1, end)
            return [Loop(h, body)], k
        if t == "do":
            body, k = self._body(i + 1, nesting + 1, end)
            if k < end and tv[k] == "while":
                close = self._header(k)
                last = close + 1 if close + 1 < end and tv[close + 1] == ";" else close
                h = self._emit(k, last, Kind.LOOP_HEADER, nesting)
                return [Loop(h, body, post_test=True)], last + 1
            self.out.diagnostics.append(f"{self.path}: do without while at offset {self.toks[i].start}")
            return list(body), k
        if t == "switch" and i + 1 < end and tv[i + 1] == "(":
            close = self._header(i)
            if close + 1 < end and tv[close + 1] == "{":
                h = self._emit(i, close, Kind.SWITCH_HEADER, nesting)
                cases = self._switch_cases(close + 1, nesting)
                return [Switch(h, tuple(cases))], match[close + 1] + 1
        if t == "try":
            return self._try(i, nesting, end)
        if t == "synchronized" and i + 1 < end and tv[i + 1] == "(":
            close = self._header(i)
            h = self._emit(i, close, Kind.OTHER, nesting)
            body, k = self._body(close + 1, nesting + 1, end)
            return [Guarded(h, body)], k
        if t in ("else", "catch", "finally", "case", "default"):
            self.out.diagnostics.append(f"{self.path}: stray {t!r} at offset {self.toks[i].start}")
            return [], i + 1
        j = skip_modifiers(tv, i, match, end)
        if (
            j + 1 < end
            and tv[j] in TYPE_KEYWORDS
            and tv[j + 1] not in KEYWORDS
            and (tv[j + 1][0].isalpha() or tv[j + 1][0] in "_$")
        ):
            # local type declaration: one opaque statement
            k = j
            while k < end and tv[k] != "{":
                k += 1
            last = match[k] if k < end else end - 1
            sid = self._emit(i, last, Kind.OTHER, nesting)
            return [Simple(sid)], last + 1
        k = self._simple_end(i, end)
        if k < i:
            return [], i + 1
        sid = self._emit(i, k, None, nesting)
        jump = target = None
        if t in ("return", "throw"):
            jump = t
        elif t in ("break", "continue"):
            jump = t
            if i + 1 <= k and tv[i + 1] not in (";",):
                target = tv[i + 1]
        return [Simple(sid, jump, target)], k + 1

    def _switch_cases(self, brace: int, nesting: int) -> list[Case]:
        tv, match = self.tv, self.match
        close = match[brace]
        cases: list[Case] = []
        k = brace + 1
        while k < close:
            if tv[k] not in ("case", "default"):
                # statements before the first label are unreachable; keep them
                nodes, k = self._stmt(k, nesting + 2, close)
                if cases:
                    c = cases[-1]
                    cases[-1] = Case(c.label, c.is_default, c.body + tuple(nodes), c.arrow)
                continue
            is_default = tv[k] == "default"
            q = k + 1
            while q < close and tv[q] not in (":", "->"):
                if tv[q] in ("(", "[", "{") and q in match:
                    q = match[q]
                q += 1
            arrow = q < close and tv[q] == "->"
            last = q if not arrow else q - 1
            label = self._emit(k, last, Kind.CASE_LABEL, nesting + 1)
            body: list = []
            k = q + 1
            if arrow:
                nodes, k = self._stmt(k, nesting + 2, close)
                body.extend(nodes)
            else:
                while k < close and tv[k] not in ("case", "default"):
                    nodes, k = self._stmt(k, nesting + 2, close)
                    body.extend(nodes)
            cases.append(Case(label, is_default, tuple(body), arrow))
        return cases

    def _try(self, i: int, nesting: int, end: int):
        tv, match = self.tv, self.match
        k = i + 1
        resources = None
        if k < end and tv[k] == "(":
            resources = self._emit(i, match[k], Kind.DECLARATION, nesting)
            k = match[k] + 1
        body, k = self._body(k, nesting + 1, end)
        catches = []
        while k < end and tv[k] == "catch":
            close = self._header(k)
            h = self._emit(k, close, Kind.IF_HEADER, nesting)
            cbody, k = self._body(close + 1, nesting + 1, end)
            catches.append(Catch(h, cbody))
        final = None
        if k < end and tv[k] == "finally":
            final, k = self._body(k + 1, nesting + 1, end)
        return [Try(resources, body, tuple(catches), final)], k


def _simple_kind(tv, du, facts) -> Kind:
    if not tv:
        return Kind.OTHER
    if tv[0] == "return":
        return Kind.RETURN
    if tv[0] in ("throw", "break", "continue", "assert", "yield"):
        return Kind.OTHER
    if facts.get("declaration"):
        return Kind.DECLARATION
    if facts.get("assignment"):
        return Kind.ASSIGNMENT
    if du.callees or tv[0] in ("this", "super"):
        return Kind.CALL
    return Kind.OTHER


def parse_file(source_text: str, path: str = "", first_id: int = 0, first_method: int = 0) -> ParsedFile:
    """Parse one file. Unbalanced input yields an empty result plus a diagnostic."""
    try:
        return _FileParser(source_text, path, first_id, first_method).parse()
    except UnbalancedSource as exc:
        msg = f"UnbalancedSource: {path or '<text>'}: skipped ({exc})"
        log.warning(msg)
        return ParsedFile(path, diagnostics=[msg])


def segment_statements(source_text: str, path: str = "") -> list[Statement]:
    return parse_file(source_text, path).statements


def build_version(label: str, files) -> SourceVersion:
    """Parse ``files`` (iterable of (path, text)) into one SourceVersion.

    Files are ordered by path so ids are stable regardless of input order.
    """
    files = tuple(sorted((p, t) for p, t in files))
    statements: list[Statement] = []
    methods: list[MethodUnit] = []
    diagnostics: list[str] = []
    for path, text in files:
        parsed = parse_file(text, path, len(statements), len(methods))
        statements.extend(parsed.statements)
        methods.extend(parsed.methods)
        diagnostics.extend(parsed.diagnostics)
    return SourceVersion(label, files, tuple(statements), tuple(methods), tuple(diagnostics))
