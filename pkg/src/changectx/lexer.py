"""Lexical layer for the Java subset: masking, tokens, def/use extraction."""

from __future__ import annotations

import bisect
import logging
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

log = logging.getLogger(__name__)

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue default do
    double else enum extends final finally float for goto if implements import instanceof
    int interface long native new package private protected public return short static
    strictfp super switch synchronized this throw throws transient try void volatile while
    true false null yield permits sealed""".split()
)
PRIMITIVES = frozenset("boolean byte char double float int long short void".split())
MODIFIERS = frozenset(
    "public private protected static final abstract native synchronized transient volatile "
    "strictfp default sealed".split()
)
ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>= >>>=".split())
INCDEC = frozenset(("++", "--"))

_TOKEN_RE = re.compile(
    r"""
    (?P<id>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<num>\d[\w.]*(?:[eEpP][+-]\d+)?|\.\d[\w]*)
  | (?P<str>\"\"\"[^\"]*?\"\"\"|"[^"\n]*"|'[^'\n]*')
  | (?P<op>>>>=|<<=|>>=|\.\.\.|->|::|\+\+|--|&&|\|\||[+\-*/%&|^!=<>]=|[{}()\[\];,.?:@~<>=+\-*/%&|^!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    start: int
    end: int

    def is_ident(self) -> bool:
        return self.kind == "id" and self.value not in KEYWORDS


class UnbalancedSource(ValueError):
    pass


def mask_source(text: str) -> tuple[str, str]:
    """Return ``(without_comments, masked)``, both aligned with ``text``.

    Comments become spaces in both. ``masked`` additionally blanks string and
    char literal contents, keeping the quotes. Newlines are always kept so
    offsets map to the same lines.
    """
    clean = list(text)
    masked = list(text)
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            j = n if j < 0 else j
            for k in range(i, j):
                clean[k] = masked[k] = " "
            i = j
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            for k in range(i, j):
                if text[k] != "\n":
                    clean[k] = masked[k] = " "
            i = j
        elif text.startswith('"""', i):
            j = text.find('"""', i + 3)
            j = n if j < 0 else j
            for k in range(i + 3, j):
                if text[k] != "\n":
                    masked[k] = " "
            i = j + 3
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            j = min(j, n)
            for k in range(i + 1, j):
                masked[k] = " "
            i = j + 1
        else:
            i += 1
    return "".join(clean), "".join(masked)


def tokenize(masked: str) -> list[Token]:
    out = []
    for m in _TOKEN_RE.finditer(masked):
        kind = m.lastgroup
        out.append(Token(kind, m.group(), m.start(), m.end()))
    return out


class LineIndex:
    def __init__(self, text: str):
        self._nl = [i for i, c in enumerate(text) if c == "\n"]

    def line(self, offset: int) -> int:
        return bisect.bisect_right(self._nl, offset - 1) + 1


def match_brackets(tokens: Sequence[Token]) -> dict[int, int]:
    """Map each bracket token index to its partner; raise on imbalance."""
    pairs = {"(": ")", "[": "]", "{": "}"}
    closers = {v: k for k, v in pairs.items()}
    stack: list[int] = []
    match: dict[int, int] = {}
    for i, t in enumerate(tokens):
        if t.kind != "op":
            continue
        if t.value in pairs:
            stack.append(i)
        elif t.value in closers:
            if not stack or tokens[stack[-1]].value != closers[t.value]:
                raise UnbalancedSource(f"unexpected {t.value!r} at offset {t.start}")
            j = stack.pop()
            match[i] = j
            match[j] = i
    if stack:
        raise UnbalancedSource(f"unclosed {tokens[stack[-1]].value!r} at offset {tokens[stack[-1]].start}")
    return match


def normalize(clean_slice: str) -> str:
    """Collapse whitespace outside string literals."""
    parts = re.split(r'("(?:[^"\\\n]|\\.)*"|\'(?:[^\'\\\n]|\\.)*\')', clean_slice)
    out = []
    for k, part in enumerate(parts):
        out.append(part if k % 2 else re.sub(r"\s+", " ", part))
    return "".join(out).strip()


# ---------------------------------------------------------------- def/use


class DefUse(NamedTuple):
    defs: frozenset
    uses: frozenset
    callees: frozenset


def parse_type(tv: Sequence[str], i: int) -> Optional[int]:
    """Index just past a type starting at ``i``, or None."""
    n = len(tv)
    if i >= n:
        return None
    t = tv[i]
    if not (t in PRIMITIVES or (_word(t) and t not in KEYWORDS)):
        return None
    i += 1
    while i + 1 < n and tv[i] == "." and _word(tv[i + 1]) and tv[i + 1] not in KEYWORDS:
        i += 2
    if i < n and tv[i] == "<":
        depth = 0
        while i < n:
            t = tv[i]
            if t == "<":
                depth += 1
            elif t == ">":
                depth -= 1
                if depth == 0:
                    i += 1
                    break
            elif not (_word(t) or t in (".", ",", "?", "&", "[", "]")):
                return None
            i += 1
        else:
            return None
        if depth:
            return None
    while i + 1 < n and tv[i] == "[" and tv[i + 1] == "]":
        i += 2
    if i < n and tv[i] == "...":
        i += 1
    return i


def _word(t: str) -> bool:
    return bool(t) and (t[0].isalpha() or t[0] in "_$")


def skip_annotation(tv: Sequence[str], i: int, match: dict[int, int]) -> int:
    """``i`` points at '@'; return index past the annotation."""
    j = i + 1
    if j < len(tv) and tv[j] == "interface":
        return i
    while j < len(tv) and _word(tv[j]):
        j += 1
        if j < len(tv) and tv[j] == "." and j + 1 < len(tv) and _word(tv[j + 1]):
            j += 1
        else:
            break
    if j < len(tv) and tv[j] == "(" and j in match:
        j = match[j] + 1
    return j


def skip_modifiers(tv: Sequence[str], i: int, match: dict[int, int], end: int | None = None) -> int:
    end = len(tv) if end is None else end
    while i < end:
        if tv[i] == "@" and i + 1 < end and tv[i + 1] != "interface":
            i = skip_annotation(tv, i, match)
        elif tv[i] in MODIFIERS and not (i + 1 < end and tv[i + 1] == "("):
            i += 1
        else:
            break
    return i


def _local_match(tv: Sequence[str]) -> Optional[dict[int, int]]:
    pairs = {"(": ")", "[": "]", "{": "}"}
    closers = {v: k for k, v in pairs.items()}
    stack: list[int] = []
    match: dict[int, int] = {}
    for i, t in enumerate(tv):
        if t in pairs:
            stack.append(i)
        elif t in closers:
            if not stack or tv[stack[-1]] != closers[t]:
                return None
            j = stack.pop()
            match[i], match[j] = j, i
    return None if stack else match


def _declaration_at(tv: Sequence[str], i: int, match: dict[int, int]) -> Optional[tuple[int, int]]:
    """If a local declaration starts at ``i``, return (type_start, name_index)."""
    i = skip_modifiers(tv, i, match)
    j = parse_type(tv, i)
    if j is None or j >= len(tv):
        return None
    if not (_word(tv[j]) and tv[j] not in KEYWORDS):
        return None
    nxt = tv[j + 1] if j + 1 < len(tv) else ";"
    if nxt in ("=", ";", ",", ":", ")", "["):
        return i, j
    return None


def _lvalue_root(tv: Sequence[str], j: int, match: dict[int, int]) -> tuple[Optional[int], bool]:
    """Walk back from ``j`` (last token of an lvalue) to its root identifier.

    Returns (root index, qualified) where qualified means the lvalue had a
    member or index suffix, i.e. the store is a weak update of the root.
    """
    qualified = False
    while j >= 0:
        t = tv[j]
        if t == "]" and j in match:
            qualified = True
            j = match[j] - 1
            continue
        if _word(t) and t not in KEYWORDS:
            if j >= 1 and tv[j - 1] == ".":
                if j >= 2 and tv[j - 2] == "this":
                    return j, qualified
                qualified = True
                j -= 2
                continue
            return j, qualified
        if t == ")" and j in match:
            # (expr).field = ... ; give up on the root
            return None, qualified
        return None, qualified
    return None, qualified


def _lvalue_forward(tv: Sequence[str], i: int) -> tuple[Optional[int], bool]:
    """Root of a prefix ``++x`` / ``++this.x`` / ``++a[i]`` operand."""
    if i < len(tv) and tv[i] == "this" and i + 2 < len(tv) and tv[i + 1] == ".":
        i += 2
    if i < len(tv) and _word(tv[i]) and tv[i] not in KEYWORDS:
        qualified = i + 1 < len(tv) and tv[i + 1] in (".", "[")
        return i, qualified
    return None, False


def analyze_tokens(tv: Sequence[str], *, segment_starts: Sequence[int] = (0,)) -> tuple[DefUse, dict]:
    """Def/use/callee extraction over one statement's token values.

    Returns the DefUse and a small facts dict (``declaration``, ``assignment``)
    the parser uses for kind assignment.
    """
    match = _local_match(tv)
    if match is None:
        log.debug("unbalanced statement tokens: %s", " ".join(tv))
        return DefUse(frozenset(), frozenset(), frozenset()), {"ok": False}
    n = len(tv)
    role: dict[int, str] = {}  # index -> def | use | defuse | callee | skip
    facts = {"ok": True, "declaration": False, "assignment": False}

    # annotations, `new Type`, casts, instanceof, labels
    i = 0
    while i < n:
        t = tv[i]
        if t == "@" and i + 1 < n and tv[i + 1] != "interface":
            j = skip_annotation(tv, i, match)
            for k in range(i, j):
                role[k] = "skip"
            i = max(j, i + 1)
            continue
        if t == "new":
            j = parse_type(tv, i + 1)
            if j is not None:
                # skip generic/diamond suffix tokens and qualifier; last name is the ctor
                last = i + 1
                for k in range(i + 1, j):
                    role[k] = "skip"
                    if _word(tv[k]):
                        last = k
                if j < n and tv[j] == "<" and j + 1 < n and tv[j + 1] == ">":
                    role[j] = role[j + 1] = "skip"
                    j += 2
                if j < n and tv[j] == "(" and tv[last] not in PRIMITIVES:
                    role[last] = "callee"
            i += 1
            continue
        if t == "instanceof":
            j = parse_type(tv, i + 1)
            if j is not None:
                for k in range(i + 1, j):
                    role[k] = "skip"
                if j < n and _word(tv[j]) and tv[j] not in KEYWORDS:
                    role[j] = "def"  # pattern binding
            i += 1
            continue
        if t == "(" and i in match:
            j = parse_type(tv, i + 1)
            close = match[i]
            if (
                j == close
                and (tv[i + 1] in PRIMITIVES or tv[i + 1][:1].isupper())
                and close + 1 < n
                and (
                    _word(tv[close + 1]) and tv[close + 1] not in ("instanceof",)
                    or tv[close + 1] in ("(", "!", "~")
                    or tv[close + 1][:1].isdigit()
                    or tv[close + 1][:1] in "\"'"
                )
            ):
                for k in range(i + 1, close):
                    role[k] = "skip"
            i += 1
            continue
        if t == "::" and i + 1 < n:
            role[i + 1] = "skip"
            if i >= 1 and _word(tv[i - 1]) and tv[i - 1][:1].isupper():
                role[i - 1] = "skip"
        i += 1

    if n and tv[0] in ("break", "continue") and n > 1 and _word(tv[1]):
        role[1] = "skip"

    # method reference / lambda parameter lists
    for i, t in enumerate(tv):
        if t == "->":
            if i >= 1 and _word(tv[i - 1]):
                role[i - 1] = "skip"
            elif i >= 1 and tv[i - 1] == ")" and (i - 1) in match:
                for k in range(match[i - 1] + 1, i - 1):
                    role[k] = "skip"

    # declarations
    def declare(start: int, depth_end: int) -> None:
        found = _declaration_at(tv, start, match)
        if found is None:
            return
        tstart, name = found
        for k in range(tstart, name):
            role[k] = "skip"
        role[name] = "def"
        facts["declaration"] = True
        # further declarators at the same depth: `int a = 1, b;`
        k = name + 1
        while k < depth_end:
            t = tv[k]
            if t in ("(", "[", "{") and k in match:
                k = match[k] + 1
                continue
            if t in (";", ")", ":"):
                break
            if t == "," and k + 1 < depth_end and _word(tv[k + 1]) and tv[k + 1] not in KEYWORDS:
                nxt = tv[k + 2] if k + 2 < n else ";"
                if nxt in ("=", ",", ";", "[", ")") or k + 2 >= depth_end:
                    role[k + 1] = "def"
                k += 1
                continue
            k += 1

    for s in segment_starts:
        if s < n:
            declare(s, n)
    # header forms: for (...), catch (...), try (...)
    if n >= 2 and tv[0] in ("for", "catch", "try") and tv[1] == "(" and 1 in match:
        close = match[1]
        declare(2, close)
        k = 2
        while k < close:
            if tv[k] in ("(", "[", "{") and k in match:
                k = match[k] + 1
                continue
            if tv[k] == ";" and k + 1 < close:
                declare(k + 1, close)
            k += 1

    # assignments and increments
    for i, t in enumerate(tv):
        if t in ASSIGN_OPS:
            facts["assignment"] = True
            root, qualified = _lvalue_root(tv, i - 1, match)
            if root is None:
                continue
            if t == "=" and not qualified:
                if role.get(root) != "def":
                    role[root] = "def" if role.get(root) in (None, "def") else role[root]
            else:
                role[root] = "defuse"
        elif t in INCDEC:
            facts["assignment"] = True
            root, _ = _lvalue_root(tv, i - 1, match) if i >= 1 else (None, False)
            if root is None:
                root, _ = _lvalue_forward(tv, i + 1)
            if root is not None:
                role[root] = "defuse"

    # everything else
    for i, t in enumerate(tv):
        if i in role or not _word(t) or t in KEYWORDS:
            continue
        after = tv[i + 1] if i + 1 < n else ""
        before = tv[i - 1] if i >= 1 else ""
        if before == "." and not (i >= 2 and tv[i - 2] == "this"):
            role[i] = "callee" if after == "(" else "skip"
        elif after == "(":
            role[i] = "callee"
        else:
            role[i] = "use"

    defs, uses, callees = set(), set(), set()
    for i, r in role.items():
        name = tv[i]
        if r == "def":
            defs.add(name)
        elif r == "use":
            uses.add(name)
        elif r == "defuse":
            defs.add(name)
            uses.add(name)
        elif r == "callee":
            callees.add(name)
    return DefUse(frozenset(defs), frozenset(uses), frozenset(callees)), facts


def signature_params(tv: Sequence[str], open_idx: int, match: dict[int, int]) -> list[str]:
    """Parameter names of a parameter list whose '(' is at ``open_idx``."""
    close = match[open_idx]
    params: list[str] = []
    seg_start = open_idx + 1
    depth = 0
    for k in range(open_idx + 1, close + 1):
        t = tv[k]
        if t == "<":
            depth += 1
        elif t == ">":
            depth -= 1
        if (t == "," and depth == 0) or k == close:
            seg = list(tv[seg_start:k])
            name = _param_name(seg)
            if name:
                params.append(name)
            seg_start = k + 1
    return params


def _param_name(seg: list[str]) -> Optional[str]:
    while seg and seg[-1] in ("[", "]"):
        seg.pop()
    for t in reversed(seg):
        if _word(t) and t not in KEYWORDS:
            # `Type name` needs at least two words; a lone word is a receiver-less type
            words = [w for w in seg if _word(w) and w not in MODIFIERS]
            return t if len(words) >= 2 or seg.count("...") else None
    return None


def extract_def_use(stmt_text: str) -> DefUse:
    """Best-effort def/use/callee sets of one segmented statement."""
    _, masked = mask_source(stmt_text)
    toks = [t.value for t in tokenize(masked)]
    if not toks:
        return DefUse(frozenset(), frozenset(), frozenset())
    match = _local_match(toks)
    if match is not None:
        sig = _signature_shape(toks, match)
        if sig is not None:
            return DefUse(frozenset(signature_params(toks, sig, match)), frozenset(), frozenset())
    du, facts = analyze_tokens(toks)
    if not facts.get("ok"):
        log.warning("could not analyze statement: %r", stmt_text)
    return du


def _signature_shape(tv: Sequence[str], match: dict[int, int]) -> Optional[int]:
    """Index of the parameter '(' when ``tv`` looks like a method signature."""
    i = skip_modifiers(tv, 0, match)
    had_modifiers = i > 0
    if i < len(tv) and tv[i] == "<":
        depth = 0
        while i < len(tv):
            depth += tv[i] == "<"
            depth -= tv[i] == ">"
            i += 1
            if depth == 0:
                break
        had_modifiers = True
    j = parse_type(tv, i)
    if j is None:
        return None
    if j < len(tv) and tv[j] == "(" and had_modifiers and j == i + 1:
        return j  # constructor
    if j < len(tv) and _word(tv[j]) and tv[j] not in KEYWORDS and j + 1 < len(tv) and tv[j + 1] == "(":
        close = match.get(j + 1)
        if close is not None and (close == len(tv) - 1 or tv[close + 1] in ("throws", "{", "[")):
            return j + 1
    return None
