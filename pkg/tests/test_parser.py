import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from changectx.cfg import ENTRY, EXIT, build_cfg, reachable
from changectx.lexer import extract_def_use, mask_source, normalize
from changectx.model import Kind
from changectx.parser import build_version, parse_file, segment_statements

FIXTURES = Path(__file__).parent / "fixtures"


def snippet_cfg(src):
    pf = parse_file(src)
    return pf, build_cfg(pf.methods[0], pf.statements)


# ----------------------------------------------------------- segmentation


def test_declaration_with_call():
    [s] = segment_statements("int lineCount = getLineCount();")
    assert s.kind is Kind.DECLARATION
    assert s.defs == {"lineCount"}
    assert s.uses == set()
    assert s.callees == {"getLineCount"}


def test_empty_text():
    assert segment_statements("") == []


def test_if_fragment_nesting():
    stmts = segment_statements("if (a > 0) {\n  b = a;\n}")
    assert [s.kind for s in stmts] == [Kind.IF_HEADER, Kind.ASSIGNMENT]
    assert stmts[0].uses == {"a"} and stmts[0].defs == set()
    assert stmts[1].defs == {"b"} and stmts[1].uses == {"a"}
    assert [s.nesting for s in stmts] == [0, 1]
    assert [s.line_span for s in stmts] == [(1, 1), (2, 2)]


def test_ids_dense_in_source_order():
    text = (FIXTURES / "litho" / "after.java").read_text()
    version = build_version("after", [("B.java", text), ("A.java", text)])
    assert [s.id for s in version.statements] == list(range(len(version.statements)))
    spans = [(s.path, s.line_span) for s in version.statements]
    assert spans == sorted(spans)
    for m in version.methods:
        assert len(m.statement_ids) > 0
        assert all(version.statements[i].method == version.methods.index(m) for i in m.statement_ids)


def test_method_units_disjoint():
    text = (FIXTURES / "litho" / "before.java").read_text()
    pf = parse_file(text, "T.java")
    seen = set()
    for m in pf.methods:
        ids = set(m.statement_ids)
        assert not ids & seen
        seen |= ids
    assert seen == {s.id for s in pf.statements}


def test_unbalanced_source_is_skipped():
    pf = parse_file("class A { void m() { x = 1; }", "A.java")
    assert pf.statements == []
    assert any("UnbalancedSource" in d for d in pf.diagnostics)


def test_segmentation_deterministic():
    text = (FIXTURES / "litho" / "before.java").read_text()
    assert segment_statements(text, "X.java") == segment_statements(text, "X.java")


# lines legitimately without a statement of their own
_UNCOVERED = re.compile(r"^\s*(\}|\{|else|try|finally|do|@\w+.*|package .*|import .*|(public |private |protected |static |final |abstract )*(class|interface|enum) .*)\s*\{?\s*\}?\s*$")


@pytest.mark.parametrize("name", ["before.java", "after.java"])
def test_line_coverage(name):
    text = (FIXTURES / "litho" / name).read_text()
    clean, _ = mask_source(text)
    stmts = segment_statements(text, name)
    owner = {}
    for s in stmts:
        for ln in range(s.line_span[0], s.line_span[1] + 1):
            assert ln not in owner, f"line {ln} covered twice"
            owner[ln] = s.id
    for i, line in enumerate(clean.splitlines(), 1):
        if line.strip() and not _UNCOVERED.match(line):
            assert i in owner, f"line {i} uncovered: {line!r}"


# --------------------------------------------------------------- def / use


@pytest.mark.parametrize(
    "text, defs, uses, callees",
    [
        ("x += y * 2;", {"x"}, {"x", "y"}, set()),
        ("if (mTextState != null)", set(), {"mTextState"}, set()),
        ("sb.append(name);", set(), {"sb", "name"}, {"append"}),
        ("x = x + 1;", {"x"}, {"x"}, set()),
        ("a[i] = o.f + 1;", {"a"}, {"a", "i", "o"}, set()),
        ("i++;", {"i"}, {"i"}, set()),
        ("String s = \"x + y\"; // z", {"s"}, set(), set()),
        ("for (int i = 0; i < n; i++)", {"i"}, {"i", "n"}, set()),
        ("return foo(bar) + baz;", set(), {"bar", "baz"}, {"foo"}),
        ("List<Map<String, Integer>> m = new HashMap<>();", {"m"}, set(), {"HashMap"}),
        ("int a = 1, b = a;", {"a", "b"}, {"a"}, set()),
        ("this.count = count;", {"count"}, {"count"}, set()),
    ],
)
def test_extract_def_use(text, defs, uses, callees):
    du = extract_def_use(text)
    assert set(du.defs) == defs
    assert set(du.uses) == uses
    assert set(du.callees) == callees


def test_strings_and_comments_masked():
    [s] = segment_statements('log("value of y", /* z */ x);')
    assert s.uses == {"x"}
    assert s.normalized == 'log("value of y", x);'


_line = st.text(alphabet=st.sampled_from(list("ab x=+1 ;()\t")), max_size=30)


@given(_line)
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


@settings(max_examples=60)
@given(st.lists(st.sampled_from(["x = y + 1;", "foo( a ,b );", "int   z = x;", "if (x > 0) {", "}", "return  z;"]), max_size=8))
def test_reparse_normalized_is_stable(lines):
    depth = sum(line.count("{") - line.count("}") for line in lines)
    src = "\n".join(lines) + "\n}" * max(depth, 0)
    if any(sum(l.count("{") - l.count("}") for l in lines[: i + 1]) < 0 for i in range(len(lines))):
        return
    first = segment_statements(src)
    for s in first:
        [again] = segment_statements(s.normalized) or [s]
        assert again.normalized == s.normalized


# -------------------------------------------------------------------- CFG


def test_cfg_single_return():
    _, cfg = snippet_cfg("return 0;")
    assert cfg.edges == {(ENTRY, 0), (0, EXIT)}


def test_cfg_if_else():
    _, cfg = snippet_cfg("if (c) { a(); } else { b(); } d();")
    assert {(0, 1), (0, 2), (1, 3), (2, 3)} <= cfg.edges
    assert (0, 3) not in cfg.edges


def test_cfg_while():
    _, cfg = snippet_cfg("while (c) { a(); } b();")
    assert {(0, 1), (1, 0), (0, 2)} <= cfg.edges


def test_cfg_break_continue_return():
    pf, cfg = snippet_cfg("while (c) { if (d) { break; } if (e) { continue; } if (f) { return; } g(); } h();")
    # ids: 0 while, 1 if d, 2 break, 3 if e, 4 continue, 5 if f, 6 return, 7 g, 8 h
    assert (2, 8) in cfg.edges
    assert (4, 0) in cfg.edges
    assert (6, EXIT) in cfg.edges
    assert (7, 0) in cfg.edges


def test_cfg_try_catch_edges_from_every_try_statement():
    _, cfg = snippet_cfg("try { x = 1; y = 2; } catch (E e) { z = 3; } w = 4;")
    assert {(0, 2), (1, 2)} <= cfg.edges
    assert (2, 3) in cfg.edges


def test_cfg_unknown_label_goes_to_exit():
    _, cfg = snippet_cfg("out: for (;;) { break missing; }")
    assert (1, EXIT) in cfg.edges
    assert any(d.startswith("UnstructuredJump") for d in cfg.diagnostics)


def test_cfg_switch_fallthrough():
    pf, cfg = snippet_cfg("switch (k) { case 1: a(); case 2: b(); break; default: c(); } d();")
    ids = {s.normalized: s.id for s in pf.statements}
    assert (ids["a();"], ids["b();"]) in cfg.edges
    assert (ids["break;"], ids["d();"]) in cfg.edges


@pytest.mark.parametrize("name", ["before.java", "after.java"])
def test_cfg_invariants_on_fixture(name):
    version = build_version(name, [(name, (FIXTURES / "litho" / name).read_text())])
    for idx, m in enumerate(version.methods):
        stmts = [version.statements[i] for i in m.statement_ids]
        cfg = build_cfg(m, stmts, idx)
        succ = cfg.successors()
        assert not succ[EXIT]
        assert all(b != ENTRY for _, b in cfg.edges)
        assert reachable(succ, ENTRY) == set(cfg.nodes)
