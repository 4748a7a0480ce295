"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import random
import statistics
import time

import pytest

from changectx.cli import main
from changectx.encoder import CONTEXT, DEFAULT_BUDGET, encode_change, encode_surrounding
from changectx.metrics import bleu4, meteor, rouge_l
from changectx.miner import mine_records, mine_repo
from changectx.parser import build_version
from changectx.pdg import build_pdg
from changectx.pipeline import analyze, represent
from changectx.retrieval import evaluate
from changectx.slicer import SliceConfig, slice, slice_distances

from checks import marker_mismatches
from gitfixture import _render, _stmt, make_repo, synthetic_history
from miner_fixture import filter_table
from oracles import brute_bleu, brute_rouge, random_pairs
from pdg_oracle import count, exhaustive_programs, oracle_edges, random_program, render
from test_encoder import litho_files
from test_slicer import figure_pdg, random_pdg


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\nacceptance {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def history(tmp_path_factory):
    """Three synthetic repositories, about 540 commits in total."""
    root = tmp_path_factory.mktemp("acceptance")
    rng = random.Random(2024)
    for name, n in (("alpha", 200), ("beta", 180), ("gamma", 160)):
        make_repo(root / name, synthetic_history(rng, n, n_methods=5))
    (root / "repos.txt").write_text("alpha\nbeta\ngamma\n")
    return root


@pytest.fixture(scope="module")
def mined_changes(history):
    out = []
    for name in ("alpha", "beta", "gamma"):
        out.extend(c.files for c in mine_repo(history / name))
    return out


def test_1_pdg_oracle_equivalence(capsys):
    start = time.perf_counter()
    programs = list(exhaustive_programs(5))
    rng = random.Random(1)
    programs += [random_program(rng, max_statements=15, n_vars=3) for _ in range(3000)]
    bad = 0
    for prog in programs:
        assert count(prog) <= 15
        src, _ = render(prog)
        got = set(build_pdg(build_version("after", [("G.java", src)])).edges)
        bad += got != oracle_edges(prog)
    elapsed = time.perf_counter() - start
    verdict(capsys, 1, bad == 0 and elapsed < 60, f"{len(programs)} programs, {bad} disagreements, {elapsed:.1f}s")


def test_2_depth_fixture(capsys):
    pdg = figure_pdg()
    d1 = slice(pdg, {13}, SliceConfig(depth=1))
    d2 = slice(pdg, {13}, SliceConfig(depth=2))
    ok = d1 == {9, 10, 13, 14} and d2 - d1 == {0}
    verdict(capsys, 2, ok, f"depth1={sorted(d1)} depth2={sorted(d2)}")


def test_3_slice_monotonicity(capsys):
    rng = random.Random(3)
    violations = 0
    for _ in range(1000):
        pdg = random_pdg(rng)
        seeds = set(rng.sample(sorted(pdg.nodes), rng.randint(1, min(3, len(pdg.nodes)))))
        sizes = [slice(pdg, seeds, SliceConfig(depth=k)) for k in range(1, 6)]
        violations += sum(not a <= b for a, b in zip(sizes, sizes[1:]))
    verdict(capsys, 3, violations == 0, f"1000 graphs, {violations} violations")


def test_4_motivating_exclusion(capsys):
    target = "int lineCount = getLineCount();"
    leaks = [d for d in range(1, 6) if target in represent(litho_files(), SliceConfig(depth=d))[1].render()]
    commit = analyze(litho_files())
    window = encode_surrounding(commit.before, commit.after, commit.changeset, window=3).render()
    ok = not leaks and target in window
    verdict(capsys, 4, ok, f"leaking depths={leaks}, window includes it={target in window}")


def test_5_marker_soundness(capsys, mined_changes):
    cfg = SliceConfig()
    checked = bad = 0
    for files in mined_changes:
        commit, rep = represent(files, cfg, budget=10**6)
        if not commit.changeset.size:
            continue
        checked += 1
        bad += bool(marker_mismatches(commit, rep, cfg))
    verdict(capsys, 5, checked >= 500 and bad == 0, f"{checked} commits, {bad} mismatches")


def test_6_metric_oracles(capsys):
    worst = 0.0
    for seed in range(3):
        for cand, ref in random_pairs(100 + seed):
            worst = max(worst, abs(bleu4(cand, ref) - brute_bleu(cand.split(), ref.split())))
            worst = max(worst, abs(rouge_l(cand, ref) - brute_rouge(cand.split(), ref.split())))
    msgs = [ref for _, ref in random_pairs(7)]
    ident = min(min(f(m, m) for f in (bleu4, rouge_l, meteor)) for m in msgs)
    ok = worst <= 1e-6 and abs(ident - 100) <= 1e-9
    verdict(capsys, 6, ok, f"max oracle gap={worst:.2e}, min identity score={ident:.6f}")


def test_7_filter_table(capsys, tmp_path):
    rows = filter_table()
    repo = make_repo(tmp_path / "table", [c for c, _ in rows])
    got = [r.verdict for r in mine_records([repo])]
    want = [v for _, v in rows]
    wrong = [i for i, (g, w) in enumerate(zip(got, want)) if g != w]
    ok = len(got) == 12 and not wrong
    verdict(capsys, 7, ok, f"{len(got)} commits, wrong verdicts at {wrong}")


def test_8_self_retrieval(capsys, history):
    recs = [r for r in mine_records([history / "alpha"]) if r.kept]
    report = evaluate(recs, recs, breakdowns=())
    o = report.overall
    scores = (round(o.bleu4, 2), round(o.rouge_l, 2), round(o.meteor, 2))
    verdict(capsys, 8, scores == (100.0, 100.0, 100.0), f"{o.count} commits, scores={scores}")


def test_9_token_budget(capsys, mined_changes):
    silent = checked = truncated = 0
    cfg = SliceConfig()
    for files in mined_changes:
        commit = analyze(files)
        for budget in (DEFAULT_BUDGET, 64, 8):
            rep = encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, cfg, budget)
            if not rep.entries:
                continue
            checked += 1
            truncated += rep.truncated
            if rep.token_count > budget:
                only_marked = all(e.marker != CONTEXT for e in rep.entries)
                silent += not (rep.truncated and only_marked)
    verdict(capsys, 9, silent == 0, f"{checked} representations, {truncated} truncated, {silent} silent overruns")


def big_commit(rng):
    methods = [[_stmt(rng, 10 * m + k) for k in range(20)] for m in range(10)]
    before = _render(methods)
    for m in rng.sample(range(10), 4):
        methods[m].insert(rng.randrange(20), _stmt(rng, 900 + m))
        methods[m][rng.randrange(20)] = _stmt(rng, 950 + m)
    return [("Big.java", before, _render(methods))]


def test_10_throughput(capsys):
    files = big_commit(random.Random(10))
    cfg = SliceConfig()
    explore, build = [], []
    size = 0
    for _ in range(10):
        t0 = time.perf_counter()
        commit = analyze(files)
        slice_distances(commit.before_pdg, commit.changeset.removed, cfg)
        slice_distances(commit.after_pdg, commit.changeset.added, cfg)
        t1 = time.perf_counter()
        encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, cfg)
        t2 = time.perf_counter()
        explore.append(t1 - t0)
        build.append(t2 - t1)
        size = len(commit.after.statements)
    e, b = statistics.median(explore), statistics.median(build)
    ok = size >= 200 and e <= 1.0 and b <= 0.1
    verdict(capsys, 10, ok, f"{size} statements, explore={e * 1000:.1f}ms, encode={b * 1000:.1f}ms")


def test_11_determinism(capsys, history, tmp_path):
    for tag in ("first", "second"):
        d = tmp_path / tag
        d.mkdir()
        assert main(["mine", str(history / "repos.txt"), "--out", str(d / "corpus.jsonl")]) == 0
        assert main(["encode", str(d / "corpus.jsonl"), "--out", str(d / "encoded.jsonl")]) == 0
        assert main(["eval", str(d / "encoded.jsonl"), "--out", str(d / "report.jsonl")]) == 0
    names = ("corpus.jsonl", "encoded.jsonl", "report.jsonl")
    diff = [n for n in names if (tmp_path / "first" / n).read_bytes() != (tmp_path / "second" / n).read_bytes()]
    sizes = [len((tmp_path / "first" / n).read_bytes()) for n in names]
    ok = not diff and all(sizes)
    verdict(capsys, 11, ok, f"differing files={diff}, sizes={sizes}")
