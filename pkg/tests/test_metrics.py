import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from changectx.metrics import MetricReport, bleu4, lcs_length, meteor, rouge_l, tokenize_message

from oracles import WORDS, brute_bleu, brute_lcs, brute_rouge, random_pairs

words = st.lists(st.sampled_from(WORDS), min_size=1, max_size=10)


def test_tokenize():
    assert tokenize_message("Fix NPE in Parser.parse()!") == ["fix", "npe", "in", "parser", ".", "parse", "(", ")", "!"]
    assert tokenize_message("") == []


@given(st.text(max_size=40))
def test_tokenize_idempotent(text):
    once = tokenize_message(text)
    assert tokenize_message(once) == once
    assert all(t for t in once)


# ------------------------------------------------------------------- BLEU


def test_bleu_frozen_value():
    # unigram 4/5, smoothed bigram 4/5, trigram 3/4, 4-gram 2/3; no brevity penalty
    got = bleu4("fix null check in parser", "fix null check in lexer")
    assert got == pytest.approx(100 * 0.32**0.25, abs=1e-9)
    assert got == pytest.approx(brute_bleu("fix null check in parser".split(), "fix null check in lexer".split()), abs=1e-6)


def test_bleu_brevity_penalty():
    assert bleu4("a b", "a b c d") == pytest.approx(100 * math.exp(-1), abs=1e-9)


def test_bleu_identity_and_empty():
    assert bleu4("add retry logic to client pool", "add retry logic to client pool") == pytest.approx(100)
    assert bleu4("", "fix it") == 0.0
    assert bleu4("zzz", "fix it") == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_bleu_matches_oracle(seed):
    for cand, ref in random_pairs(seed):
        assert abs(bleu4(cand, ref) - brute_bleu(cand.split(), ref.split())) <= 1e-6


# ---------------------------------------------------------------- ROUGE-L


def test_rouge_example():
    p, r = 0.75, 1.0
    expected = 100 * 2.44 * p * r / (r + 1.44 * p)
    assert rouge_l("a b c d", "a c d") == pytest.approx(expected, abs=1e-9)


def test_rouge_identity_and_disjoint():
    assert rouge_l("fix crash now", "fix crash now") == pytest.approx(100)
    assert rouge_l("alpha beta", "gamma delta") == 0.0
    assert rouge_l("", "gamma") == 0.0


@given(words, words)
def test_lcs_matches_recursive_oracle(a, b):
    assert lcs_length(a, b) == brute_lcs(tuple(a), tuple(b))


@pytest.mark.parametrize("seed", [3, 4])
def test_rouge_matches_oracle(seed):
    for cand, ref in random_pairs(seed):
        assert abs(rouge_l(cand, ref) - brute_rouge(cand.split(), ref.split())) <= 1e-6


# ----------------------------------------------------------------- METEOR


@pytest.mark.parametrize("m", [1, 2, 5, 9])
def test_meteor_chunk_fragmentation_closed_form(m):
    msg = " ".join(WORDS[:m])
    assert meteor(msg, msg, fragmentation="chunks") == pytest.approx(100 * (1 - 0.5 / m**3), abs=1e-9)


def test_meteor_identity_default():
    assert meteor("add retry logic to client pool", "add retry logic to client pool") == pytest.approx(100)


def test_meteor_stem_stage():
    assert meteor("fixes", "fix") == pytest.approx(100)
    assert meteor("fixes", "fix", fragmentation="chunks") == pytest.approx(50)


def test_meteor_no_overlap():
    assert meteor("alpha beta", "gamma delta") == 0.0
    assert meteor("", "gamma") == 0.0


def test_meteor_scrambled_order():
    # three single-word chunks: full fragmentation under either mode
    assert meteor("the cat sat", "cat the sat") == pytest.approx(50)
    assert meteor("the cat sat", "cat the sat", fragmentation="chunks") == pytest.approx(50)


def test_meteor_partial_hand_value():
    # m=2, P=2/3, R=1, one chunk
    p, r = 2 / 3, 1.0
    fmean = 10 * p * r / (r + 9 * p)
    assert meteor("fix the bug", "fix the") == pytest.approx(100 * fmean)
    assert meteor("fix the bug", "fix the", fragmentation="chunks") == pytest.approx(100 * fmean * (1 - 0.5 / 8))


def test_meteor_unknown_mode():
    with pytest.raises(ValueError):
        meteor("a", "a", fragmentation="nope")


# -------------------------------------------------------------- properties


@given(words, st.lists(st.sampled_from(WORDS), min_size=1, max_size=10))
def test_scores_bounded_and_identity_maximal(ref, other):
    cand = (other * len(ref))[: len(ref)]
    r, c = " ".join(ref), " ".join(cand)
    for fn in (bleu4, rouge_l, meteor):
        s = fn(c, r)
        assert 0.0 <= s <= 100.0 + 1e-9
        assert s <= fn(r, r) + 1e-9
        assert fn(r, r) == pytest.approx(100)


def test_report_means():
    pairs = [("fix a", "fix a"), ("b", "c"), ("add x y", "add x z")]
    rep = MetricReport.from_pairs(pairs)
    assert rep.count == 3
    for key in ("bleu4", "rouge_l", "meteor"):
        assert getattr(rep, key) == pytest.approx(sum(r[key] for r in rep.per_example) / 3)
    assert MetricReport.from_pairs([]).count == 0
