"""Sentence-level BLEU-4, ROUGE-L and METEOR for commit messages.

All scores are percentages in [0, 100].
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from nltk.stem import PorterStemmer

_WORD_RE = re.compile(r"\w+|[^\w\s]")
_stemmer = PorterStemmer()


def tokenize_message(text: str | Sequence[str]) -> list[str]:
    """Lowercase word tokens with punctuation split off. Idempotent."""
    if not isinstance(text, str):
        text = " ".join(text)
    return _WORD_RE.findall(text.lower())


def _tokens(x) -> list[str]:
    return tokenize_message(x)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate, reference) -> float:
    """BLEU with uniform weights over n = 1..4.

    Clipped n-gram precision; +1 added to numerator and denominator for
    n >= 2 so short messages do not collapse to zero; brevity penalty
    exp(1 - r/c) when the candidate is shorter than the reference.
    """
    cand, ref = _tokens(candidate), _tokens(reference)
    if not cand or not ref:
        return 0.0
    log_sum = 0.0
    for n in range(1, 5):
        c_counts, r_counts = ngrams(cand, n), ngrams(ref, n)
        hits = sum(min(c, r_counts[g]) for g, c in c_counts.items())
        total = sum(c_counts.values())
        if n == 1:
            if hits == 0:
                return 0.0
            p = hits / total
        else:
            p = (hits + 1) / (total + 1)
        log_sum += math.log(p) / 4
    bp = 1.0 if len(cand) >= len(ref) else math.exp(1 - len(ref) / len(cand))
    return 100.0 * bp * math.exp(log_sum)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference, beta: float = 1.2) -> float:
    cand, ref = _tokens(candidate), _tokens(reference)
    if not cand or not ref:
        return 0.0
    lcs = lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    p, r = lcs / len(cand), lcs / len(ref)
    return 100.0 * (1 + beta**2) * p * r / (r + beta**2 * p)


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    return _stemmer.stem(word)


def align_unigrams(cand: Sequence[str], ref: Sequence[str]) -> list[tuple[int, int]]:
    """Two-stage unigram alignment: exact forms, then Porter stems.

    Within a stage each candidate token takes the unmatched reference token
    of the same form that continues the previous match if possible, else the
    leftmost one.
    """
    used_c: set[int] = set()
    used_r: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for key in (lambda w: w, stem):
        last = -2
        cand_keys = [key(w) for w in cand]
        ref_keys = [key(w) for w in ref]
        for i, k in enumerate(cand_keys):
            if i in used_c:
                last = dict(pairs).get(i, -2)
                continue
            options = [j for j, rk in enumerate(ref_keys) if rk == k and j not in used_r]
            if not options:
                continue
            j = last + 1 if last + 1 in options else options[0]
            used_c.add(i)
            used_r.add(j)
            pairs.append((i, j))
            last = j
    pairs.sort()
    return pairs


def count_chunks(pairs: Sequence[tuple[int, int]]) -> int:
    chunks = 0
    prev: Optional[tuple[int, int]] = None
    for i, j in sorted(pairs):
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(candidate, reference, *, alpha: float = 0.9, gamma: float = 0.5, beta: float = 3.0, fragmentation: str = "breaks") -> float:
    """METEOR without the synonym stage.

    Fmean = 10PR / (R + 9P). The fragmentation penalty is gamma * frag**beta.
    ``fragmentation="chunks"`` uses the textbook frag = chunks / m, under which
    a perfect match of m words still loses 0.5 / m**3. The default
    ``"breaks"`` counts chunk breaks instead, frag = (chunks - 1) / (m - 1),
    so a single contiguous in-order alignment scores exactly 100 and the
    worst case still reaches the full gamma penalty.
    """
    cand, ref = _tokens(candidate), _tokens(reference)
    if not cand or not ref:
        return 0.0
    pairs = align_unigrams(cand, ref)
    m = len(pairs)
    if m == 0:
        return 0.0
    p, r = m / len(cand), m / len(ref)
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    chunks = count_chunks(pairs)
    if fragmentation == "chunks":
        frag = chunks / m
    elif fragmentation == "breaks":
        frag = 0.0 if m == 1 else (chunks - 1) / (m - 1)
    else:
        raise ValueError(f"unknown fragmentation mode {fragmentation!r}")
    return 100.0 * fmean * (1 - gamma * frag**beta)


METRICS = {"bleu4": bleu4, "rouge_l": rouge_l, "meteor": meteor}


@dataclass
class MetricReport:
    bleu4: float = 0.0
    rouge_l: float = 0.0
    meteor: float = 0.0
    count: int = 0
    per_example: list[dict] = field(default_factory=list, repr=False)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[str, str]]) -> "MetricReport":
        rows = [score_pair(c, r) for c, r in pairs]
        return cls.from_rows(rows)

    @classmethod
    def from_rows(cls, rows: Sequence[dict]) -> "MetricReport":
        n = len(rows)
        if n == 0:
            return cls()
        return cls(
            bleu4=sum(r["bleu4"] for r in rows) / n,
            rouge_l=sum(r["rouge_l"] for r in rows) / n,
            meteor=sum(r["meteor"] for r in rows) / n,
            count=n,
            per_example=list(rows),
        )

    def summary(self) -> dict:
        return {"meteor": self.meteor, "rouge_l": self.rouge_l, "bleu4": self.bleu4, "count": self.count}


def score_pair(candidate: str, reference: str) -> dict:
    return {name: fn(candidate, reference) for name, fn in METRICS.items()}
