"""Nearest-neighbour message retrieval over bag-of-words representations.

Also hosts the evaluation harness: chronological splitting and the
ablation / depth / change-size breakdowns.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .encoder import DEFAULT_BUDGET, encode_change
from .metrics import MetricReport, score_pair
from .pdg import CONTROL, DATA, OUTPUT
from .pipeline import AnalyzedCommit, analyze
from .slicer import SliceConfig

BowVector = Counter


class EmptyCorpus(ValueError):
    pass


def vectorize(text: str, vocabulary: Optional[Iterable[str]] = None) -> BowVector:
    """Whitespace term counts. ``+``/``-`` markers count as terms.

    Terms outside ``vocabulary`` (when given) are dropped.
    """
    counts = Counter(text.split())
    if vocabulary is not None:
        vocab = vocabulary if isinstance(vocabulary, (set, frozenset)) else set(vocabulary)
        counts = Counter({t: c for t, c in counts.items() if t in vocab})
    return counts


def _norm2(v: BowVector) -> int:
    return sum(c * c for c in v.values())


def _dot(a: BowVector, b: BowVector) -> int:
    if len(a) > len(b):
        a, b = b, a
    return sum(c * b[t] for t, c in a.items() if t in b)


def cosine(a: BowVector, b: BowVector) -> float:
    na, nb = _norm2(a), _norm2(b)
    if not na or not nb:
        return 0.0
    return min(1.0, _dot(a, b) / math.sqrt(na * nb))


def _exact_sq(dot: int, na: int, nb: int) -> Fraction:
    if not na or not nb:
        return Fraction(0)
    return Fraction(dot * dot, na * nb)


def nearest_index(query: BowVector, corpus: Sequence[BowVector]) -> int:
    """Index of the most cosine-similar vector; lowest index wins ties.

    Floats pick the candidates, exact rational comparison of squared
    cosines settles near-ties, so the tie rule does not depend on rounding.
    """
    if not corpus:
        raise EmptyCorpus("retrieval corpus is empty")
    nq = _norm2(query)
    stats = [(_dot(query, v), _norm2(v)) for v in corpus]
    floats = [d / math.sqrt(nq * nv) if nq and nv else 0.0 for d, nv in stats]
    top = max(floats)
    best, best_val = -1, Fraction(-1)
    for i, f in enumerate(floats):
        if f >= top - 1e-9:
            val = _exact_sq(stats[i][0], nq, stats[i][1])
            if val > best_val:
                best, best_val = i, val
    return best


def nearest(query: BowVector, corpus: Sequence[tuple[BowVector, str]]) -> str:
    return corpus[nearest_index(query, [v for v, _ in corpus])][1]


class RetrievalIndex:
    """Training representations and messages with a frozen vocabulary."""

    def __init__(self, texts: Sequence[str], messages: Sequence[str]):
        if len(texts) != len(messages):
            raise ValueError("texts and messages differ in length")
        self.vectors = [vectorize(t) for t in texts]
        self.messages = list(messages)
        self.vocabulary = frozenset(t for v in self.vectors for t in v)

    def generate(self, text: str) -> str:
        return self.messages[nearest_index(vectorize(text, self.vocabulary), self.vectors)]


# ---------------------------------------------------------------- splitting


@dataclass
class Split:
    train: list = field(default_factory=list)
    valid: list = field(default_factory=list)
    test: list = field(default_factory=list)


def chronological_split(records: Sequence, ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)) -> Split:
    """Per repository, in corpus order: first share train, next valid, rest test.

    Shares are floored for train and valid; the test split takes the
    remainder.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ValueError(f"split ratios must be three non-negative shares summing to 1, got {ratios}")
    by_repo: dict[str, list] = {}
    for r in records:
        by_repo.setdefault(r.repo, []).append(r)
    out = Split()
    for rows in by_repo.values():
        n = len(rows)
        n_train = math.floor(n * ratios[0] + 1e-9)
        n_valid = math.floor(n * ratios[1] + 1e-9)
        out.train += rows[:n_train]
        out.valid += rows[n_train : n_train + n_valid]
        out.test += rows[n_train + n_valid :]
    return out


# ---------------------------------------------------------------- buckets

BUCKETS = (
    ("From 1 to 5", 1, 5),
    ("From 5 to 10", 6, 10),
    ("From 10 to 15", 11, 15),
    ("Over 15", 16, None),
)


def bucket_of(changed: int) -> Optional[str]:
    """Bucket label; bounds are [1,5], (5,10], (10,15], (15, inf)."""
    for label, lo, hi in BUCKETS:
        if changed >= lo and (hi is None or changed <= hi):
            return label
    return None


# ---------------------------------------------------------------- evaluation

ABLATIONS = (
    ("Changed code", None),
    ("Changed code + control dependence", frozenset({CONTROL})),
    ("Changed code + data dependence", frozenset({DATA})),
    ("Changed code + program dependence", frozenset({CONTROL, DATA})),
)
DEPTHS = (1, 2, 3, 4, 5)
GENERATOR = "nngen"


@dataclass(frozen=True)
class ReportRow:
    section: str
    label: str
    report: MetricReport

    def as_dict(self) -> dict:
        return {"section": self.section, "label": self.label, "generator": GENERATOR, **self.report.summary()}


@dataclass
class EvaluationReport:
    rows: list[ReportRow]
    predictions: list[dict]

    def section(self, name: str) -> list[ReportRow]:
        return [r for r in self.rows if r.section == name]

    @property
    def overall(self) -> MetricReport:
        return self.section("overall")[0].report

    def jsonl(self) -> str:
        return "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n" for r in self.rows)

    def table(self) -> str:
        width = max(len(r.label) for r in self.rows)
        lines = [f"{'Section':<9} {'Setting':<{width}}  {'METEOR':>7}  {'ROUGE-L':>7}  {'BLEU-4':>7}  {'N':>5}"]
        for r in self.rows:
            m = r.report
            lines.append(f"{r.section:<9} {r.label:<{width}}  {m.meteor:7.2f}  {m.rouge_l:7.2f}  {m.bleu4:7.2f}  {m.count:>5}")
        return "\n".join(lines) + "\n"


def _encode(commit: AnalyzedCommit, config: SliceConfig, budget: int, context: bool = True) -> str:
    return encode_change(commit.before_pdg, commit.after_pdg, commit.changeset, config, budget, context=context).render()


def _score(index: RetrievalIndex, queries: Sequence[str], refs: Sequence[str]) -> tuple[MetricReport, list[str]]:
    generated = [index.generate(q) for q in queries]
    rows = [score_pair(g, r) for g, r in zip(generated, refs)]
    return MetricReport.from_rows(rows), generated


def evaluate(
    test: Sequence,
    train: Sequence,
    config: Optional[SliceConfig] = None,
    budget: int = DEFAULT_BUDGET,
    *,
    breakdowns: Iterable[str] = ("ablation", "depth", "buckets"),
    use_stored: bool = True,
) -> EvaluationReport:
    """Score retrieval on ``test`` using ``train`` as the database.

    Records need ``files``, ``message_clean`` and ``changed_statement_count``.
    The overall row uses each record's stored ``representation`` when present
    and ``use_stored`` is set; every breakdown row re-encodes under its own
    configuration so only the representation varies between rows.
    """
    config = config or SliceConfig()
    breakdowns = set(breakdowns)
    cache: dict[int, AnalyzedCommit] = {}

    def commit_of(rec) -> AnalyzedCommit:
        key = id(rec)
        if key not in cache:
            cache[key] = analyze(rec.files, output_deps=OUTPUT in config.edge_kinds)
        return cache[key]

    def reps(records, cfg: SliceConfig, context: bool = True, stored: bool = False) -> list[str]:
        out = []
        for rec in records:
            if stored and getattr(rec, "representation", None) is not None:
                out.append(rec.representation)
            else:
                out.append(_encode(commit_of(rec), cfg, budget, context))
        return out

    def run(cfg: SliceConfig, context: bool = True, stored: bool = False):
        index = RetrievalIndex(reps(train, cfg, context, stored), [r.message_clean for r in train])
        return _score(index, reps(test, cfg, context, stored), [r.message_clean for r in test])

    refs = [r.message_clean for r in test]
    overall, generated = run(config, stored=use_stored)
    rows = [ReportRow("overall", f"depth={config.depth}", overall)]
    predictions = [
        {"repo": r.repo, "commit_id": r.commit_id, "reference": ref, "generated": g, **s}
        for r, ref, g, s in zip(test, refs, generated, overall.per_example)
    ]

    if "ablation" in breakdowns:
        for label, kinds in ABLATIONS:
            if kinds is None:
                rep, _ = run(config, context=False)
            else:
                rep, _ = run(SliceConfig(config.depth, config.directions, kinds, config.interprocedural))
            rows.append(ReportRow("ablation", label, rep))
    if "depth" in breakdowns:
        for d in DEPTHS:
            rep, _ = run(SliceConfig(d, config.directions, config.edge_kinds, config.interprocedural))
            rows.append(ReportRow("depth", f"Deep {d}", rep))
    if "buckets" in breakdowns:
        for label, _, _ in BUCKETS:
            picked = [p for p, r in zip(overall.per_example, test) if bucket_of(r.changed_statement_count) == label]
            rows.append(ReportRow("bucket", label, MetricReport.from_rows(picked)))
    return EvaluationReport(rows, predictions)
