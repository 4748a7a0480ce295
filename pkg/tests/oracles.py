"""Slow, obviously-correct reference scorers used only by the tests."""

import math
import random
from functools import lru_cache

WORDS = "fix add remove update null check parser lexer crash in the to for of test cache retry pool client".split()


def brute_bleu(cand: list[str], ref: list[str]) -> float:
    if not cand or not ref:
        return 0.0
    logs = 0.0
    for n in range(1, 5):
        cand_grams = [cand[i : i + n] for i in range(len(cand) - n + 1)]
        pool = [ref[i : i + n] for i in range(len(ref) - n + 1)]
        hits = 0
        for g in cand_grams:
            for k, r in enumerate(pool):
                if r == g:
                    hits += 1
                    del pool[k]
                    break
        total = len(cand_grams)
        if n == 1:
            if hits == 0:
                return 0.0
            p = hits / total
        else:
            p = (hits + 1) / (total + 1)
        logs += 0.25 * math.log(p)
    c, r = len(cand), len(ref)
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return 100 * bp * math.exp(logs)


def brute_lcs(a: list[str], b: list[str]) -> int:
    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def brute_rouge(cand, ref, beta=1.2) -> float:
    if not cand or not ref:
        return 0.0
    lcs = brute_lcs(tuple(cand), tuple(ref))
    if not lcs:
        return 0.0
    p, r = lcs / len(cand), lcs / len(ref)
    return 100 * (1 + beta * beta) * p * r / (r + beta * beta * p)


def random_pairs(seed: int, n: int = 100):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        ref = [rng.choice(WORDS) for _ in range(rng.randint(1, 12))]
        cand = [rng.choice(WORDS) for _ in range(rng.randint(1, 12))]
        if rng.random() < 0.3:  # overlapping stretch
            k = rng.randint(0, len(ref))
            cand = ref[:k] + cand[: rng.randint(0, 3)]
            cand = cand or [rng.choice(WORDS)]
        out.append((" ".join(cand), " ".join(ref)))
    return out
