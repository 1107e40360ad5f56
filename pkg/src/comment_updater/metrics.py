"""Exact match, top-k recall, word-level edit distances, GLEU and SARI.

GLEU follows Napoles et al.'s reference script (n-gram order 4, the
source-penalised precision, brevity term ``min(0, 1 - r/c)``) with
statistics summed over the corpus.  SARI follows Xu et al.'s reference
script: keep F1, deletion precision and addition F1 averaged over n = 1..4;
the corpus score is the mean sentence score.  Both are scaled to 0-100 and
computed on tokens as given (no lowercasing).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

Tokens = Sequence[str]


@dataclass(frozen=True)
class EvalRecord:
    old_comment: tuple[str, ...]
    gold: tuple[str, ...]
    predictions: tuple[tuple[str, ...], ...]  # ranked, best first

    def __post_init__(self):
        object.__setattr__(self, "old_comment", tuple(self.old_comment))
        object.__setattr__(self, "gold", tuple(self.gold))
        object.__setattr__(self, "predictions", tuple(tuple(p) for p in self.predictions))
        if not self.predictions:
            raise ValueError("a record needs at least one prediction")
        if not self.gold:
            raise ValueError("gold comment is empty")

    @property
    def top1(self) -> tuple[str, ...]:
        return self.predictions[0]


def levenshtein(a: Tokens, b: Tokens) -> int:
    """Token-level edit distance (unit-cost insert, delete, substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _require(records: Sequence[EvalRecord]):
    if not records:
        raise ValueError("no records")


def accuracy(records: Sequence[EvalRecord]) -> float:
    _require(records)
    return sum(r.top1 == r.gold for r in records) / len(records)


def recall_at_k(records: Sequence[EvalRecord], k: int) -> float:
    _require(records)
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(r.gold in r.predictions[:k] for r in records) / len(records)


def aed(records: Sequence[EvalRecord]) -> float:
    _require(records)
    return sum(levenshtein(r.top1, r.gold) for r in records) / len(records)


def red_with_exclusions(records: Sequence[EvalRecord]) -> tuple[float, int]:
    """Mean of d(prediction, gold) / d(old, gold); records with old == gold are excluded and counted."""
    _require(records)
    ratios, excluded = [], 0
    for r in records:
        denom = levenshtein(r.old_comment, r.gold)
        if denom == 0:
            excluded += 1
            continue
        ratios.append(levenshtein(r.top1, r.gold) / denom)
    if not ratios:
        raise ValueError("every record has old comment == gold; relative edit distance undefined")
    return sum(ratios) / len(ratios), excluded


def red(records: Sequence[EvalRecord]) -> float:
    return red_with_exclusions(records)[0]


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


# ---------------------------------------------------------------------------
# GLEU


def gleu_stats(hypothesis: Tokens, reference: Tokens, source: Tokens, order: int = 4) -> list[int]:
    stats = [len(hypothesis), len(reference)]
    for n in range(1, order + 1):
        h, r, s = _ngrams(hypothesis, n), _ngrams(reference, n), _ngrams(source, n)
        source_only = s - r
        stats.append(max(sum((h & r).values()) - sum((h & source_only).values()), 0))
        stats.append(max(len(hypothesis) + 1 - n, 0))
    return stats


def gleu_from_stats(stats: Sequence[int], order: int = 4) -> float:
    if any(x == 0 for x in stats):
        return 0.0
    c, r = stats[:2]
    log_prec = sum(math.log(x / y) for x, y in zip(stats[2::2], stats[3::2])) / order
    return math.exp(min(0.0, 1 - r / c) + log_prec)


def gleu(records: Sequence[EvalRecord], order: int = 4) -> float:
    _require(records)
    totals = [0] * (2 + 2 * order)
    for rec in records:
        for i, x in enumerate(gleu_stats(rec.top1, rec.gold, rec.old_comment, order)):
            totals[i] += x
    return 100 * gleu_from_stats(totals, order)


# ---------------------------------------------------------------------------
# SARI


@dataclass(frozen=True)
class SariComponents:
    keep: float  # F1
    delete: float  # precision
    add: float  # F1

    @property
    def score(self) -> float:
        return (self.keep + self.delete + self.add) / 3


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p > 0 or r > 0 else 0.0


def _sari_ngram(source: Counter, output: Counter, reference: Counter) -> tuple[float, float, float]:
    # single reference, so the reference-count replication of the multi-reference script is a no-op
    keep_sys = source & output
    keep_good = keep_sys & reference
    keep_all = source & reference
    keep_p = sum(keep_good[g] / keep_sys[g] for g in keep_sys) / len(keep_sys) if keep_sys else 0.0
    keep_r = sum(keep_good[g] / keep_all[g] for g in keep_sys if keep_all[g]) / len(keep_all) if keep_all else 0.0

    del_sys = source - output
    del_good = del_sys - reference
    del_p = sum(del_good[g] / del_sys[g] for g in del_sys) / len(del_sys) if del_sys else 0.0

    add_sys = set(output) - set(source)
    add_good = add_sys & set(reference)
    add_all = set(reference) - set(source)
    add_p = len(add_good) / len(add_sys) if add_sys else 0.0
    add_r = len(add_good) / len(add_all) if add_all else 0.0
    return _f1(keep_p, keep_r), del_p, _f1(add_p, add_r)


def sari_components(source: Tokens, output: Tokens, reference: Tokens, order: int = 4) -> SariComponents:
    parts = [_sari_ngram(_ngrams(source, n), _ngrams(output, n), _ngrams(reference, n)) for n in range(1, order + 1)]
    keep, delete, add = (sum(p[i] for p in parts) / order for i in range(3))
    return SariComponents(keep, delete, add)


def sari(records: Sequence[EvalRecord], order: int = 4) -> float:
    _require(records)
    return 100 * sum(sari_components(r.old_comment, r.top1, r.gold, order).score for r in records) / len(records)


def evaluation_report(records: Sequence[EvalRecord], k: int = 5) -> dict:
    try:
        red_value, excluded = red_with_exclusions(records)
    except ValueError:
        red_value, excluded = None, len(records)
    return {
        "accuracy": accuracy(records),
        f"recall_at_{k}": recall_at_k(records, k),
        "aed": aed(records),
        "red": red_value,
        "gleu": gleu(records),
        "sari": sari(records),
        "n": len(records),
        "excluded_degenerate": excluded,
    }
