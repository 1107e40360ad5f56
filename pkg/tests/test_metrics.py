import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from comment_updater.metrics import (
    EvalRecord, accuracy, aed, evaluation_report, gleu, levenshtein, recall_at_k, red,
    red_with_exclusions, sari, sari_components,
)
from oracles import edit_distance, random_edit, sari_exact

seqs = st.lists(st.sampled_from("abcd"), max_size=12)


def rec(old, gold, *preds):
    return EvalRecord(old.split(), gold.split(), [p.split() for p in preds])


# --------------------------------------------------------------------- edit distance


@pytest.mark.parametrize("a, b, d", [("a b c", "a b c", 0), ("a b", "a c", 1), ("", "x y z", 3), ("a b c", "c a b", 2)])
def test_levenshtein_examples(a, b, d):
    assert levenshtein(a.split(), b.split()) == d


@given(seqs, seqs)
def test_levenshtein_matches_dp_oracle(a, b):
    assert levenshtein(a, b) == edit_distance(a, b) == levenshtein(b, a)


@given(seqs, seqs, seqs)
def test_levenshtein_triangle(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def test_aed_examples():
    assert aed([rec("x", "a b", "a c"), rec("x", "a b c", "d")]) == 2.0
    assert aed([rec("x", "a b", "a b")]) == 0.0
    echo = [rec("a b c", "a d", "a b c"), rec("p", "p q", "p")]
    assert aed(echo) == (2 + 1) / 2
    with pytest.raises(ValueError):
        aed([])


def test_red_examples():
    assert red([rec("a b c", "a d", "a b c"), rec("p", "p q r", "p")]) == 1.0
    assert red([rec("a b", "a c", "a c")]) == 0.0
    # ratios 1/2 and 2/1, degenerate record excluded
    mixed = [rec("a b", "c d", "a d"), rec("a", "b", "c d"), rec("s", "s", "t")]
    assert red_with_exclusions(mixed) == (1.25, 1)
    with pytest.raises(ValueError, match="undefined"):
        red([rec("a", "a", "b")])


def test_report_survives_all_degenerate():
    report = evaluation_report([rec("a", "a", "a")], k=5)
    assert report["red"] is None and report["excluded_degenerate"] == 1
    assert report["accuracy"] == 1.0 and report["aed"] == 0.0


# --------------------------------------------------------------------- accuracy and recall


def test_rank_three_counts_for_recall_only():
    r = [rec("o", "g", "x", "y", "g", "z")]
    assert accuracy(r) == 0.0
    assert recall_at_k(r, 5) == 1.0 and recall_at_k(r, 2) == 0.0


def random_records(rng, n):
    out = []
    for _ in range(n):
        gold = [rng.choice("ab") for _ in range(rng.randint(1, 3))]
        preds = [[rng.choice("ab") for _ in range(rng.randint(0, 3))] for _ in range(rng.randint(1, 6))]
        out.append(EvalRecord(["o"], gold, preds))
    return out


@given(st.integers(0, 10_000))
def test_recall_laws(seed):
    records = random_records(random.Random(seed), 8)
    assert recall_at_k(records, 1) == accuracy(records)
    values = [recall_at_k(records, k) for k in range(1, 8)]
    assert values == sorted(values)


def test_record_validation():
    with pytest.raises(ValueError):
        EvalRecord(["a"], ["b"], [])
    with pytest.raises(ValueError):
        EvalRecord(["a"], [], [["b"]])
    with pytest.raises(ValueError):
        recall_at_k([rec("a", "b", "b")], 0)


# --------------------------------------------------------------------- GLEU


def test_gleu_perfect_edit_is_100():
    assert gleu([rec("returns the old value", "returns the new value now", "returns the new value now")]) == 100.0


def test_gleu_hand_cases():
    # unigram precision with the source penalty: matches {a, b}, minus the source-only c -> 1/3
    assert gleu([rec("a b c", "a b d", "a b c")], order=1) == pytest.approx(100 / 3)
    # all unigrams right but short: brevity term 1 - 3/2
    assert gleu([rec("a b c", "a b d", "a d")], order=1) == pytest.approx(100 * math.exp(-0.5))
    # any empty n-gram statistic zeroes the score
    assert gleu([rec("a b c", "a b d", "a b d")]) == 0.0
    assert gleu([rec("a b c", "a b d", "a b d")], order=2) == 100.0


def test_gleu_is_corpus_level():
    # statistics pool before the geometric mean, so a zero sentence does not zero the corpus
    records = [rec("a b c d", "a b c e", "a b c e"), rec("x", "y", "z")]
    assert 0 < gleu(records) < 100


# --------------------------------------------------------------------- SARI


def test_sari_keep_component_is_full_on_identity():
    s = "returns the number of items".split()
    parts = sari_components(s, s, s)
    assert parts.keep == 1.0 and parts.delete == 0.0 and parts.add == 0.0


def test_sari_hand_cases():
    # one substitution on 3 tokens; per-order keep/delete/add by hand: n=1 (1,1,1), n=2 (1,1,1), n=3 (0,1,1), n=4 empty
    assert sari([rec("a b c", "a b d", "a b d")]) == pytest.approx(200 / 3)
    # copying the source: keep F1 0.8 and 2/3 for n = 1, 2; nothing deleted or added
    assert sari([rec("a b c", "a b d", "a b c")]) == pytest.approx(100 * (0.8 + 2 / 3) / 12)


@given(seqs, seqs, seqs)
def test_sari_matches_exact_oracle(src, out, ref):
    assert sari_components(src, out, ref).score == pytest.approx(float(sari_exact(src, out, ref)), abs=1e-12)


@given(seqs, seqs, seqs)
def test_sari_in_range(src, out, ref):
    assert 0.0 <= sari_components(src, out, ref).score <= 1.0


def test_sari_oracle_on_edit_pairs():
    rng = random.Random(3)
    for _ in range(200):
        src = [rng.choice("abcdef") for _ in range(rng.randint(1, 12))]
        ref = random_edit(rng, src, list("abcdefg"), rng.randint(1, 3))
        out = random_edit(rng, src, list("abcdefg"), rng.randint(0, 3))
        assert sari_components(src, out, ref).score == pytest.approx(float(sari_exact(src, out, ref)), abs=1e-12)
    assert isinstance(sari_exact(["a"], ["a"], ["a"]), Fraction)
