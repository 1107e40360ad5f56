"""Reusable desk-scale experiments: toy overfit and the tiny-model gradient check."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import torch

from .config import Config
from .corpus import Sample
from .inference import predict
from .model.batching import Vocabs, make_batch
from .model.decoding import beam_search, greedy_decode
from .model.gradcheck import TensorReport, finite_difference_check
from .model.training import build_model, seed_everything, train
from .pipeline import preprocess
from .synthetic import toy_corpus


@dataclass
class OverfitResult:
    accuracy: float
    beam1_matches_greedy: bool
    seconds: float
    best_epoch: int
    mismatches: list[tuple[str, list[str], list[str]]] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)


def overfit_toy(epochs: int = 500, n: int = 50, seed: int = 0, cfg: Config | None = None, on_epoch=None) -> OverfitResult:
    cfg = cfg or Config(embed_dim=32, epochs=epochs, seed=seed)
    start = time.perf_counter()
    examples = [preprocess(s, cfg) for s in toy_corpus(n, seed)]
    result = train(examples, cfg, on_epoch=on_epoch)
    model, vocabs = result.model, result.vocabs
    model.eval()

    preds = predict(model, vocabs, examples, cfg.beam_width, cfg.max_decode_len, cfg.batch_size)
    hits, mismatches = 0, []
    for p, e in zip(preds, examples):
        if p.candidates[0] == e.new_comment_tokens:
            hits += 1
        else:
            mismatches.append((e.id, p.candidates[0], e.new_comment_tokens))

    same = True
    with torch.no_grad():
        for i in range(0, len(examples), cfg.batch_size):
            batch = make_batch(examples[i : i + cfg.batch_size], vocabs, with_target=False)
            greedy = greedy_decode(model, batch, cfg.max_decode_len)
            beams = beam_search(model, batch, 1, cfg.max_decode_len)
            same &= all(list(g) == list(b[0].ids) for g, b in zip(greedy, beams))

    return OverfitResult(hits / len(examples), same, time.perf_counter() - start, result.best_epoch, mismatches, result.history)


GRADCHECK_SAMPLE = Sample(
    "int f(int a) { return a; }",
    "int f(int b) { return b + 1; }",
    "/** returns a */",
    "/** returns b plus one */",
    "gradcheck",
)


def tiny_gradcheck(seed: int = 0, eps: float = 1e-4) -> tuple[list[TensorReport], float]:
    """Central-difference check of the full model at vocab 20, embed/encoder 8, decoder 16, streams <= 6."""
    cfg = Config(
        embed_dim=8, encoder_dim=8, decoder_dim=16, dropout=0.0, seed=seed, max_len=6,
        code_vocab_cap=20, syntax_vocab_cap=20, comment_vocab_cap=20,
    )
    seed_everything(seed)
    example = preprocess(GRADCHECK_SAMPLE, cfg)
    vocabs = Vocabs.build([example], cfg)
    model = build_model(cfg, vocabs)
    batch = make_batch([example], vocabs)
    start = time.perf_counter()
    reports = finite_difference_check(model, batch, eps=eps)
    return reports, time.perf_counter() - start
