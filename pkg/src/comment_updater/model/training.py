from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import torch

from ..config import Config
from ..pipeline import CODE_FEATURES, COMMENT_FEATURES, Example, syntax_feature_width
from .batching import Vocabs, make_batch
from .network import CommentUpdater

log = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    pass


@dataclass
class TrainResult:
    model: CommentUpdater
    vocabs: Vocabs
    history: list[dict] = field(default_factory=list)
    best_epoch: int = -1


def seed_everything(seed: int) -> None:
    torch.manual_seed(seed)
    np.random.seed(seed)


def build_model(cfg: Config, vocabs: Vocabs) -> CommentUpdater:
    return CommentUpdater(cfg, len(vocabs.code), len(vocabs.syntax), vocabs.comment,
                          CODE_FEATURES, syntax_feature_width(cfg), COMMENT_FEATURES)


def trainable(examples: Sequence[Example], cfg: Config) -> list[Example]:
    kept = [e for e in examples if e.target is not None and len(e.target) + 1 <= cfg.max_len]
    if len(kept) < len(examples):
        log.warning("%d examples without a target or with a target longer than %d tokens skipped",
                    len(examples) - len(kept), cfg.max_len)
    return kept


@torch.no_grad()
def perplexity(model: CommentUpdater, examples: Sequence[Example], vocabs: Vocabs, batch_size: int) -> float:
    model.eval()
    total, count = 0.0, 0
    for start in range(0, len(examples), batch_size):
        batch = make_batch(examples[start : start + batch_size], vocabs)
        total += model.token_nll(batch).sum().item()
        count += int(batch.target_mask.sum())
    return math.exp(total / count)


def train(
    train_examples: Sequence[Example],
    cfg: Config,
    val_examples: Sequence[Example] | None = None,
    vocabs: Vocabs | None = None,
    on_epoch: Callable[[dict], None] | None = None,
) -> TrainResult:
    """Teacher-forced cross-entropy with Adam; keeps the parameters with the lowest validation perplexity.

    Without a validation set the training perplexity (dropout off) is used.
    """
    seed_everything(cfg.seed)
    train_examples = trainable(train_examples, cfg)
    if not train_examples:
        raise ValueError("no trainable examples")
    val_examples = trainable(val_examples, cfg) if val_examples else list(train_examples)
    vocabs = vocabs or Vocabs.build(train_examples, cfg)
    model = build_model(cfg, vocabs)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    result = TrainResult(model, vocabs)
    best_ppl, best_state = math.inf, None

    for epoch in range(cfg.epochs):
        model.train()
        order = rng.permutation(len(train_examples))
        losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = make_batch([train_examples[i] for i in order[start : start + cfg.batch_size]], vocabs)
            loss = model.loss(batch)
            if not torch.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss {loss.item()} at epoch {epoch}, batch starting at {start}; "
                    f"last finite losses: {losses[-5:]}"
                )
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(loss.item())
        ppl = perplexity(model, val_examples, vocabs, cfg.batch_size)
        record = {"epoch": epoch, "train_loss": float(np.mean(losses)), "val_perplexity": ppl}
        result.history.append(record)
        if on_epoch:
            on_epoch(record)
        if ppl < best_ppl:
            best_ppl, best_state = ppl, copy.deepcopy(model.state_dict())
            result.best_epoch = epoch
    model.load_state_dict(best_state)
    model.eval()
    return result
