"""Vocabularies over preprocessed examples and padded tensor batches."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import torch

from .. import edit_script as es
from ..config import Config
from ..masks import NEG_INF
from ..pipeline import Example
from . import grammar
from .network import Batch
from .vocab import BOS, EOS, Vocabulary


@dataclass
class Vocabs:
    code: Vocabulary
    syntax: Vocabulary
    comment: Vocabulary  # old comments and target scripts

    @classmethod
    def build(cls, examples: Sequence[Example], cfg: Config) -> Vocabs:
        return cls(
            code=Vocabulary.build((e.code_tokens for e in examples), cfg.code_vocab_cap, cfg.min_freq, es.KEYWORDS),
            syntax=Vocabulary.build((e.syntax_tokens for e in examples), cfg.syntax_vocab_cap, cfg.min_freq),
            comment=Vocabulary.build(
                (tok for e in examples for tok in (e.comment_tokens, e.target or [])),
                cfg.comment_vocab_cap,
                cfg.min_freq,
                grammar.RESERVED_ORDER,
            ),
        )

    def to_dict(self) -> dict:
        return {"code": self.code.to_list(), "syntax": self.syntax.to_list(), "comment": self.comment.to_list()}

    @classmethod
    def from_dict(cls, d: dict) -> Vocabs:
        return cls(*(Vocabulary.from_list(d[k]) for k in ("code", "syntax", "comment")))


def _pad(rows: list[list[int]], value: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [value] * (width - len(r)) for r in rows], dtype=torch.long)


def _pad_feats(arrays: list[np.ndarray]) -> torch.Tensor:
    width = max(a.shape[0] for a in arrays)
    out = np.zeros((len(arrays), width, arrays[0].shape[1]), dtype=np.float32)
    for i, a in enumerate(arrays):
        out[i, : a.shape[0]] = a
    return torch.from_numpy(out)


def _mask(rows: list[list]) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([[True] * len(r) + [False] * (width - len(r)) for r in rows])


def make_batch(examples: Sequence[Example], vocabs: Vocabs, with_target: bool = True) -> Batch:
    cv = vocabs.comment
    V = len(cv)
    oovs: list[list[str]] = []
    src_ext, src_copyable = [], []
    width_c = max(len(e.code_tokens) for e in examples)
    for e in examples:
        oov: list[str] = []
        ext, copyable = [], []

        def ext_id(tok: str) -> int:
            if tok in cv:
                return cv[tok]
            if tok not in oov:
                oov.append(tok)
            return V + oov.index(tok)

        # code positions then comment positions; each stream padded to its batch width
        for tok in e.code_tokens:
            ext.append(ext_id(tok))
            copyable.append(tok not in es.RESERVED and tok != BOS)
        pad_c = width_c - len(e.code_tokens)
        ext += [cv.pad] * pad_c
        copyable += [False] * pad_c
        for tok in e.comment_tokens:
            ext.append(ext_id(tok))
            copyable.append(tok != BOS)
        oovs.append(oov)
        src_ext.append(ext)
        src_copyable.append(copyable)
    width_src = max(len(r) for r in src_ext)
    src_ext = [r + [cv.pad] * (width_src - len(r)) for r in src_ext]
    src_copyable = [r + [False] * (width_src - len(r)) for r in src_copyable]

    width_s = max(len(e.syntax_tokens) for e in examples)
    bias = np.full((len(examples), width_s, width_s), NEG_INF, dtype=np.float32)
    for i, e in enumerate(examples):
        n = len(e.syntax_tokens)
        bias[i, :n, :n] = e.mask

    target = target_mask = None
    if with_target:
        rows = []
        for e, oov in zip(examples, oovs):
            if e.target is None:
                raise ValueError(f"example {e.id} has no target")
            row = [cv[t] if t in cv else (V + oov.index(t) if t in oov else cv.unk) for t in e.target]
            rows.append(row + [cv[EOS]])
        target = _pad(rows, cv.pad)
        target_mask = _mask(rows)

    return Batch(
        code_ids=_pad([vocabs.code.encode(e.code_tokens) for e in examples], vocabs.code.pad),
        code_feats=_pad_feats([e.code_features for e in examples]),
        code_mask=_mask([e.code_tokens for e in examples]),
        syn_ids=_pad([vocabs.syntax.encode(e.syntax_tokens) for e in examples], vocabs.syntax.pad),
        syn_feats=_pad_feats([e.syntax_features for e in examples]),
        syn_mask=_mask([e.syntax_tokens for e in examples]),
        syn_bias=torch.from_numpy(bias),
        com_ids=_pad([cv.encode(e.comment_tokens) for e in examples], cv.pad),
        com_feats=_pad_feats([e.comment_features for e in examples]),
        com_mask=_mask([e.comment_tokens for e in examples]),
        src_ext=torch.tensor(src_ext, dtype=torch.long),
        src_copyable=torch.tensor(src_copyable, dtype=torch.bool),
        n_ext=V + max((len(o) for o in oovs), default=0),
        oovs=oovs,
        target=target,
        target_mask=target_mask,
    )


def ids_to_tokens(ids: Sequence[int], vocab: Vocabulary, oov: list[str]) -> list[str]:
    V = len(vocab)
    return [vocab.itos[i] if i < V else oov[i - V] for i in ids]
