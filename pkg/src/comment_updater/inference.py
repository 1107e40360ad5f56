"""Turn decoded scripts into updated comments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import edit_script as es
from .model.batching import Vocabs, ids_to_tokens, make_batch
from .model.decoding import beam_search
from .model.network import CommentUpdater
from .pipeline import Example


@dataclass
class Prediction:
    id: str
    old_comment: list[str]
    candidates: list[list[str]]  # applied comments, best first; never empty
    scripts: list[list[str]]
    no_update: bool = False
    diagnostics: list[str] = field(default_factory=list)


def _clip(msg: str, limit: int = 160) -> str:
    return msg if len(msg) <= limit else msg[: limit - 3] + "..."


def apply_script_tokens(old_comment: Sequence[str], tokens: Sequence[str]) -> list[str]:
    """Deserialize and apply; raises MalformedScriptError or ApplyError."""
    return es.apply_edits(old_comment, es.deserialize(tokens, es.Side.COMMENT))


def predict(model: CommentUpdater, vocabs: Vocabs, examples: Sequence[Example], width: int, max_len: int,
            batch_size: int = 32) -> list[Prediction]:
    out = []
    for start in range(0, len(examples), batch_size):
        chunk = examples[start : start + batch_size]
        batch = make_batch(chunk, vocabs, with_target=False)
        for example, oov, hyps in zip(chunk, batch.oovs, beam_search(model, batch, width, max_len)):
            old = [] if example.comment_tokens == ["<s>"] else list(example.comment_tokens)
            pred = Prediction(example.id, old, [], [])
            seen = set()
            for h in hyps:
                tokens = ids_to_tokens(h.ids, vocabs.comment, oov)
                try:
                    applied = apply_script_tokens(old, tokens)
                except (es.MalformedScriptError, es.ApplyError) as exc:
                    pred.diagnostics.append(_clip(f"hypothesis skipped: {exc}"))
                    continue
                if tuple(applied) in seen:
                    continue
                seen.add(tuple(applied))
                pred.candidates.append(applied)
                pred.scripts.append(tokens)
            if not pred.candidates:
                pred.candidates = [old]
                pred.scripts = [[]]
                pred.no_update = True
            out.append(pred)
    return out
