"""Grammar-constrained greedy decoding, beam search and sampling.

All decoders share a length budget: once the remaining steps equal the
fewest tokens needed to close the current action, only closing moves stay
allowed, so every output is a well-formed script.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .network import Batch, CommentUpdater


@dataclass
class Hypothesis:
    ids: list[int]  # extended ids, EOS excluded
    score: float  # length-normalised log-probability
    log_prob: float


def _check_budget(model: CommentUpdater, max_len: int):
    if max_len < model.grammar.max_min_finish:
        raise ValueError(f"max_len must be at least {model.grammar.max_min_finish}")


@torch.no_grad()
def greedy_decode(model: CommentUpdater, batch: Batch, max_len: int) -> list[list[int]]:
    _check_budget(model, max_len)
    model.eval()
    memory, hidden = model.encode(batch)
    B = hidden.shape[1]
    g = model.grammar
    states = torch.full((B,), g.start, dtype=torch.long)
    prev = torch.full((B,), model.comment_vocab.bos, dtype=torch.long)
    done = torch.zeros(B, dtype=torch.bool)
    out: list[list[int]] = [[] for _ in range(B)]
    eos = model.comment_vocab.eos
    for t in range(max_len):
        allowed = g.allowed_classes(states, max_len - t)
        step = model.decode_step(memory, hidden, prev, allowed)
        choice = step.probs.argmax(-1)
        for b in range(B):
            if not done[b] and int(choice[b]) != eos:
                out[b].append(int(choice[b]))
        states = g.advance(states, model.classes.of_ids(choice), ~done)
        done = done | (choice == eos)
        hidden, prev = step.hidden, choice
        if done.all():
            break
    return out


@torch.no_grad()
def beam_search(model: CommentUpdater, batch: Batch, width: int, max_len: int) -> list[list[Hypothesis]]:
    """Per input: up to ``width`` distinct finished hypotheses, best first."""
    if width < 1:
        raise ValueError("beam width must be >= 1")
    _check_budget(model, max_len)
    model.eval()
    g = model.grammar
    eos = model.comment_vocab.eos
    memory_all, hidden_all = model.encode(batch)
    results = []
    for b in range(hidden_all.shape[1]):
        memory = memory_all.select(torch.tensor([b]))
        hidden = hidden_all[:, b : b + 1]
        beams = [([], 0.0, g.start)]  # ids, log-prob, automaton state
        finished: list[Hypothesis] = []
        for t in range(max_len):
            n = len(beams)
            states = torch.tensor([s for _, _, s in beams])
            prev = torch.tensor([ids[-1] if ids else model.comment_vocab.bos for ids, _, _ in beams])
            step = model.decode_step(memory.select(torch.zeros(n, dtype=torch.long)), hidden, prev,
                                     g.allowed_classes(states, max_len - t))
            logp = torch.log(step.probs) + torch.tensor([lp for _, lp, _ in beams]).unsqueeze(-1)
            flat = logp.flatten()
            k = min(width, int(torch.isfinite(flat).sum()))
            top = torch.topk(flat, k)
            cand_beams, cand_rows = [], []
            for value, index in zip(top.values.tolist(), top.indices.tolist()):
                row, tok = divmod(index, logp.shape[1])
                ids = beams[row][0] + [tok]
                if tok == eos:
                    finished.append(Hypothesis(ids[:-1], value / len(ids), value))
                else:
                    cls = model.classes.of_ids(torch.tensor([tok]))
                    state = int(g.next[beams[row][2], cls])
                    cand_beams.append((ids, value, state))
                    cand_rows.append(row)
            if len(finished) >= width or not cand_beams:
                break
            beams = cand_beams
            hidden = step.hidden[:, torch.tensor(cand_rows)]
        finished.sort(key=lambda h: -h.score)
        unique, seen = [], set()
        for h in finished:
            if tuple(h.ids) not in seen:
                seen.add(tuple(h.ids))
                unique.append(h)
        results.append(unique[:width])
    return results


@torch.no_grad()
def sample_decode(model: CommentUpdater, batch: Batch, max_len: int, generator: torch.Generator | None = None,
                  repeats: int = 1) -> list[list[int]]:
    """Ancestral sampling; every input row is decoded ``repeats`` times."""
    _check_budget(model, max_len)
    model.eval()
    memory, hidden = model.encode(batch)
    if repeats > 1:
        idx = torch.arange(hidden.shape[1]).repeat_interleave(repeats)
        memory, hidden = memory.select(idx), hidden[:, idx]
    B = hidden.shape[1]
    g = model.grammar
    eos = model.comment_vocab.eos
    states = torch.full((B,), g.start, dtype=torch.long)
    prev = torch.full((B,), model.comment_vocab.bos, dtype=torch.long)
    done = torch.zeros(B, dtype=torch.bool)
    tokens = []
    for t in range(max_len):
        step = model.decode_step(memory, hidden, prev, g.allowed_classes(states, max_len - t))
        choice = torch.multinomial(step.probs, 1, generator=generator).squeeze(-1)
        choice = torch.where(done, torch.full_like(choice, eos), choice)
        tokens.append(choice)
        states = g.advance(states, model.classes.of_ids(choice), ~done)
        done = done | (choice == eos)
        hidden, prev = step.hidden, choice
        if done.all():
            break
    out = []
    for row in torch.stack(tokens, 1).tolist():
        out.append(row[: row.index(eos)] if eos in row else row)
    return out
