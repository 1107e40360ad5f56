"""Three encoders, one pointer-augmented decoder.

The GRU is written out by hand (input projections batched over time, the
recurrence in a loop) so the whole model stays a plain function of its
parameters and can be vmapped for finite-difference checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import torch
from torch import Tensor, nn

from ..config import Config
from ..masks import NEG_INF
from .grammar import Grammar, TokenClasses


class GRULayer(nn.Module):
    """One direction of one GRU layer."""

    def __init__(self, input_size: int, hidden_size: int):
        super().__init__()
        self.hidden_size = hidden_size
        self.w_ih = nn.Linear(input_size, 3 * hidden_size)
        self.w_hh = nn.Linear(hidden_size, 3 * hidden_size)

    def cell(self, gi: Tensor, h: Tensor) -> Tensor:
        i_r, i_z, i_n = gi.chunk(3, -1)
        h_r, h_z, h_n = self.w_hh(h).chunk(3, -1)
        r = torch.sigmoid(i_r + h_r)
        z = torch.sigmoid(i_z + h_z)
        n = torch.tanh(i_n + r * h_n)
        return (1 - z) * n + z * h

    def step(self, x: Tensor, h: Tensor) -> Tensor:
        return self.cell(self.w_ih(x), h)

    def forward(self, x: Tensor, mask: Tensor) -> tuple[Tensor, Tensor]:
        """x [B,T,I], mask [B,T] -> outputs [B,T,H], last valid state [B,H]."""
        gi = self.w_ih(x)
        h = x.new_zeros(x.shape[0], self.hidden_size)
        outs = []
        for t in range(x.shape[1]):
            # padded steps carry the state through unchanged
            h = torch.where(mask[:, t, None], self.cell(gi[:, t], h), h)
            outs.append(h)
        return torch.stack(outs, 1), h


def _reverse_index(mask: Tensor) -> Tensor:
    """Per-row index that reverses the valid prefix and leaves padding in place."""
    lengths = mask.sum(1, keepdim=True)
    t = torch.arange(mask.shape[1], device=mask.device).expand_as(mask)
    return torch.where(t < lengths, lengths - 1 - t, t)


def _gather_time(x: Tensor, idx: Tensor) -> Tensor:
    return torch.gather(x, 1, idx.unsqueeze(-1).expand(*idx.shape, x.shape[-1]))


class BiGRU(nn.Module):
    def __init__(self, input_size: int, hidden_size: int, num_layers: int, dropout: float):
        super().__init__()
        self.fwd = nn.ModuleList()
        self.bwd = nn.ModuleList()
        for layer in range(num_layers):
            size = input_size if layer == 0 else 2 * hidden_size
            self.fwd.append(GRULayer(size, hidden_size))
            self.bwd.append(GRULayer(size, hidden_size))
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: Tensor, mask: Tensor) -> tuple[Tensor, Tensor]:
        rev = _reverse_index(mask)
        for layer, (f, b) in enumerate(zip(self.fwd, self.bwd)):
            if layer:
                x = self.dropout(x)
            out_f, h_f = f(x, mask)
            out_b, h_b = b(_gather_time(x, rev), mask)
            x = torch.cat([out_f, _gather_time(out_b, rev)], -1)
        return x * mask.unsqueeze(-1), torch.cat([h_f, h_b], -1)


def masked_softmax(logits: Tensor, allowed: Tensor, fallback: Tensor | None = None) -> Tensor:
    """Softmax over ``allowed`` entries; rows with none allowed use ``fallback`` instead (uniform over it)."""
    if fallback is not None:
        empty = ~allowed.any(-1, keepdim=True)
        logits = torch.where(empty, torch.zeros_like(logits), logits)
        allowed = torch.where(empty, fallback, allowed)
    return torch.softmax(logits.masked_fill(~allowed, float("-inf")), -1)


class StreamEncoder(nn.Module):
    def __init__(self, embedding: nn.Embedding, n_features: int, cfg: Config, self_attention: bool = False):
        super().__init__()
        self.embedding = embedding
        self.rnn = BiGRU(cfg.embed_dim + n_features, cfg.encoder_dim, cfg.num_layers, cfg.dropout)
        width = 2 * cfg.encoder_dim
        self.self_attention = self_attention
        if self_attention:
            self.query = nn.Linear(width, width)
            self.key = nn.Linear(width, width)
            self.value = nn.Linear(width, width)
        self.out_dim = 2 * width if self_attention else width

    def forward(self, ids: Tensor, feats: Tensor, mask: Tensor, bias: Tensor | None = None):
        """Returns states [B,T,out_dim], final [B,2H], and the self-attention weights (or None)."""
        x = torch.cat([self.embedding(ids), feats], -1)
        states, final = self.rnn(x, mask)
        if not self.self_attention:
            return states, final, None
        q, k, v = self.query(states), self.key(states), self.value(states)
        scores = q @ k.transpose(1, 2) / math.sqrt(q.shape[-1])
        key_ok = mask.unsqueeze(1).expand_as(scores)
        allowed = (bias > NEG_INF / 2) & key_ok
        weights = masked_softmax(scores + bias.masked_fill(~allowed, 0.0), allowed, fallback=key_ok)
        attended = weights @ v
        return torch.cat([states, attended], -1) * mask.unsqueeze(-1), final, weights


class AdditiveAttention(nn.Module):
    """alpha_i = softmax_i(v^T tanh(W q + U h_i)); context = sum_i alpha_i h_i."""

    def __init__(self, query_dim: int, key_dim: int, attn_dim: int):
        super().__init__()
        self.W = nn.Linear(query_dim, attn_dim, bias=False)
        self.U = nn.Linear(key_dim, attn_dim)
        self.v = nn.Linear(attn_dim, 1, bias=False)

    def keys(self, states: Tensor) -> Tensor:
        return self.U(states)

    def forward(self, query: Tensor, keys: Tensor, states: Tensor, mask: Tensor) -> tuple[Tensor, Tensor]:
        scores = self.v(torch.tanh(self.W(query).unsqueeze(1) + keys)).squeeze(-1)
        alpha = masked_softmax(scores, mask)
        return (alpha.unsqueeze(-1) * states).sum(1), alpha


@dataclass
class Batch:
    code_ids: Tensor
    code_feats: Tensor
    code_mask: Tensor
    syn_ids: Tensor
    syn_feats: Tensor
    syn_mask: Tensor
    syn_bias: Tensor
    com_ids: Tensor
    com_feats: Tensor
    com_mask: Tensor
    src_ext: Tensor  # [B, Lc+Lm] copy sources in the extended comment vocabulary
    src_copyable: Tensor  # [B, Lc+Lm]
    n_ext: int  # vocabulary size plus the largest per-sample OOV list
    oovs: list[list[str]]
    target: Tensor | None = None  # [B, T] extended ids ending with EOS, PAD after
    target_mask: Tensor | None = None

    def to(self, dtype: torch.dtype) -> Batch:
        changes = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if torch.is_tensor(v) and v.is_floating_point():
                changes[f.name] = v.to(dtype)
        return Batch(**{**{f.name: getattr(self, f.name) for f in fields(self)}, **changes})


@dataclass
class Memory:
    """Encoder outputs needed at every decoding step; rows can be re-selected for beams."""

    code: Tensor
    code_keys: Tensor
    code_mask: Tensor
    syn: Tensor
    syn_keys: Tensor
    syn_mask: Tensor
    com: Tensor
    com_keys: Tensor
    com_mask: Tensor
    copy_keys: Tensor  # [B, Lc+Lm, D]
    src_ext: Tensor
    src_class: Tensor
    src_copyable: Tensor
    n_ext: int

    def select(self, idx: Tensor) -> Memory:
        return Memory(**{
            f.name: getattr(self, f.name).index_select(0, idx) if torch.is_tensor(getattr(self, f.name)) else getattr(self, f.name)
            for f in fields(self)
        })


@dataclass
class StepOutput:
    probs: Tensor  # [B, n_ext], grammar-masked, rows sum to 1
    hidden: Tensor  # [layers, B, D]
    gate: Tensor  # [B]
    gen_probs: Tensor
    copy_probs: Tensor  # over source positions


class CommentUpdater(nn.Module):
    def __init__(self, cfg: Config, code_vocab: int, syntax_vocab: int, comment_vocab, code_features: int,
                 syntax_features: int, comment_features: int):
        super().__init__()
        self.cfg = cfg
        self.comment_vocab = comment_vocab
        V = len(comment_vocab)
        E, H, D, L = cfg.embed_dim, cfg.encoder_dim, cfg.decoder_dim, cfg.num_layers
        self.code_embedding = nn.Embedding(code_vocab, E)
        self.syntax_embedding = nn.Embedding(syntax_vocab, E)
        self.comment_embedding = nn.Embedding(V, E)  # shared by the comment encoder and the decoder
        self.code_encoder = StreamEncoder(self.code_embedding, code_features, cfg)
        self.syntax_encoder = StreamEncoder(self.syntax_embedding, syntax_features, cfg, self_attention=True)
        self.comment_encoder = StreamEncoder(self.comment_embedding, comment_features, cfg)
        ctx = self.code_encoder.out_dim + self.syntax_encoder.out_dim + self.comment_encoder.out_dim
        self.context_dim = ctx
        self.attn_code = AdditiveAttention(D, self.code_encoder.out_dim, D)
        self.attn_syn = AdditiveAttention(D, self.syntax_encoder.out_dim, D)
        self.attn_com = AdditiveAttention(D, self.comment_encoder.out_dim, D)
        self.init_hidden = nn.Linear(3 * 2 * H, L * D)
        self.decoder = nn.ModuleList([GRULayer(E + ctx if i == 0 else D, D) for i in range(L)])
        self.decoder_dropout = nn.Dropout(cfg.dropout)
        self.output = nn.Linear(D + ctx, D)
        self.generator = nn.Linear(D, V)
        self.copy_code = nn.Linear(self.code_encoder.out_dim, D, bias=False)
        self.copy_com = nn.Linear(self.comment_encoder.out_dim, D, bias=False)
        self.gate = nn.Linear(D + ctx + E, 1)
        self.grammar = Grammar()
        self.classes = TokenClasses(comment_vocab)
        self.reset_parameters()

    def reset_parameters(self, value: float | None = None):
        with torch.no_grad():
            for p in self.parameters():
                if value is None:
                    p.uniform_(-self.cfg.init_range, self.cfg.init_range)
                else:
                    p.fill_(value)

    # ------------------------------------------------------------------ encoding

    def encode(self, batch: Batch) -> tuple[Memory, Tensor]:
        code, code_final, _ = self.code_encoder(batch.code_ids, batch.code_feats, batch.code_mask)
        syn, syn_final, _ = self.syntax_encoder(batch.syn_ids, batch.syn_feats, batch.syn_mask, batch.syn_bias)
        com, com_final, _ = self.comment_encoder(batch.com_ids, batch.com_feats, batch.com_mask)
        B = code.shape[0]
        h0 = torch.tanh(self.init_hidden(torch.cat([code_final, syn_final, com_final], -1)))
        hidden = h0.view(B, self.cfg.num_layers, self.cfg.decoder_dim).transpose(0, 1)
        memory = Memory(
            code=code, code_keys=self.attn_code.keys(code), code_mask=batch.code_mask,
            syn=syn, syn_keys=self.attn_syn.keys(syn), syn_mask=batch.syn_mask,
            com=com, com_keys=self.attn_com.keys(com), com_mask=batch.com_mask,
            copy_keys=torch.cat([self.copy_code(code), self.copy_com(com)], 1),
            src_ext=batch.src_ext, src_class=self.classes.of_ids(batch.src_ext),
            src_copyable=batch.src_copyable, n_ext=batch.n_ext,
        )
        return memory, hidden

    def attend(self, memory: Memory, query: Tensor) -> Tensor:
        c1, _ = self.attn_code(query, memory.code_keys, memory.code, memory.code_mask)
        c2, _ = self.attn_syn(query, memory.syn_keys, memory.syn, memory.syn_mask)
        c3, _ = self.attn_com(query, memory.com_keys, memory.com, memory.com_mask)
        return torch.cat([c1, c2, c3], -1)

    # ------------------------------------------------------------------ decoding

    def embed_target(self, ids: Tensor) -> Tensor:
        V = len(self.comment_vocab)
        return self.comment_embedding(torch.where(ids < V, ids, torch.full_like(ids, self.comment_vocab.unk)))

    def decode_step(self, memory: Memory, hidden: Tensor, prev: Tensor, allowed_classes: Tensor) -> StepOutput:
        """One step; ``allowed_classes`` [B, n_classes] comes from the grammar automaton."""
        ctx = self.attend(memory, hidden[-1])
        emb = self.embed_target(prev)
        x = torch.cat([emb, ctx], -1)
        new_hidden = []
        for layer, cell in enumerate(self.decoder):
            if layer:
                x = self.decoder_dropout(x)
            h = cell.step(x, hidden[layer])
            new_hidden.append(h)
            x = h
        top = new_hidden[-1]
        o = self.decoder_dropout(torch.tanh(self.output(torch.cat([top, ctx], -1))))

        gen_allowed = allowed_classes[:, self.classes.of_vocab]
        gen = masked_softmax(self.generator(o), gen_allowed)

        copy_allowed = memory.src_copyable & torch.gather(allowed_classes, 1, memory.src_class)
        can_copy = copy_allowed.any(-1)
        copy_scores = (memory.copy_keys @ o.unsqueeze(-1)).squeeze(-1)
        copy = masked_softmax(copy_scores, copy_allowed, fallback=torch.ones_like(copy_allowed))
        copy = copy * copy_allowed

        gate = torch.sigmoid(self.gate(torch.cat([top, ctx, emb], -1))).squeeze(-1)
        gate = torch.where(can_copy, gate, torch.ones_like(gate))
        probs = torch.cat([gate.unsqueeze(-1) * gen, gen.new_zeros(gen.shape[0], memory.n_ext - gen.shape[1])], -1)
        probs = probs.scatter_add(1, memory.src_ext, (1 - gate).unsqueeze(-1) * copy)
        return StepOutput(probs, torch.stack(new_hidden), gate, gen, copy)

    def token_nll(self, batch: Batch) -> Tensor:
        """Teacher-forced negative log-likelihood of every target token, [B, T] (0 on padding)."""
        memory, hidden = self.encode(batch)
        B, T = batch.target.shape
        states = torch.full((B,), self.grammar.start, dtype=torch.long)
        prev = torch.full((B,), self.comment_vocab.bos, dtype=torch.long)
        nll = []
        for t in range(T):
            allowed = self.grammar.allowed_classes(states)
            out = self.decode_step(memory, hidden, prev, allowed)
            hidden = out.hidden
            y = batch.target[:, t]
            valid = batch.target_mask[:, t]
            p = out.probs.gather(1, y.unsqueeze(-1)).squeeze(-1)
            nll.append(torch.where(valid, -torch.log(p.clamp_min(1e-30)), torch.zeros_like(p)))
            cls = self.classes.of_ids(y)
            states = torch.where(valid, self.grammar.next[states, cls].clamp_min(0), states)
            prev = y
        return torch.stack(nll, 1)

    def loss(self, batch: Batch) -> Tensor:
        nll = self.token_nll(batch)
        return nll.sum() / batch.target_mask.sum()

