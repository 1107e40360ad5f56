"""Finite automaton over comment-side script tokens.

It accepts exactly the token streams that ``deserialize`` turns into a
comment-side script, followed by EOS.  Every state also knows the fewest
tokens needed to reach acceptance, which lets decoding close any open action
before a length budget runs out.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import torch

from .. import edit_script as es
from .vocab import BOS, EOS, PAD, Vocabulary


class Mode(enum.Enum):
    OUT = "out"
    TAG = "tag"  # after <INSERTTAG>
    TAG_BOC = "tag_boc"  # anchored tag, after <INSERTTAG> <BOC>; may stay empty
    INS = "ins"
    DEL = "del"
    UFROM = "ufrom"
    UTO = "uto"
    END = "end"


# token classes: EOS, each reserved token by text, DATA, INVALID
EOS_CLASS = EOS
DATA = "<data>"
INVALID = "<invalid>"
RESERVED_ORDER = (*es.KEYWORDS, es.BOC, es.ESCAPE)
CLASSES = (EOS_CLASS, *RESERVED_ORDER, DATA, INVALID)
CLASS_INDEX = {c: i for i, c in enumerate(CLASSES)}

_OPEN = {es.UPDATE_FROM: Mode.UFROM, es.DEL: Mode.DEL, es.INSERT_TAG: Mode.TAG}
# span mode -> (closing keyword, mode after it)
_CLOSE = {
    Mode.TAG: (es.INSERT, Mode.INS),
    Mode.TAG_BOC: (es.INSERT, Mode.INS),
    Mode.INS: (es.INSERT_END, Mode.OUT),
    Mode.DEL: (es.DEL_END, Mode.OUT),
    Mode.UFROM: (es.UPDATE_TO, Mode.UTO),
    Mode.UTO: (es.UPDATE_END, Mode.OUT),
}


@dataclass(frozen=True)
class State:
    mode: Mode = Mode.OUT
    filled: bool = False  # current span has at least one token
    escaped: bool = False  # previous token was <ESC>


START = State()
ACCEPT = State(Mode.END)


def step(state: State, cls: str) -> State | None:
    """Successor state, or None when ``cls`` is not allowed."""
    m = state.mode
    if m is Mode.END:
        return None
    if m is Mode.OUT:
        if cls == EOS_CLASS:
            return ACCEPT
        if cls in _OPEN:
            return State(_OPEN[cls])
        return None
    if state.escaped:
        if m is Mode.TAG and not state.filled and cls == es.BOC:
            return None  # a literal <BOC> cannot open a plain tag
        return State(m, True) if cls in RESERVED_ORDER else None
    if cls == DATA:
        return State(m, True)
    if cls == es.ESCAPE:
        return State(m, state.filled, True)
    if m is Mode.TAG and not state.filled and cls == es.BOC:
        return State(Mode.TAG_BOC)
    closer, after = _CLOSE[m]
    if (state.filled or m is Mode.TAG_BOC) and cls == closer:
        return State(after)
    return None


def token_class(tok: str) -> str:
    if tok == EOS:
        return EOS_CLASS
    if tok in es.RESERVED:
        return tok
    if tok in (PAD, BOS):
        return INVALID
    return DATA


def accepts(tokens: list[str]) -> bool:
    """True when ``tokens`` (without the final EOS) is a well-formed script."""
    s = START
    for tok in [*tokens, EOS]:
        s = step(s, token_class(tok))
        if s is None:
            return False
    return s == ACCEPT


class Grammar:
    """Tabulated automaton for batched masking."""

    def __init__(self):
        seen = {START: 0, ACCEPT: 1}
        order = [START, ACCEPT]
        queue = deque([START])
        while queue:
            s = queue.popleft()
            for c in CLASSES:
                t = step(s, c)
                if t is not None and t not in seen:
                    seen[t] = len(order)
                    order.append(t)
                    queue.append(t)
        self.states = order
        self.index = seen
        n, k = len(order), len(CLASSES)
        self.next = torch.full((n, k), -1, dtype=torch.long)
        for s, i in seen.items():
            for c, j in CLASS_INDEX.items():
                t = step(s, c)
                if t is not None:
                    self.next[i, j] = seen[t]
        # finished rows in a batch keep emitting EOS
        self.next[seen[ACCEPT], CLASS_INDEX[EOS_CLASS]] = seen[ACCEPT]
        # shortest distance to acceptance, by backward relaxation
        INF = 10**9
        dist = [INF] * n
        dist[seen[ACCEPT]] = 0
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(k):
                    t = int(self.next[i, j])
                    if t >= 0 and dist[t] + 1 < dist[i]:
                        dist[i] = dist[t] + 1
                        changed = True
        self.min_finish = torch.tensor(dist, dtype=torch.long)
        self.start = seen[START]
        self.accept = seen[ACCEPT]

    @cached_property
    def max_min_finish(self) -> int:
        return int(self.min_finish.max())

    def allowed_classes(self, states: torch.Tensor, remaining: int | torch.Tensor | None = None) -> torch.Tensor:
        """Bool [B, n_classes]: classes allowed in each state.

        With ``remaining`` (tokens still allowed, this one included) only
        classes that can still reach acceptance within the budget are kept.
        """
        nxt = self.next[states]
        ok = nxt >= 0
        if remaining is not None:
            need = self.min_finish[nxt.clamp_min(0)]
            rem = torch.as_tensor(remaining).reshape(-1, 1) if torch.is_tensor(remaining) else remaining
            ok = ok & (need <= rem - 1)
        return ok

    def advance(self, states: torch.Tensor, classes: torch.Tensor, active: torch.Tensor | None = None) -> torch.Tensor:
        """Next states; rows outside ``active`` keep their state."""
        nxt = self.next[states, classes]
        if active is not None:
            nxt = torch.where(active, nxt, states)
        if (nxt < 0).any():
            raise ValueError("grammar violation while advancing")
        return nxt


class TokenClasses:
    """Class id of every generation-vocabulary entry; extended (copied) ids are DATA."""

    def __init__(self, vocab: Vocabulary):
        self.vocab_size = len(vocab)
        self.of_vocab = torch.tensor([CLASS_INDEX[token_class(t)] for t in vocab.itos], dtype=torch.long)

    def of_ids(self, ids: torch.Tensor) -> torch.Tensor:
        data = torch.full_like(ids, CLASS_INDEX[DATA])
        in_vocab = ids < self.vocab_size
        return torch.where(in_vocab, self.of_vocab[ids.clamp_max(self.vocab_size - 1)], data)
