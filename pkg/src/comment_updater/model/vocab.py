from __future__ import annotations

from collections import Counter
from typing import Iterable

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
SPECIALS = (PAD, UNK, BOS, EOS)


class Vocabulary:
    """Bijective token/index map with the special tokens at fixed low indices."""

    def __init__(self, tokens: Iterable[str] = (), reserved: Iterable[str] = ()):
        self.itos: list[str] = []
        self.stoi: dict[str, int] = {}
        for tok in (*SPECIALS, *reserved, *tokens):
            if tok not in self.stoi:
                self.stoi[tok] = len(self.itos)
                self.itos.append(tok)

    @classmethod
    def build(cls, corpus: Iterable[Iterable[str]], cap: int, min_freq: int = 1, reserved: Iterable[str] = ()) -> Vocabulary:
        counts = Counter(tok for seq in corpus for tok in seq)
        reserved = list(reserved)
        skip = set(SPECIALS) | set(reserved)
        # most frequent first, ties broken alphabetically for determinism
        ranked = sorted((t for t, c in counts.items() if c >= min_freq and t not in skip), key=lambda t: (-counts[t], t))
        return cls(ranked[:max(cap - len(SPECIALS) - len(reserved), 0)], reserved)

    def __len__(self):
        return len(self.itos)

    def __contains__(self, tok: str):
        return tok in self.stoi

    def __getitem__(self, tok: str) -> int:
        return self.stoi.get(tok, self.stoi[UNK])

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self[t] for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.itos[i] for i in ids]

    @property
    def pad(self) -> int:
        return self.stoi[PAD]

    @property
    def unk(self) -> int:
        return self.stoi[UNK]

    @property
    def bos(self) -> int:
        return self.stoi[BOS]

    @property
    def eos(self) -> int:
        return self.stoi[EOS]

    def to_list(self) -> list[str]:
        return list(self.itos)

    @classmethod
    def from_list(cls, itos: list[str]) -> Vocabulary:
        if list(itos[: len(SPECIALS)]) != list(SPECIALS):
            raise ValueError("vocabulary must start with the special tokens")
        if len(set(itos)) != len(itos):
            raise ValueError("duplicate tokens in vocabulary")
        v = cls()
        v.itos = list(itos)
        v.stoi = {t: i for i, t in enumerate(itos)}
        return v
