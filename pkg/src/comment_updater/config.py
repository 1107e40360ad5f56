from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

# coarse classes of the statement that owns a syntax node; anything unlisted is "other"
DEFAULT_TYPE_CLASSES: dict[str, list[str]] = {
    "declaration": ["VariableDeclaration"],
    "selection": ["IfStatement"],
    "loop": ["WhileStatement", "ForStatement"],
    "return": ["ReturnStatement"],
    "signature": ["MethodDeclaration", "Parameter"],
}


@dataclass
class Config:
    embed_dim: int = 64
    encoder_dim: int = 64  # per direction
    decoder_dim: int = 128
    num_layers: int = 2
    dropout: float = 0.6
    lr: float = 1e-3
    batch_size: int = 32
    beam_width: int = 5
    beta: float = 1.0
    code_vocab_cap: int = 30000
    syntax_vocab_cap: int = 10000
    comment_vocab_cap: int = 30000
    min_freq: int = 1
    seed: int = 0
    epochs: int = 30
    token_only_fallback: bool = True
    max_len: int = 200  # per input stream and per target script
    max_decode_len: int = 100
    init_range: float = 0.08
    type_classes: dict[str, list[str]] = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_TYPE_CLASSES.items()})

    def __post_init__(self):
        for name in ("embed_dim", "encoder_dim", "decoder_dim", "num_layers", "batch_size", "beam_width",
                     "code_vocab_cap", "syntax_vocab_cap", "comment_vocab_cap", "min_freq", "epochs",
                     "max_len", "max_decode_len"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must be in [0, 1)")
        if self.lr <= 0 or self.beta < 0 or self.init_range < 0:
            raise ValueError("lr must be positive, beta and init_range non-negative")

    @property
    def type_class_names(self) -> list[str]:
        return [*self.type_classes, "other"]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Config:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> Config:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def replace(self, **changes) -> Config:
        return Config.from_dict({**self.to_dict(), **changes})
