from __future__ import annotations

from pathlib import Path

import torch

from ..config import Config
from .batching import Vocabs
from .network import CommentUpdater

FORMAT_VERSION = 1


class CheckpointVersionError(RuntimeError):
    pass


def save_checkpoint(path: str | Path, model: CommentUpdater, vocabs: Vocabs, cfg: Config, extra: dict | None = None) -> None:
    torch.save(
        {
            "format_version": FORMAT_VERSION,
            "config": cfg.to_dict(),
            "vocabs": vocabs.to_dict(),
            "state_dict": model.state_dict(),
            "extra": extra or {},
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[CommentUpdater, Vocabs, Config]:
    from .training import build_model

    data = torch.load(path, map_location="cpu", weights_only=True)
    version = data.get("format_version") if isinstance(data, dict) else None
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(f"checkpoint {path} has format version {version}, expected {FORMAT_VERSION}")
    cfg = Config.from_dict(data["config"])
    vocabs = Vocabs.from_dict(data["vocabs"])
    model = build_model(cfg, vocabs)
    model.load_state_dict(data["state_dict"])
    model.eval()
    return model, vocabs, cfg
