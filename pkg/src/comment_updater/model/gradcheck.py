"""Analytic gradients vs central finite differences, for every parameter entry.

Perturbed losses are evaluated in vmapped chunks: one chunk holds many
copies of a single parameter tensor, each with one entry nudged.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch.func import functional_call, vmap

from .network import Batch, CommentUpdater


@dataclass
class TensorReport:
    name: str
    numel: int
    max_abs_error: float
    # ||analytic - numeric|| / max(||analytic||, ||numeric||)
    norm_relative_error: float
    # max over entries of |a - n| / max(|a|, |n|, floor)
    max_elementwise_relative_error: float


def finite_difference_check(model: CommentUpdater, batch: Batch, eps: float = 1e-4, chunk: int = 256,
                            floor: float = 1e-6) -> list[TensorReport]:
    """Run in double precision with dropout disabled; the model is modified in place."""
    model.double().eval()
    batch = batch.to(torch.float64)
    params = {k: v.detach() for k, v in model.named_parameters()}

    def loss_of(p: dict) -> torch.Tensor:
        return functional_call(model, p, (batch,), strict=False, tie_weights=True)

    # functional_call routes through forward; make forward the loss
    model.forward = model.loss  # type: ignore[method-assign]

    leaf = {k: v.clone().requires_grad_(True) for k, v in params.items()}
    loss = loss_of(leaf)
    grads = torch.autograd.grad(loss, list(leaf.values()))
    analytic = dict(zip(leaf, grads))

    reports = []
    for name, value in params.items():
        flat = value.reshape(-1)
        numeric = torch.empty_like(flat)

        def perturbed(delta: torch.Tensor) -> torch.Tensor:
            return loss_of({**params, name: (flat + delta).view_as(value)})

        batched = vmap(perturbed)
        for start in range(0, flat.numel(), chunk):
            idx = torch.arange(start, min(start + chunk, flat.numel()))
            basis = torch.zeros(len(idx), flat.numel(), dtype=flat.dtype)
            basis[torch.arange(len(idx)), idx] = eps
            plus, minus = batched(basis), batched(-basis)
            numeric[idx] = (plus - minus) / (2 * eps)
        a = analytic[name].reshape(-1)
        diff = (a - numeric).abs()
        norm = max(a.norm().item(), numeric.norm().item())
        reports.append(TensorReport(
            name=name,
            numel=flat.numel(),
            max_abs_error=diff.max().item(),
            norm_relative_error=(a - numeric).norm().item() / norm if norm > 0 else 0.0,
            max_elementwise_relative_error=(diff / torch.maximum(torch.maximum(a.abs(), numeric.abs()),
                                                                 torch.tensor(floor, dtype=a.dtype))).max().item(),
        ))
    del model.forward
    return reports
