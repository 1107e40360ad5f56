"""Structure-guided attention biases over change-graph nodes."""

from __future__ import annotations

import numpy as np

from .dataflow import DependencyGraph
from .syntax.change_graph import ChangeGraph

NEG_INF = -1e9


def change_guided_mask(graph: ChangeGraph) -> np.ndarray:
    """0 where the pair is related and touches a changed node, NEG_INF elsewhere."""
    n = len(graph)
    mask = np.full((n, n), NEG_INF)
    for i, j in graph.relations:
        if i in graph.changed or j in graph.changed:
            mask[i, j] = 0.0
    return mask


def dependency_mask(deps: DependencyGraph, n: int) -> np.ndarray:
    mask = np.zeros((n, n))
    for i, j in deps.edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) out of range for {n} nodes")
        mask[i, j] = 1.0
    return mask


def fuse_masks(change: np.ndarray, dep: np.ndarray, beta: float = 1.0) -> np.ndarray:
    if change.shape != dep.shape:
        raise ValueError(f"mask size mismatch: {change.shape} vs {dep.shape}")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    blocked = change <= NEG_INF
    return np.where(blocked, NEG_INF, change + beta * dep)


def masked_softmax(scores: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Row softmax of ``scores + bias``; rows with every entry blocked become uniform."""
    logits = scores + bias
    blocked = bias <= NEG_INF
    logits = np.where(blocked, -np.inf, logits)
    all_blocked = blocked.all(axis=-1, keepdims=True)
    logits = np.where(all_blocked, 0.0, logits)
    logits = logits - logits.max(axis=-1, keepdims=True)
    weights = np.exp(logits)
    return weights / weights.sum(axis=-1, keepdims=True)
