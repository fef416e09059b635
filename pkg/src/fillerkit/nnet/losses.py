"""Losses over logits, returning (scalar loss, gradient w.r.t. logits).

Both losses fuse their final activation for numerical stability: softmax
cross-entropy via logsumexp, binary cross-entropy via softplus.
"""

from __future__ import annotations

import numpy as np

from .layers import sigmoid


def cross_entropy(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Softmax cross-entropy. logits (..., K), integer targets (...).

    The loss is averaged over all target positions, so per-frame targets
    of shape (N, T) weigh every frame equally.
    """
    flat = logits.reshape(-1, logits.shape[-1])
    t = targets.reshape(-1).astype(np.int64)
    if t.shape[0] != flat.shape[0]:
        raise ValueError(f"targets shape {targets.shape} does not match logits {logits.shape}")
    zmax = flat.max(axis=1, keepdims=True)
    lse = zmax[:, 0] + np.log(np.exp(flat - zmax).sum(axis=1))
    n = flat.shape[0]
    loss = float(np.mean(lse - flat[np.arange(n), t]))
    probs = np.exp(flat - lse[:, None])
    probs[np.arange(n), t] -= 1.0
    return loss, (probs / n).reshape(logits.shape)


def binary_cross_entropy(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Sigmoid binary cross-entropy; targets are floats in [0, 1]."""
    if logits.shape != targets.shape:
        raise ValueError(f"targets shape {targets.shape} does not match logits {logits.shape}")
    z, y = logits, targets
    loss = float(np.mean(np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    dz = (sigmoid(z) - y) / z.size
    return loss, dz


LOSSES = {"cross_entropy": cross_entropy, "binary_cross_entropy": binary_cross_entropy}
