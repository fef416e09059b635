"""Mini-batch training loop with seeded shuffling and early stopping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .losses import LOSSES
from .model import ModelGraph
from .optim import make_optimizer


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    lr: float = 1e-3
    batch_size: int = 32
    epochs: int = 20
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    loss: str = "cross_entropy"
    seed: int = 0
    early_stop_patience: int = 0  # 0 disables early stopping

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("learning rate must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass
class TrainResult:
    model: ModelGraph
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    best_epoch: int = -1


def compute_gradients(model: ModelGraph, x: np.ndarray, targets: np.ndarray, loss: str = "cross_entropy"):
    """One train-mode forward/backward; returns (loss, dinput, named grads)."""
    logits = model.forward(x, train=True)
    loss_val, dlogits = LOSSES[loss](logits, targets)
    dx = model.backward(dlogits)
    return loss_val, dx, model.named_grads()


def evaluate_loss(model: ModelGraph, x: np.ndarray, targets: np.ndarray, loss: str, batch_size: int = 256) -> float:
    total, count = 0.0, 0
    for lo in range(0, len(x), batch_size):
        xb, yb = x[lo : lo + batch_size], targets[lo : lo + batch_size]
        logits = model.forward(xb, train=False)
        val, _ = LOSSES[loss](logits, yb)
        total += val * len(xb)
        count += len(xb)
    return total / max(count, 1)


def train(
    model: ModelGraph,
    data: tuple[np.ndarray, np.ndarray],
    cfg: TrainConfig,
    val: tuple[np.ndarray, np.ndarray] | None = None,
    augment=None,
) -> TrainResult:
    """Train in place and return the loss curve.

    Shuffling and the optional augment(batch_x, rng) hook draw from one
    seeded generator, so runs repeat exactly. When a validation set is
    given, the parameters from the best validation epoch are restored at
    the end (checkpoint selection); early_stop_patience > 0 additionally
    stops after that many epochs without improvement. A non-finite loss
    aborts with a diagnostic.
    """
    x, y = data
    if len(x) == 0:
        raise TrainingError("empty training set")
    rng = np.random.default_rng(cfg.seed)
    opt = make_optimizer(cfg.optimizer, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    result = TrainResult(model=model)
    best_val = np.inf
    best_snap = None
    stale = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(len(x))
        epoch_loss, n_batches = 0.0, 0
        for lo in range(0, len(x), cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            xb = x[idx]
            if augment is not None:
                xb = augment(xb, rng)
            logits = model.forward(xb, train=True)
            loss_val, dlogits = LOSSES[cfg.loss](logits, y[idx])
            if not np.isfinite(loss_val):
                raise TrainingError(
                    f"non-finite loss {loss_val} at epoch {epoch}, batch {n_batches}; "
                    "lower the learning rate or check the inputs"
                )
            model.backward(dlogits)
            opt.step(model.named_params(), model.named_grads())
            epoch_loss += loss_val
            n_batches += 1
        result.train_losses.append(epoch_loss / max(n_batches, 1))
        if val is not None:
            val_loss = evaluate_loss(model, val[0], val[1], cfg.loss)
            result.val_losses.append(val_loss)
            if val_loss < best_val:
                best_val = val_loss
                best_snap = model.snapshot()
                result.best_epoch = epoch
                stale = 0
            else:
                stale += 1
                if cfg.early_stop_patience and stale >= cfg.early_stop_patience:
                    break
    if best_snap is not None:
        model.restore(best_snap)
    return result
