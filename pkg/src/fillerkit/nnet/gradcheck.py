"""Finite-difference gradient checking.

Backward passes are compared against central differences of a scalar probe
loss L = sum(forward(x) * R) for a fixed random R. Relative error is
measured norm-wise. Inputs near non-smooth points (relu kinks, pooling
ties) make finite differences themselves wrong, so callers should sample
inputs away from them; nudge_away_from_kinks helps with that.
"""

from __future__ import annotations

import numpy as np

from .layers import Layer


def nudge_away_from_kinks(x: np.ndarray, margin: float) -> np.ndarray:
    """Push entries out of (-margin, margin) so relu kinks stay far from
    the finite-difference step."""
    out = x.copy()
    small = np.abs(out) < margin
    out[small] = np.where(out[small] >= 0, margin, -margin) + out[small]
    return out


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    num = np.linalg.norm((a - b).ravel())
    den = max(np.linalg.norm(a.ravel()), np.linalg.norm(b.ravel()), 1e-8)
    return float(num / den)


def check_layer(layer: Layer, x: np.ndarray, rng: np.random.Generator, h: float = 1e-5) -> dict[str, float]:
    """Return the relative FD error for the input and every parameter.

    The layer runs in train mode. Running-stat buffers (batch norm) may
    drift across probe evaluations; they do not affect train-mode outputs.
    """
    y = layer.forward(x, train=True)
    probe = rng.standard_normal(y.shape)

    def loss_with(x_val: np.ndarray) -> float:
        return float(np.sum(layer.forward(x_val, train=True) * probe))

    layer.forward(x, train=True)
    dx = layer.backward(probe)
    analytic = {"input": dx}
    analytic.update(layer.grads())

    errors = {}
    fd = np.zeros_like(x)
    flat_x = x.reshape(-1)
    fd_flat = fd.reshape(-1)
    for i in range(flat_x.size):
        orig = flat_x[i]
        flat_x[i] = orig + h
        up = loss_with(x)
        flat_x[i] = orig - h
        down = loss_with(x)
        flat_x[i] = orig
        fd_flat[i] = (up - down) / (2 * h)
    errors["input"] = relative_error(fd, analytic["input"])

    for name, param in layer.params().items():
        fd_p = np.zeros_like(param)
        flat_p = param.reshape(-1)
        fd_flat = fd_p.reshape(-1)
        for i in range(flat_p.size):
            orig = flat_p[i]
            flat_p[i] = orig + h
            up = loss_with(x)
            flat_p[i] = orig - h
            down = loss_with(x)
            flat_p[i] = orig
            fd_flat[i] = (up - down) / (2 * h)
        errors[name] = relative_error(fd_p, analytic[name])
    return errors
