"""Pure-numpy convolution kernels (fallback backend).

Same contracts as the compiled backend in _ckernels.pyx: im2col gathers are
done with strided slice loops over the kernel offsets, the GEMM itself goes
through BLAS. Everything is float64.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _im2col2d(xp: np.ndarray, kh: int, kw: int, sh: int, sw: int, ho: int, wo: int) -> np.ndarray:
    n, c = xp.shape[:2]
    cols = np.empty((n, c, kh, kw, ho, wo), dtype=np.float64)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = xp[:, :, i : i + sh * ho : sh, j : j + sw * wo : sw]
    return cols


def conv2d_forward(x, w, b, stride, pad):
    """x (N,C,H,W), w (Co,C,kh,kw), b (Co,), stride (sh,sw), pad ((pt,pb),(pl,pr))."""
    n, c, h, width = x.shape
    co, _, kh, kw = w.shape
    (pt, pb), (pl, pr) = pad
    sh, sw = stride
    xp = np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
    ho = (h + pt + pb - kh) // sh + 1
    wo = (width + pl + pr - kw) // sw + 1
    cols = _im2col2d(xp, kh, kw, sh, sw, ho, wo).reshape(n, c * kh * kw, ho * wo)
    y = np.matmul(w.reshape(co, -1)[None], cols)
    y += b[None, :, None]
    return y.reshape(n, co, ho, wo)


def conv2d_backward(x, w, dy, stride, pad):
    n, c, h, width = x.shape
    co, _, kh, kw = w.shape
    (pt, pb), (pl, pr) = pad
    sh, sw = stride
    _, _, ho, wo = dy.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr)))
    cols = _im2col2d(xp, kh, kw, sh, sw, ho, wo).reshape(n, c * kh * kw, ho * wo)
    dy2 = dy.reshape(n, co, ho * wo)
    dw = np.einsum("nop,nkp->ok", dy2, cols).reshape(w.shape)
    db = dy2.sum(axis=(0, 2))
    dcols = np.matmul(w.reshape(co, -1).T[None], dy2).reshape(n, c, kh, kw, ho, wo)
    dxp = np.zeros_like(xp)
    for i in range(kh):
        for j in range(kw):
            dxp[:, :, i : i + sh * ho : sh, j : j + sw * wo : sw] += dcols[:, :, i, j]
    dx = dxp[:, :, pt : pt + h, pl : pl + width]
    return dx, dw, db


def _im2col1d(xp: np.ndarray, k: int, s: int, to: int) -> np.ndarray:
    n, c = xp.shape[:2]
    cols = np.empty((n, c, k, to), dtype=np.float64)
    for i in range(k):
        cols[:, :, i] = xp[:, :, i : i + s * to : s]
    return cols


def conv1d_forward(x, w, b, stride, pad):
    """x (N,C,T), w (Co,C,k), b (Co,), stride int, pad (pl,pr)."""
    n, c, t = x.shape
    co, _, k = w.shape
    pl, pr = pad
    xp = np.pad(x, ((0, 0), (0, 0), (pl, pr)))
    to = (t + pl + pr - k) // stride + 1
    cols = _im2col1d(xp, k, stride, to).reshape(n, c * k, to)
    y = np.matmul(w.reshape(co, -1)[None], cols)
    y += b[None, :, None]
    return y.reshape(n, co, to)


def conv1d_backward(x, w, dy, stride, pad):
    n, c, t = x.shape
    co, _, k = w.shape
    pl, pr = pad
    _, _, to = dy.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pl, pr)))
    cols = _im2col1d(xp, k, stride, to).reshape(n, c * k, to)
    dw = np.einsum("nop,nkp->ok", dy, cols).reshape(w.shape)
    db = dy.sum(axis=(0, 2))
    dcols = np.matmul(w.reshape(co, -1).T[None], dy).reshape(n, c, k, to)
    dxp = np.zeros_like(xp)
    for i in range(k):
        dxp[:, :, i : i + stride * to : stride] += dcols[:, :, i]
    dx = dxp[:, :, pl : pl + t]
    return dx, dw, db
