# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled convolution kernels (preferred backend).

The gather (im2col) and scatter-add (col2im) loops run as typed C loops;
the GEMM itself still goes through BLAS via numpy, which is where the
flops belong. Results are bit-compatible with the numpy fallback up to
summation order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


cdef void _gather2d(double[:, :, :, ::1] xp, double[:, :, :, :, :, ::1] cols,
                    Py_ssize_t kh, Py_ssize_t kw, Py_ssize_t sh, Py_ssize_t sw,
                    Py_ssize_t ho, Py_ssize_t wo) noexcept nogil:
    cdef Py_ssize_t n = xp.shape[0], c = xp.shape[1]
    cdef Py_ssize_t b, ch, i, j, p, q
    for b in range(n):
        for ch in range(c):
            for i in range(kh):
                for j in range(kw):
                    for p in range(ho):
                        for q in range(wo):
                            cols[b, ch, i, j, p, q] = xp[b, ch, i + sh * p, j + sw * q]


cdef void _scatter2d(double[:, :, :, ::1] dxp, double[:, :, :, :, :, ::1] dcols,
                     Py_ssize_t kh, Py_ssize_t kw, Py_ssize_t sh, Py_ssize_t sw,
                     Py_ssize_t ho, Py_ssize_t wo) noexcept nogil:
    cdef Py_ssize_t n = dxp.shape[0], c = dxp.shape[1]
    cdef Py_ssize_t b, ch, i, j, p, q
    for b in range(n):
        for ch in range(c):
            for i in range(kh):
                for j in range(kw):
                    for p in range(ho):
                        for q in range(wo):
                            dxp[b, ch, i + sh * p, j + sw * q] += dcols[b, ch, i, j, p, q]


def conv2d_forward(x, w, b, stride, pad):
    """x (N,C,H,W), w (Co,C,kh,kw), b (Co,), stride (sh,sw), pad ((pt,pb),(pl,pr))."""
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], width = x.shape[3]
    cdef Py_ssize_t co = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    pt, pb = pad[0]
    pl, pr = pad[1]
    cdef Py_ssize_t sh = stride[0], sw = stride[1]
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr))), dtype=np.float64)
    cdef Py_ssize_t ho = (h + pt + pb - kh) // sh + 1
    cdef Py_ssize_t wo = (width + pl + pr - kw) // sw + 1
    cols = np.empty((n, c, kh, kw, ho, wo), dtype=np.float64)
    _gather2d(xp, cols, kh, kw, sh, sw, ho, wo)
    y = np.matmul(np.reshape(w, (co, -1))[None], cols.reshape(n, c * kh * kw, ho * wo))
    y += np.asarray(b)[None, :, None]
    return y.reshape(n, co, ho, wo)


def conv2d_backward(x, w, dy, stride, pad):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], width = x.shape[3]
    cdef Py_ssize_t co = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    pt, pb = pad[0]
    pl, pr = pad[1]
    cdef Py_ssize_t sh = stride[0], sw = stride[1]
    cdef Py_ssize_t ho = dy.shape[2], wo = dy.shape[3]
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (pt, pb), (pl, pr))), dtype=np.float64)
    cols = np.empty((n, c, kh, kw, ho, wo), dtype=np.float64)
    _gather2d(xp, cols, kh, kw, sh, sw, ho, wo)
    cols2 = cols.reshape(n, c * kh * kw, ho * wo)
    dy2 = np.ascontiguousarray(dy, dtype=np.float64).reshape(n, co, ho * wo)
    dw = np.einsum("nop,nkp->ok", dy2, cols2).reshape((<object> w).shape)
    db = dy2.sum(axis=(0, 2))
    dcols = np.ascontiguousarray(
        np.matmul(np.reshape(w, (co, -1)).T[None], dy2).reshape(n, c, kh, kw, ho, wo)
    )
    dxp = np.zeros_like(xp)
    _scatter2d(dxp, dcols, kh, kw, sh, sw, ho, wo)
    dx = dxp[:, :, pt : pt + h, pl : pl + width]
    return dx, dw, db


cdef void _gather1d(double[:, :, ::1] xp, double[:, :, :, ::1] cols,
                    Py_ssize_t k, Py_ssize_t s, Py_ssize_t to) noexcept nogil:
    cdef Py_ssize_t n = xp.shape[0], c = xp.shape[1]
    cdef Py_ssize_t b, ch, i, p
    for b in range(n):
        for ch in range(c):
            for i in range(k):
                for p in range(to):
                    cols[b, ch, i, p] = xp[b, ch, i + s * p]


cdef void _scatter1d(double[:, :, ::1] dxp, double[:, :, :, ::1] dcols,
                     Py_ssize_t k, Py_ssize_t s, Py_ssize_t to) noexcept nogil:
    cdef Py_ssize_t n = dxp.shape[0], c = dxp.shape[1]
    cdef Py_ssize_t b, ch, i, p
    for b in range(n):
        for ch in range(c):
            for i in range(k):
                for p in range(to):
                    dxp[b, ch, i + s * p] += dcols[b, ch, i, p]


def conv1d_forward(x, w, b, stride, pad):
    """x (N,C,T), w (Co,C,k), b (Co,), stride int, pad (pl,pr)."""
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], t = x.shape[2]
    cdef Py_ssize_t co = w.shape[0], k = w.shape[2]
    pl, pr = pad
    cdef Py_ssize_t s = stride
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (pl, pr))), dtype=np.float64)
    cdef Py_ssize_t to = (t + pl + pr - k) // s + 1
    cols = np.empty((n, c, k, to), dtype=np.float64)
    _gather1d(xp, cols, k, s, to)
    y = np.matmul(np.reshape(w, (co, -1))[None], cols.reshape(n, c * k, to))
    y += np.asarray(b)[None, :, None]
    return y.reshape(n, co, to)


def conv1d_backward(x, w, dy, stride, pad):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], t = x.shape[2]
    cdef Py_ssize_t co = w.shape[0], k = w.shape[2]
    pl, pr = pad
    cdef Py_ssize_t s = stride
    cdef Py_ssize_t to = dy.shape[2]
    xp = np.ascontiguousarray(np.pad(x, ((0, 0), (0, 0), (pl, pr))), dtype=np.float64)
    cols = np.empty((n, c, k, to), dtype=np.float64)
    _gather1d(xp, cols, k, s, to)
    dy2 = np.ascontiguousarray(dy, dtype=np.float64)
    dw = np.einsum("nop,nkp->ok", dy2, cols.reshape(n, c * k, to)).reshape((<object> w).shape)
    db = dy2.sum(axis=(0, 2))
    dcols = np.ascontiguousarray(
        np.matmul(np.reshape(w, (co, -1)).T[None], dy2).reshape(n, c, k, to)
    )
    dxp = np.zeros_like(xp)
    _scatter1d(dxp, dcols, k, s, to)
    dx = dxp[:, :, pl : pl + t]
    return dx, dw, db
