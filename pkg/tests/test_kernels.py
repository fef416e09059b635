"""Backend parity: the compiled kernels must agree with the numpy fallback."""

import numpy as np
import pytest

from fillerkit.nnet.kernels import BACKEND, get_backend

pk = get_backend("numpy")
try:
    ck = get_backend("cython")
    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False

needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernels not built")


def test_some_backend_selected():
    assert BACKEND in ("numpy", "cython")


@needs_cython
@pytest.mark.parametrize("seed", range(6))
def test_conv2d_parity(seed):
    rng = np.random.default_rng(seed)
    n, c, h, w_ = (int(rng.integers(1, 4)) for _ in range(4))
    co = int(rng.integers(1, 5))
    kh, kw = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    sh, sw = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    h, w_ = h + kh + 2, w_ + kw + 2
    pad = ((int(rng.integers(0, 2)), int(rng.integers(0, 2))), (int(rng.integers(0, 2)), int(rng.integers(0, 2))))
    x = rng.standard_normal((n, c, h, w_))
    w = rng.standard_normal((co, c, kh, kw))
    b = rng.standard_normal(co)
    y1 = pk.conv2d_forward(x, w, b, (sh, sw), pad)
    y2 = ck.conv2d_forward(x, w, b, (sh, sw), pad)
    np.testing.assert_allclose(y1, y2, rtol=1e-13, atol=1e-13)
    dy = rng.standard_normal(y1.shape)
    for a, bb in zip(pk.conv2d_backward(x, w, dy, (sh, sw), pad), ck.conv2d_backward(x, w, dy, (sh, sw), pad)):
        np.testing.assert_allclose(a, bb, rtol=1e-12, atol=1e-12)


@needs_cython
@pytest.mark.parametrize("seed", range(6))
def test_conv1d_parity(seed):
    rng = np.random.default_rng(100 + seed)
    n, c, t = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(6, 20))
    co, k, s = int(rng.integers(1, 6)), int(rng.integers(1, 5)), int(rng.integers(1, 3))
    pad = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
    x = rng.standard_normal((n, c, t))
    w = rng.standard_normal((co, c, k))
    b = rng.standard_normal(co)
    y1 = pk.conv1d_forward(x, w, b, s, pad)
    y2 = ck.conv1d_forward(x, w, b, s, pad)
    np.testing.assert_allclose(y1, y2, rtol=1e-13, atol=1e-13)
    dy = rng.standard_normal(y1.shape)
    for a, bb in zip(pk.conv1d_backward(x, w, dy, s, pad), ck.conv1d_backward(x, w, dy, s, pad)):
        np.testing.assert_allclose(a, bb, rtol=1e-12, atol=1e-12)
