"""Layers with hand-derived backward passes.

Conventions: feature maps are channel-first, float64 throughout training.
2-D maps are (N, C, F, T) with frequency before time; 1-D temporal maps are
(N, C, T); recurrent/dense paths use (N, T, D) or (N, D). Every layer
caches what its backward needs during forward, so backward must follow the
matching forward call.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class NnetError(ValueError):
    pass


def he_uniform(rng, shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    if rng is None:
        return np.zeros(shape)
    return rng.uniform(-limit, limit, size=shape)


class Layer:
    kind = "base"

    def __init__(self, name: str):
        self.name = name

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dy: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict[str, np.ndarray]:
        return {}

    def grads(self) -> dict[str, np.ndarray]:
        return {}

    def state(self) -> dict[str, np.ndarray]:
        """Non-trainable buffers serialized alongside params."""
        return {}

    def hyperparams(self) -> dict:
        return {}

    def spec(self) -> dict:
        return {"kind": self.kind, "name": self.name, **self.hyperparams()}


class Dense(Layer):
    """Affine map on the last axis; accepts (N, D) or (N, T, D)."""

    kind = "dense"

    def __init__(self, d_in: int, d_out: int, name: str = "dense", rng=None):
        super().__init__(name)
        self.d_in, self.d_out = d_in, d_out
        self.w = he_uniform(rng, (d_in, d_out), d_in)
        self.b = np.zeros(d_out)

    def forward(self, x, train=False):
        if x.shape[-1] != self.d_in:
            raise NnetError(f"{self.name}: expected last dim {self.d_in}, got {x.shape}")
        self._x = x
        return x @ self.w + self.b

    def backward(self, dy):
        x2 = self._x.reshape(-1, self.d_in)
        dy2 = dy.reshape(-1, self.d_out)
        self.d_w = x2.T @ dy2
        self.d_b = dy2.sum(axis=0)
        return (dy @ self.w.T).reshape(self._x.shape)

    def params(self):
        return {"w": self.w, "b": self.b}

    def grads(self):
        return {"w": self.d_w, "b": self.d_b}

    def hyperparams(self):
        return {"d_in": self.d_in, "d_out": self.d_out}


def _same_pad(size: int, k: int, s: int) -> tuple[int, int]:
    out = -(-size // s)
    total = max((out - 1) * s + k - size, 0)
    return total // 2, total - total // 2


class Conv2d(Layer):
    """2-D convolution over (N, C, F, T) maps.

    use_bias=False drops the additive bias; a bias feeding straight into
    batch norm is redundant (the batch mean absorbs it) and its
    identically-zero gradient defeats finite-difference checking.
    """

    kind = "conv2d"

    def __init__(
        self, c_in, c_out, kernel=(3, 3), stride=(1, 1), padding="same", use_bias=True, name="conv2d", rng=None
    ):
        super().__init__(name)
        self.c_in, self.c_out = c_in, c_out
        self.kernel = tuple(kernel)
        self.stride = tuple(stride)
        self.padding = padding
        self.use_bias = use_bias
        fan_in = c_in * self.kernel[0] * self.kernel[1]
        self.w = he_uniform(rng, (c_out, c_in, *self.kernel), fan_in)
        self.b = np.zeros(c_out)

    def _pads(self, shape):
        if self.padding == "valid":
            return (0, 0), (0, 0)
        return (
            _same_pad(shape[2], self.kernel[0], self.stride[0]),
            _same_pad(shape[3], self.kernel[1], self.stride[1]),
        )

    def forward(self, x, train=False):
        if x.ndim != 4 or x.shape[1] != self.c_in:
            raise NnetError(f"{self.name}: expected (N,{self.c_in},F,T), got {x.shape}")
        self._x = x
        self._pad = self._pads(x.shape)
        return kernels.conv2d_forward(x, self.w, self.b, self.stride, self._pad)

    def backward(self, dy):
        dx, self.d_w, self.d_b = kernels.conv2d_backward(self._x, self.w, dy, self.stride, self._pad)
        return dx

    def params(self):
        return {"w": self.w, "b": self.b} if self.use_bias else {"w": self.w}

    def grads(self):
        return {"w": self.d_w, "b": self.d_b} if self.use_bias else {"w": self.d_w}

    def hyperparams(self):
        return {
            "c_in": self.c_in,
            "c_out": self.c_out,
            "kernel": list(self.kernel),
            "stride": list(self.stride),
            "padding": self.padding,
            "use_bias": self.use_bias,
        }


class Conv1dTemporal(Layer):
    """1-D convolution along time over (N, C, T); spans all input channels,
    which is what lets a temporal-conv backbone cover the whole frequency
    range in every layer."""

    kind = "conv1d_temporal"

    def __init__(self, c_in, c_out, kernel=3, stride=1, padding="same", use_bias=True, name="conv1d", rng=None):
        super().__init__(name)
        self.c_in, self.c_out = c_in, c_out
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.use_bias = use_bias
        self.w = he_uniform(rng, (c_out, c_in, kernel), c_in * kernel)
        self.b = np.zeros(c_out)

    def _pad(self, t):
        if self.padding == "valid":
            return (0, 0)
        return _same_pad(t, self.kernel, self.stride)

    def forward(self, x, train=False):
        if x.ndim != 3 or x.shape[1] != self.c_in:
            raise NnetError(f"{self.name}: expected (N,{self.c_in},T), got {x.shape}")
        self._x = x
        self._padding = self._pad(x.shape[2])
        return kernels.conv1d_forward(x, self.w, self.b, self.stride, self._padding)

    def backward(self, dy):
        dx, self.d_w, self.d_b = kernels.conv1d_backward(self._x, self.w, dy, self.stride, self._padding)
        return dx

    def params(self):
        return {"w": self.w, "b": self.b} if self.use_bias else {"w": self.w}

    def grads(self):
        return {"w": self.d_w, "b": self.d_b} if self.use_bias else {"w": self.d_w}

    def hyperparams(self):
        return {
            "c_in": self.c_in,
            "c_out": self.c_out,
            "kernel": self.kernel,
            "stride": self.stride,
            "padding": self.padding,
            "use_bias": self.use_bias,
        }


class BatchNorm(Layer):
    """Normalization over all axes but the channel axis (axis 1).

    Training uses batch statistics and updates the running buffers; eval
    applies the running statistics, making the layer a per-channel affine
    map.
    """

    kind = "batch_norm"

    def __init__(self, channels, eps=1e-5, momentum=0.1, name="bn", rng=None):
        super().__init__(name)
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.gamma = np.ones(channels)
        self.beta = np.zeros(channels)
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)

    def _axes(self, x):
        return tuple(i for i in range(x.ndim) if i != 1)

    def _bshape(self, x):
        return tuple(self.channels if i == 1 else 1 for i in range(x.ndim))

    def forward(self, x, train=False):
        if x.shape[1] != self.channels:
            raise NnetError(f"{self.name}: expected {self.channels} channels, got {x.shape}")
        axes = self._axes(x)
        shape = self._bshape(x)
        self._train_mode = train
        if train:
            mu = x.mean(axis=axes)
            var = x.var(axis=axes)
            self._m = x.size // self.channels
            self._mu, self._var = mu, var
            self._xc = x - mu.reshape(shape)
            self._inv_std = 1.0 / np.sqrt(var + self.eps)
            self._xhat = self._xc * self._inv_std.reshape(shape)
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mu
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * var
        else:
            self._xhat = (x - self.running_mean.reshape(shape)) / np.sqrt(
                self.running_var.reshape(shape) + self.eps
            )
        return self.gamma.reshape(shape) * self._xhat + self.beta.reshape(shape)

    def backward(self, dy):
        axes = self._axes(dy)
        shape = self._bshape(dy)
        self.d_gamma = (dy * self._xhat).sum(axis=axes)
        self.d_beta = dy.sum(axis=axes)
        if not self._train_mode:
            return dy * (self.gamma / np.sqrt(self.running_var + self.eps)).reshape(shape)
        m = self._m
        dxhat = dy * self.gamma.reshape(shape)
        inv_std = self._inv_std.reshape(shape)
        # full gradient through the batch mean and variance
        dvar = (dxhat * self._xc * -0.5 * inv_std**3).sum(axis=axes).reshape(shape)
        dmu = (-dxhat * inv_std).sum(axis=axes).reshape(shape) + dvar * (-2.0 / m) * self._xc.sum(
            axis=axes
        ).reshape(shape)
        return dxhat * inv_std + dvar * 2.0 * self._xc / m + dmu / m

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta}

    def grads(self):
        return {"gamma": self.d_gamma, "beta": self.d_beta}

    def state(self):
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def hyperparams(self):
        return {"channels": self.channels, "eps": self.eps, "momentum": self.momentum}


class Relu(Layer):
    kind = "relu"

    def __init__(self, name="relu", rng=None):
        super().__init__(name)

    def forward(self, x, train=False):
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy):
        return np.where(self._mask, dy, 0.0)


class Sigmoid(Layer):
    kind = "sigmoid"

    def __init__(self, name="sigmoid", rng=None):
        super().__init__(name)

    def forward(self, x, train=False):
        self._y = sigmoid(x)
        return self._y

    def backward(self, dy):
        return dy * self._y * (1.0 - self._y)


class Softmax(Layer):
    """Softmax over the last axis."""

    kind = "softmax"

    def __init__(self, name="softmax", rng=None):
        super().__init__(name)

    def forward(self, x, train=False):
        self._y = softmax(x)
        return self._y

    def backward(self, dy):
        dot = (dy * self._y).sum(axis=-1, keepdims=True)
        return self._y * (dy - dot)


class MaxPoolFreq(Layer):
    """Max pooling over the frequency axis only; (N, C, F, T) -> (N, C, F/p, T).

    Keeps the time axis untouched so the 100 Hz frame rate survives the
    whole stack.
    """

    kind = "max_pool_freq"

    def __init__(self, pool=4, name="pool", rng=None):
        super().__init__(name)
        self.pool = pool

    def forward(self, x, train=False):
        n, c, f, t = x.shape
        if f % self.pool:
            raise NnetError(f"{self.name}: frequency dim {f} not divisible by pool {self.pool}")
        xr = x.reshape(n, c, f // self.pool, self.pool, t)
        self._arg = xr.argmax(axis=3)
        self._in_shape = x.shape
        return xr.max(axis=3)

    def backward(self, dy):
        n, c, f, t = self._in_shape
        dxr = np.zeros((n, c, f // self.pool, self.pool, t))
        np.put_along_axis(dxr, self._arg[:, :, :, None, :], dy[:, :, :, None, :], axis=3)
        return dxr.reshape(self._in_shape)

    def hyperparams(self):
        return {"pool": self.pool}


class AvgPoolTime(Layer):
    """Adaptive average pooling along time; (N, C, T) -> (N, C, out_len).

    out_len=1 is global average pooling (the event-classifier head);
    out_len=10 resamples a strided backbone onto the 10 Hz grid.
    """

    kind = "avg_pool_time"

    def __init__(self, out_len=1, name="avgpool", rng=None):
        super().__init__(name)
        self.out_len = out_len

    def _bounds(self, t):
        return [(int(np.floor(j * t / self.out_len)), int(np.ceil((j + 1) * t / self.out_len))) for j in range(self.out_len)]

    def forward(self, x, train=False):
        n, c, t = x.shape
        if t < self.out_len:
            raise NnetError(f"{self.name}: cannot pool {t} frames to {self.out_len}")
        self._in_shape = x.shape
        self._spans = self._bounds(t)
        y = np.empty((n, c, self.out_len))
        for j, (s, e) in enumerate(self._spans):
            y[:, :, j] = x[:, :, s:e].mean(axis=2)
        return y

    def backward(self, dy):
        dx = np.zeros(self._in_shape)
        for j, (s, e) in enumerate(self._spans):
            dx[:, :, s:e] += dy[:, :, j : j + 1] / (e - s)
        return dx

    def hyperparams(self):
        return {"out_len": self.out_len}


class ToTimeMajor(Layer):
    """Structural reshuffle to (N, T, C) from (N, C, T) or (N, C, 1, T)."""

    kind = "to_time_major"

    def __init__(self, name="ttm", rng=None):
        super().__init__(name)

    def forward(self, x, train=False):
        self._in_shape = x.shape
        if x.ndim == 4:
            if x.shape[2] != 1:
                raise NnetError(f"{self.name}: frequency axis must be collapsed first, got {x.shape}")
            x = x[:, :, 0, :]
        elif x.ndim != 3:
            raise NnetError(f"{self.name}: expected 3-D or 4-D input, got {x.shape}")
        return np.ascontiguousarray(np.swapaxes(x, 1, 2))

    def backward(self, dy):
        dx = np.swapaxes(dy, 1, 2)
        return np.ascontiguousarray(dx).reshape(self._in_shape)


class Lstm(Layer):
    """Unidirectional LSTM over (N, T, D) -> (N, T, H).

    Gate order i, f, g, o; forget-gate bias starts at 1 so early training
    retains state. Weights use a plain uniform init of width 1/sqrt(H).
    """

    kind = "lstm"

    def __init__(self, d_in, hidden, name="lstm", rng=None):
        super().__init__(name)
        self.d_in, self.hidden = d_in, hidden
        k = 1.0 / np.sqrt(hidden)
        if rng is None:
            self.wx = np.zeros((d_in, 4 * hidden))
            self.wh = np.zeros((hidden, 4 * hidden))
        else:
            self.wx = rng.uniform(-k, k, size=(d_in, 4 * hidden))
            self.wh = rng.uniform(-k, k, size=(hidden, 4 * hidden))
        self.b = np.zeros(4 * hidden)
        self.b[hidden : 2 * hidden] = 1.0

    def forward(self, x, train=False):
        if x.ndim != 3 or x.shape[2] != self.d_in:
            raise NnetError(f"{self.name}: expected (N,T,{self.d_in}), got {x.shape}")
        n, t, _ = x.shape
        hdim = self.hidden
        self._x = x
        self._cache = []
        h = np.zeros((n, hdim))
        c = np.zeros((n, hdim))
        ys = np.empty((n, t, hdim))
        for step in range(t):
            z = x[:, step] @ self.wx + h @ self.wh + self.b
            i = sigmoid(z[:, :hdim])
            f = sigmoid(z[:, hdim : 2 * hdim])
            g = np.tanh(z[:, 2 * hdim : 3 * hdim])
            o = sigmoid(z[:, 3 * hdim :])
            c_new = f * c + i * g
            tc = np.tanh(c_new)
            self._cache.append((h, c, i, f, g, o, tc))
            h, c = o * tc, c_new
            ys[:, step] = h
        return ys

    def backward(self, dy):
        n, t, _ = self._x.shape
        hdim = self.hidden
        self.d_wx = np.zeros_like(self.wx)
        self.d_wh = np.zeros_like(self.wh)
        self.d_b = np.zeros_like(self.b)
        dx = np.zeros_like(self._x)
        dh_next = np.zeros((n, hdim))
        dc_next = np.zeros((n, hdim))
        for step in range(t - 1, -1, -1):
            h_prev, c_prev, i, f, g, o, tc = self._cache[step]
            dh = dy[:, step] + dh_next
            do = dh * tc
            dc = dh * o * (1.0 - tc**2) + dc_next
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g**2),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            self.d_wx += self._x[:, step].T @ dz
            self.d_wh += h_prev.T @ dz
            self.d_b += dz.sum(axis=0)
            dx[:, step] = dz @ self.wx.T
            dh_next = dz @ self.wh.T
            dc_next = dc * f
        return dx

    def params(self):
        return {"wx": self.wx, "wh": self.wh, "b": self.b}

    def grads(self):
        return {"wx": self.d_wx, "wh": self.d_wh, "b": self.d_b}

    def hyperparams(self):
        return {"d_in": self.d_in, "hidden": self.hidden}


class ResidualBlock(Layer):
    """Temporal-conv residual block: conv-bn-relu-conv-bn with a skip path
    (1x1 conv + bn when shape changes), relu after the sum."""

    kind = "residual_block"

    def __init__(self, c_in, c_out, kernel=9, stride=1, name="res", rng=None):
        super().__init__(name)
        self.c_in, self.c_out = c_in, c_out
        self.kernel, self.stride = kernel, stride
        self.conv1 = Conv1dTemporal(c_in, c_out, kernel, stride, use_bias=False, name="conv1", rng=rng)
        self.bn1 = BatchNorm(c_out, name="bn1")
        self.relu1 = Relu(name="relu1")
        self.conv2 = Conv1dTemporal(c_out, c_out, kernel, 1, use_bias=False, name="conv2", rng=rng)
        self.bn2 = BatchNorm(c_out, name="bn2")
        self.projecting = c_in != c_out or stride != 1
        if self.projecting:
            self.skip_conv = Conv1dTemporal(c_in, c_out, 1, stride, use_bias=False, name="skip_conv", rng=rng)
            self.skip_bn = BatchNorm(c_out, name="skip_bn")

    def _children(self):
        kids = [self.conv1, self.bn1, self.conv2, self.bn2]
        if self.projecting:
            kids += [self.skip_conv, self.skip_bn]
        return kids

    def forward(self, x, train=False):
        main = self.conv1.forward(x, train)
        main = self.bn1.forward(main, train)
        main = self.relu1.forward(main, train)
        main = self.conv2.forward(main, train)
        main = self.bn2.forward(main, train)
        skip = x
        if self.projecting:
            skip = self.skip_conv.forward(x, train)
            skip = self.skip_bn.forward(skip, train)
        s = main + skip
        self._out_mask = s > 0
        return np.where(self._out_mask, s, 0.0)

    def backward(self, dy):
        ds = np.where(self._out_mask, dy, 0.0)
        dmain = self.bn2.backward(ds)
        dmain = self.conv2.backward(dmain)
        dmain = self.relu1.backward(dmain)
        dmain = self.bn1.backward(dmain)
        dx = self.conv1.backward(dmain)
        if self.projecting:
            dskip = self.skip_bn.backward(ds)
            dx = dx + self.skip_conv.backward(dskip)
        else:
            dx = dx + ds
        return dx

    def _collect(self, getter):
        out = {}
        for child in self._children():
            for key, val in getter(child).items():
                out[f"{child.name}/{key}"] = val
        return out

    def params(self):
        return self._collect(lambda c: c.params())

    def grads(self):
        return self._collect(lambda c: c.grads())

    def state(self):
        return self._collect(lambda c: c.state())

    def hyperparams(self):
        return {"c_in": self.c_in, "c_out": self.c_out, "kernel": self.kernel, "stride": self.stride}


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


LAYER_KINDS = {
    cls.kind: cls
    for cls in (
        Dense,
        Conv2d,
        Conv1dTemporal,
        BatchNorm,
        Relu,
        Sigmoid,
        Softmax,
        MaxPoolFreq,
        AvgPoolTime,
        ToTimeMajor,
        Lstm,
        ResidualBlock,
    )
}


def layer_from_spec(spec: dict, rng=None) -> Layer:
    kind = spec.get("kind")
    if kind not in LAYER_KINDS:
        raise NnetError(f"unknown layer kind {kind!r}")
    kwargs = {k: v for k, v in spec.items() if k != "kind"}
    if "kernel" in kwargs and isinstance(kwargs["kernel"], list):
        kwargs["kernel"] = tuple(kwargs["kernel"])
    if "stride" in kwargs and isinstance(kwargs["stride"], list):
        kwargs["stride"] = tuple(kwargs["stride"])
    return LAYER_KINDS[kind](**kwargs, rng=rng)
