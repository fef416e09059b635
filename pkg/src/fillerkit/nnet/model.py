"""Model graph: an ordered layer stack with named parameters and file I/O.

File format: one little-endian uint32 header length, a JSON header (layer
specs, parameter names/shapes, format version), the raw float32 parameter
and state blobs in header order, and a trailing CRC32 over everything
before it.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from .layers import Layer, NnetError, layer_from_spec

FORMAT_NAME = "fillerkit-model"
FORMAT_VERSION = 1


class ModelGraph:
    """Sequential stack of layers; immutable shape, mutable parameters."""

    def __init__(self, layers: list[Layer]):
        names = [layer.name for layer in layers]
        if len(set(names)) != len(names):
            raise NnetError(f"duplicate layer names: {names}")
        self.layers = list(layers)

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, dy: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def __call__(self, x, train=False):
        return self.forward(x, train=train)

    def _named(self, getter) -> dict[str, np.ndarray]:
        out = {}
        for layer in self.layers:
            for key, val in getter(layer).items():
                full = f"{layer.name}/{key}"
                if full in out:
                    raise NnetError(f"duplicate parameter name {full}")
                out[full] = val
        return out

    def named_params(self) -> dict[str, np.ndarray]:
        return self._named(lambda l: l.params())

    def named_grads(self) -> dict[str, np.ndarray]:
        return self._named(lambda l: l.grads())

    def named_state(self) -> dict[str, np.ndarray]:
        return self._named(lambda l: l.state())

    def param_count(self) -> int:
        return sum(int(np.prod(p.shape)) for p in self.named_params().values())

    def set_params(self, values: dict[str, np.ndarray]) -> None:
        """Overwrite parameters in place from a name -> array mapping."""
        params = self.named_params()
        for name, val in values.items():
            if name not in params:
                raise NnetError(f"unknown parameter {name}")
            if params[name].shape != val.shape:
                raise NnetError(f"shape mismatch for {name}: {params[name].shape} vs {val.shape}")
            params[name][...] = val

    def set_state(self, values: dict[str, np.ndarray]) -> None:
        state = self.named_state()
        for name, val in values.items():
            if name not in state:
                raise NnetError(f"unknown state buffer {name}")
            state[name][...] = val

    def snapshot(self) -> dict[str, np.ndarray]:
        """Deep copy of parameters and state (checkpointing)."""
        snap = {f"p:{k}": v.copy() for k, v in self.named_params().items()}
        snap.update({f"s:{k}": v.copy() for k, v in self.named_state().items()})
        return snap

    def restore(self, snap: dict[str, np.ndarray]) -> None:
        self.set_params({k[2:]: v for k, v in snap.items() if k.startswith("p:")})
        self.set_state({k[2:]: v for k, v in snap.items() if k.startswith("s:")})

    def spec(self) -> list[dict]:
        return [layer.spec() for layer in self.layers]


class ModelFileError(ValueError):
    pass


def save_model(model: ModelGraph, path, meta: dict | None = None) -> None:
    """Serialize architecture + parameters (+ meta, e.g. label names)."""
    params = model.named_params()
    state = model.named_state()
    blobs: list[tuple[str, np.ndarray]] = [(f"p:{k}", v) for k, v in params.items()]
    blobs += [(f"s:{k}", v) for k, v in state.items()]
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "layers": model.spec(),
        "blobs": [[name, list(arr.shape)] for name, arr in blobs],
        "meta": meta or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        crc = 0
        prefix = struct.pack("<I", len(header_bytes))
        fh.write(prefix)
        fh.write(header_bytes)
        crc = zlib.crc32(header_bytes, zlib.crc32(prefix))
        for _, arr in blobs:
            raw = arr.astype("<f4").tobytes(order="C")
            fh.write(raw)
            crc = zlib.crc32(raw, crc)
        fh.write(struct.pack("<I", crc & 0xFFFFFFFF))


def load_model(path) -> tuple[ModelGraph, dict]:
    """Rebuild a model from file; returns (model, meta).

    Raises ModelFileError on version mismatch or checksum failure.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8:
        raise ModelFileError(f"{path}: truncated model file")
    body, trailer = data[:-4], data[-4:]
    (stored_crc,) = struct.unpack("<I", trailer)
    if zlib.crc32(body) & 0xFFFFFFFF != stored_crc:
        raise ModelFileError(f"{path}: checksum failure")
    (hlen,) = struct.unpack("<I", body[:4])
    try:
        header = json.loads(body[4 : 4 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: bad header ({exc})") from None
    if header.get("format") != FORMAT_NAME:
        raise ModelFileError(f"{path}: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ModelFileError(f"{path}: unsupported version {header.get('version')}")
    model = ModelGraph([layer_from_spec(spec) for spec in header["layers"]])
    offset = 4 + hlen
    values: dict[str, np.ndarray] = {}
    for name, shape in header["blobs"]:
        count = int(np.prod(shape)) if shape else 1
        raw = body[offset : offset + 4 * count]
        if len(raw) != 4 * count:
            raise ModelFileError(f"{path}: blob {name} truncated")
        values[name] = np.frombuffer(raw, dtype="<f4").astype(np.float64).reshape(shape)
        offset += 4 * count
    if offset != len(body):
        raise ModelFileError(f"{path}: {len(body) - offset} trailing bytes")
    model.set_params({k[2:]: v for k, v in values.items() if k.startswith("p:")})
    model.set_state({k[2:]: v for k, v in values.items() if k.startswith("s:")})
    return model, header.get("meta", {})
