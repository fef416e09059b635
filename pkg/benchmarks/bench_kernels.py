#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

The shapes mirror the real training workloads: the VAD's 2-D convolutions
over (batch, channels, mels, frames) maps and the classifier backbone's
temporal convolutions. Run after `python setup.py build_ext --inplace`:

    python benchmarks/bench_kernels.py [--repeats 10]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fillerkit.nnet.kernels import get_backend

CASES = [
    # name, kind, x shape, w shape, stride, pad
    ("vad conv1 (1->16ch, 64 mel)", "conv2d", (32, 1, 64, 100), (16, 1, 3, 3), (1, 1), ((1, 1), (1, 1))),
    ("vad conv2 (16->32ch, 16 mel)", "conv2d", (32, 16, 16, 100), (32, 16, 3, 3), (1, 1), ((1, 1), (1, 1))),
    ("vad conv3 (32->64ch, 4 mel)", "conv2d", (32, 32, 4, 100), (64, 32, 3, 3), (1, 1), ((1, 1), (1, 1))),
    ("clf stem (64->16ch, k3)", "conv1d", (32, 64, 100), (16, 64, 3), 1, (1, 1)),
    ("clf block1 (16->24ch, k9 s2)", "conv1d", (32, 16, 100), (24, 16, 9), 2, (3, 4)),
    ("clf block3 (32->48ch, k9 s2)", "conv1d", (32, 32, 25), (48, 32, 9), 2, (3, 4)),
]


def bench(fn, repeats: int) -> float:
    fn()  # warm-up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats * 1000.0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=10)
    args = parser.parse_args()

    backends = {}
    backends["numpy"] = get_backend("numpy")
    try:
        backends["cython"] = get_backend("cython")
    except ImportError:
        print("compiled backend not built; benchmarking the numpy fallback only")

    rng = np.random.default_rng(0)
    header = f"{'case':34s} {'pass':5s}" + "".join(f" {name:>10s}" for name in backends)
    print(header)
    print("-" * len(header))
    for name, kind, xs, ws, stride, pad in CASES:
        x = rng.standard_normal(xs)
        w = rng.standard_normal(ws)
        b = rng.standard_normal(ws[0])
        ref = None
        rows = {"fwd": [], "bwd": []}
        for bname, mod in backends.items():
            fwd = getattr(mod, f"{kind}_forward")
            bwd = getattr(mod, f"{kind}_backward")
            y = fwd(x, w, b, stride, pad)
            if ref is None:
                ref = y
            else:
                np.testing.assert_allclose(y, ref, rtol=1e-12, atol=1e-12)
            dy = np.random.default_rng(1).standard_normal(y.shape)
            rows["fwd"].append(bench(lambda: fwd(x, w, b, stride, pad), args.repeats))
            rows["bwd"].append(bench(lambda: bwd(x, w, dy, stride, pad), args.repeats))
        for passname, times in rows.items():
            cells = "".join(f" {t:9.2f}m" for t in times)
            print(f"{name:34s} {passname:5s}{cells}")
    print("\n(times in ms per call; outputs cross-checked between backends)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
