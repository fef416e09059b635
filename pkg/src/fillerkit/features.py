"""Log-mel feature extraction, SpecAugment masking, and feature-file I/O.

Frames are centered: frame i covers the window centered at sample i * hop, so
a 1 s clip at 16 kHz with a 10 ms hop yields exactly 100 frames at 100 Hz.
Precomputed embeddings (e.g. from a pretrained speech encoder) enter through
the same FrameSeries carrier via load_feature_file.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FrameSeries:
    """Time-indexed feature matrix (frames x dims) at a fixed frame rate.

    origin_offset is the time of the center of frame 0 in seconds, so frame
    i sits at origin_offset + i / frame_rate.
    """

    data: np.ndarray
    frame_rate: float
    origin_offset: float = 0.0

    def __post_init__(self):
        if self.frame_rate <= 0:
            raise FeatureError(f"frame_rate must be positive, got {self.frame_rate}")
        if self.data.ndim != 2:
            raise FeatureError(f"data must be 2-D (frames x dims), got shape {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise FeatureError("feature data contains non-finite values")

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> int:
        return self.data.shape[1]

    def frame_time(self, i: int) -> float:
        return self.origin_offset + i / self.frame_rate


@dataclass(frozen=True)
class MelConfig:
    """Log-mel analysis parameters.

    The paper-level constants are 64 bins with a 25 ms window and a 10 ms
    hop; FFT size, mel range, and the log floor are implementation choices
    kept configurable here.
    """

    n_mels: int = 64
    win_ms: float = 25.0
    hop_ms: float = 10.0
    fmin: float = 0.0
    fmax: float = 8000.0
    log_floor: float = 1e-10
    fft_size: int | None = None  # default: next power of two >= window length

    def __post_init__(self):
        if self.n_mels < 1:
            raise FeatureError("n_mels must be >= 1")
        if self.hop_ms > self.win_ms:
            raise FeatureError("hop_ms must be <= win_ms")

    def win_samples(self, sample_rate: int) -> int:
        return int(round(self.win_ms * sample_rate / 1000.0))

    def hop_samples(self, sample_rate: int) -> int:
        return int(round(self.hop_ms * sample_rate / 1000.0))

    def resolve_fft_size(self, sample_rate: int) -> int:
        if self.fft_size is not None:
            return self.fft_size
        n = 1
        while n < self.win_samples(sample_rate):
            n *= 2
        return n

    @property
    def frame_rate(self) -> float:
        return 1000.0 / self.hop_ms


def hz_to_mel(f):
    """HTK mel scale."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, fft_size: int, sample_rate: int, fmin: float, fmax: float) -> np.ndarray:
    """Triangular mel filterbank with HTK spacing, peak height 1.

    Returns a (n_mels, fft_size // 2 + 1) weight matrix.
    """
    if fmax > sample_rate / 2:
        raise FeatureError(f"fmax {fmax} exceeds Nyquist {sample_rate / 2}")
    mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)
    bin_freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    fb = np.zeros((n_mels, len(bin_freqs)))
    for k in range(n_mels):
        left, center, right = hz_pts[k], hz_pts[k + 1], hz_pts[k + 2]
        up = (bin_freqs - left) / max(center - left, 1e-12)
        down = (right - bin_freqs) / max(right - center, 1e-12)
        fb[k] = np.maximum(0.0, np.minimum(up, down))
    return fb


def mel_center_freqs(cfg: MelConfig, sample_rate: int) -> np.ndarray:
    """Center frequency in Hz of each mel filter."""
    mel_pts = np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax), cfg.n_mels + 2)
    return mel_to_hz(mel_pts)[1:-1]


def frame_count(n_samples: int, hop: int) -> int:
    return max(1, -(-n_samples // hop))


def stft_frames(samples: np.ndarray, win: int, hop: int) -> np.ndarray:
    """Slice a signal into centered frames of length win every hop samples.

    The signal is zero-padded by win // 2 on the left so frame i is centered
    at sample i * hop, and on the right as needed; a clip shorter than one
    window still yields one frame.
    """
    n = len(samples)
    n_frames = frame_count(n, hop)
    pad_left = win // 2
    needed = (n_frames - 1) * hop + win - pad_left
    pad_right = max(0, needed - n)
    x = np.pad(samples, (pad_left, pad_right))
    idx = np.arange(win)[None, :] + hop * np.arange(n_frames)[:, None]
    return x[idx]


def log_mel(clip: AudioClip, cfg: MelConfig = MelConfig()) -> FrameSeries:
    """Hann-windowed STFT -> triangular mel energies -> log with a floor."""
    sr = clip.sample_rate
    win = cfg.win_samples(sr)
    hop = cfg.hop_samples(sr)
    nfft = cfg.resolve_fft_size(sr)
    if nfft < win:
        raise FeatureError(f"fft_size {nfft} smaller than window {win}")
    frames = stft_frames(clip.samples, win, hop)
    window = np.hanning(win)
    spec = np.fft.rfft(frames * window, n=nfft, axis=1)
    power = spec.real**2 + spec.imag**2
    fb = mel_filterbank(cfg.n_mels, nfft, sr, cfg.fmin, cfg.fmax)
    energies = power @ fb.T
    data = np.log(np.maximum(energies, cfg.log_floor))
    return FrameSeries(data=data, frame_rate=cfg.frame_rate)


def spec_augment(
    features: FrameSeries,
    time_masks: int = 2,
    freq_masks: int = 2,
    max_t: int = 20,
    max_f: int = 8,
    rng_seed: int = 0,
) -> FrameSeries:
    """Mask random time/frequency stripes with the per-utterance mean.

    Deterministic under rng_seed; the input series is left untouched.
    """
    n_frames, dims = features.data.shape
    if max_t > n_frames or max_f > dims:
        raise FeatureError("mask width exceeds the corresponding dimension")
    rng = np.random.default_rng(rng_seed)
    data = features.data.copy()
    fill = float(features.data.mean())
    for _ in range(time_masks):
        width = int(rng.integers(0, max_t + 1))
        start = int(rng.integers(0, n_frames - width + 1))
        data[start : start + width, :] = fill
    for _ in range(freq_masks):
        width = int(rng.integers(0, max_f + 1))
        start = int(rng.integers(0, dims - width + 1))
        data[:, start : start + width] = fill
    return FrameSeries(data=data, frame_rate=features.frame_rate, origin_offset=features.origin_offset)


_FEAT_MAGIC = "FEAT1"


def save_feature_file(path, series: FrameSeries) -> None:
    """Write the feature-file format: text header + little-endian float32 rows."""
    rate = series.frame_rate
    rate_str = repr(int(rate)) if float(rate).is_integer() else repr(rate)
    header = f"{_FEAT_MAGIC} {series.n_frames} {series.dims} {rate_str}\n"
    payload = series.data.astype("<f4").tobytes(order="C")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload)


def load_feature_file(path) -> FrameSeries:
    """Read a feature file; validates the header, payload size, and finiteness."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace").strip()
        parts = header.split()
        if len(parts) != 4 or parts[0] != _FEAT_MAGIC:
            raise FeatureError(f"{path}: bad feature-file header {header!r}")
        try:
            n_frames, dims = int(parts[1]), int(parts[2])
            rate = float(parts[3])
        except ValueError:
            raise FeatureError(f"{path}: bad feature-file header {header!r}") from None
        payload = fh.read()
    expected = n_frames * dims * 4
    if len(payload) != expected:
        raise FeatureError(f"{path}: payload is {len(payload)} bytes, header implies {expected}")
    data = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(n_frames, dims)
    if not np.all(np.isfinite(data)):
        raise FeatureError(f"{path}: payload contains non-finite values")
    return FrameSeries(data=data, frame_rate=rate)
