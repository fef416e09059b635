"""Audio I/O and resampling.

All audio is carried as an AudioClip: a mono float64 buffer in [-1, 1] plus
a sample rate. WAV support covers RIFF PCM16 and float32, the two encodings
the rest of the toolkit writes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

SOURCE_RATE = 44100
WORKING_RATE = 16000


class AudioError(ValueError):
    pass


@dataclass(frozen=True)
class AudioClip:
    """Mono audio buffer. samples: float64 in [-1, 1]; sample_rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise AudioError(f"sample_rate must be positive, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise AudioError("samples contain non-finite values")

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def load_wav(path) -> AudioClip:
    """Load a RIFF/WAVE file as a mono AudioClip.

    PCM16 is normalized by 1/32768; float32 is taken as-is. Stereo is mixed
    to mono by averaging the channels.
    """
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise AudioError(f"{path}: malformed WAV header ({exc})") from None
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise AudioError(f"{path}: unsupported WAV encoding {data.dtype} (want PCM16 or float32)")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    elif samples.ndim != 1:
        raise AudioError(f"{path}: unsupported channel layout with shape {samples.shape}")
    return AudioClip(samples=samples, sample_rate=int(rate))


def write_wav(path, clip: AudioClip, encoding: str = "float32") -> None:
    """Write an AudioClip as PCM16 or float32 WAV."""
    if encoding == "pcm16":
        # scale by 32768 to mirror load_wav's normalization; +1.0 clips to 32767
        data = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype(np.int16)
    elif encoding == "float32":
        data = clip.samples.astype(np.float32)
    else:
        raise AudioError(f"unsupported WAV encoding {encoding!r}")
    wavfile.write(path, clip.sample_rate, data)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited (polyphase) resampling to target_rate.

    Output length is round(n * target / source); identity when the rates
    already match.
    """
    if target_rate <= 0:
        raise AudioError(f"target_rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return clip
    n_out = int(round(len(clip.samples) * target_rate / clip.sample_rate))
    from math import gcd

    g = gcd(target_rate, clip.sample_rate)
    out = resample_poly(clip.samples, target_rate // g, clip.sample_rate // g)
    # resample_poly yields ceil(n*up/down) samples; pin to the length contract.
    if len(out) > n_out:
        out = out[:n_out]
    elif len(out) < n_out:
        out = np.pad(out, (0, n_out - len(out)))
    return AudioClip(samples=out, sample_rate=int(target_rate))
