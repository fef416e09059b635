import numpy as np
import pytest
from scipy.io import wavfile

from fillerkit.audio import AudioClip, AudioError, load_wav, resample, write_wav
from oracles import dominant_frequency, sine_amplitude


def test_load_pcm16_silence(tmp_path):
    path = tmp_path / "s.wav"
    wavfile.write(path, 44100, np.zeros(44100, dtype=np.int16))
    clip = load_wav(path)
    assert clip.sample_rate == 44100
    assert len(clip) == 44100
    assert np.all(clip.samples == 0.0)


def test_stereo_averages_to_mono(tmp_path):
    path = tmp_path / "st.wav"
    data = np.stack([np.full(1000, 0.5, dtype=np.float32), np.full(1000, -0.5, dtype=np.float32)], axis=1)
    wavfile.write(path, 16000, data)
    clip = load_wav(path)
    assert np.all(clip.samples == 0.0)


def test_float32_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(0)
    samples = rng.uniform(-1, 1, 5000).astype(np.float32).astype(np.float64)
    path = tmp_path / "r.wav"
    write_wav(path, AudioClip(samples=samples, sample_rate=16000), encoding="float32")
    back = load_wav(path)
    assert back.sample_rate == 16000
    assert np.array_equal(back.samples, samples)


def test_pcm16_roundtrip_quantized(tmp_path):
    rng = np.random.default_rng(1)
    samples = rng.uniform(-1, 1, 2000)
    path = tmp_path / "q.wav"
    write_wav(path, AudioClip(samples=samples, sample_rate=16000), encoding="pcm16")
    back = load_wav(path)
    assert np.max(np.abs(back.samples - samples)) < 1.0 / 32767


def test_malformed_header_raises(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"this is not a wav file at all" * 3)
    with pytest.raises(AudioError, match="malformed"):
        load_wav(path)


def test_unsupported_encoding_raises(tmp_path):
    path = tmp_path / "u8.wav"
    wavfile.write(path, 8000, np.zeros(100, dtype=np.uint8))
    with pytest.raises(AudioError, match="unsupported"):
        load_wav(path)


def test_resample_length_contract():
    clip = AudioClip(samples=np.zeros(44100), sample_rate=44100)
    out = resample(clip, 16000)
    assert len(out) == 16000 and out.sample_rate == 16000


def test_resample_identity_when_rates_match():
    clip = AudioClip(samples=np.linspace(-0.5, 0.5, 777), sample_rate=16000)
    assert resample(clip, 16000) is clip


def test_resample_preserves_tone():
    sr = 44100
    t = np.arange(sr) / sr
    clip = AudioClip(samples=0.5 * np.sin(2 * np.pi * 1000.0 * t), sample_rate=sr)
    out = resample(clip, 16000)
    # DFT oracle on the output: dominant bin at 1 kHz, amplitude within 1%
    assert dominant_frequency(out.samples, 16000) == pytest.approx(1000.0, abs=1.0)
    interior = out.samples[800:-800]  # skip filter edge transients
    assert sine_amplitude(interior, 16000, 1000.0) == pytest.approx(0.5, rel=0.01)


def test_resample_awkward_length_rounds():
    clip = AudioClip(samples=np.zeros(1001), sample_rate=44100)
    out = resample(clip, 16000)
    assert len(out) == round(1001 * 16000 / 44100)


def test_invalid_sample_rate_rejected():
    with pytest.raises(AudioError):
        AudioClip(samples=np.zeros(10), sample_rate=0)
    with pytest.raises(AudioError):
        resample(AudioClip(samples=np.zeros(10), sample_rate=16000), -1)


def test_nonfinite_samples_rejected():
    with pytest.raises(AudioError):
        AudioClip(samples=np.array([0.0, np.nan]), sample_rate=16000)
