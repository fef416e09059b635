"""Synthetic soundscape generation for VAD training and end-to-end tests.

Two corpus flavors are produced here:

* VAD mixtures: clean speech mixed with background/foreground noise and
  music at controlled SNRs, with frame-level speech labels derived from the
  clean signal's amplitude (frames quieter than 19 dB below the clip peak
  are silent).
* Detection corpora: short episodes built from synthesized tokens, where
  word-like tokens come with oracle transcripts and filler-like tokens are
  deliberately left untranscribed, giving exact ground-truth filler events.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import AudioClip, load_wav, write_wav

FRAME_RATE = 100  # label frames per second (10 ms)
SILENCE_DB = 19.0  # below peak - 19 dB counts as silent
WORKING_RATE = 16000


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class FrameLabels:
    """Per-frame speech/non-speech labels at 100 Hz. True means speech."""

    speech: np.ndarray
    frame_rate: int = FRAME_RATE

    def __len__(self) -> int:
        return len(self.speech)


@dataclass(frozen=True)
class MixEvent:
    """One noise or music source to blend into a mixture."""

    clip: AudioClip
    snr_db: float
    role: str  # background | foreground | music
    onset: float = 0.0


@dataclass(frozen=True)
class MixSpec:
    speech: AudioClip
    events: tuple[MixEvent, ...] = ()
    peak_limit: float = 0.99


@dataclass(frozen=True)
class AppliedGain:
    role: str
    onset: float
    duration: float
    snr_db: float
    gain: float


@dataclass(frozen=True)
class MixResult:
    clip: AudioClip
    labels: FrameLabels
    event_gains: tuple[AppliedGain, ...]
    global_gain: float


@dataclass(frozen=True)
class SnrRanges:
    """SNR sampling ranges in dB (speech relative to each source type)."""

    background: tuple[float, float] = (12.0, 22.0)
    foreground: tuple[float, float] = (-3.0, 17.0)
    music: tuple[float, float] = (-6.0, 14.0)

    def range_for(self, role: str) -> tuple[float, float]:
        if role not in ("background", "foreground", "music"):
            raise SynthError(f"unknown mix role {role!r}")
        return getattr(self, role)


def label_speech_frames(clean: AudioClip) -> FrameLabels:
    """Label 10 ms frames speech/non-speech by peak-relative amplitude.

    A frame is speech iff its peak is within 19 dB of the clip's global
    peak (boundary inclusive). The rule is a ratio of peaks, so it is
    invariant to any global gain; an all-zero clip is all non-speech.
    """
    hop = clean.sample_rate // FRAME_RATE
    if hop * FRAME_RATE != clean.sample_rate:
        raise SynthError(f"sample rate {clean.sample_rate} not divisible into 10 ms frames")
    n_frames = max(1, -(-len(clean.samples) // hop))
    global_peak = float(np.max(np.abs(clean.samples))) if len(clean.samples) else 0.0
    if global_peak == 0.0:
        return FrameLabels(speech=np.zeros(n_frames, dtype=bool))
    threshold = 10.0 ** (-SILENCE_DB / 20.0)
    speech = np.zeros(n_frames, dtype=bool)
    for i in range(n_frames):
        frame = clean.samples[i * hop : (i + 1) * hop]
        peak = float(np.max(np.abs(frame))) if len(frame) else 0.0
        speech[i] = (peak / global_peak) >= threshold
    return FrameLabels(speech=speech)


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x)))) if len(x) else 0.0


def _place_source(event: MixEvent, n_samples: int, sample_rate: int) -> np.ndarray:
    """Render an event onto a zero canvas: background/music tile the whole
    mixture from t=0, foreground is dropped at its onset and cropped."""
    canvas = np.zeros(n_samples)
    src = event.clip.samples
    if len(src) == 0:
        return canvas
    if event.role in ("background", "music"):
        reps = -(-n_samples // len(src))
        canvas[:] = np.tile(src, reps)[:n_samples]
    else:
        start = int(round(event.onset * sample_rate))
        if start < 0 or start >= n_samples:
            raise SynthError(f"foreground onset {event.onset}s outside mixture")
        seg = src[: n_samples - start]
        canvas[start : start + len(seg)] = seg
    return canvas


def mix(spec: MixSpec) -> MixResult:
    """Blend noise/music sources into clean speech at per-source SNRs.

    Each source is gain-scaled so that 20*log10(rms_speech / rms_source)
    over its overlap region equals the target SNR, where rms_speech is
    taken over speech-active samples. The sum is peak-limited to
    spec.peak_limit by a single recorded global gain, which preserves all
    SNR relationships; labels always come from the clean speech.
    """
    sr = spec.speech.sample_rate
    n = len(spec.speech.samples)
    labels = label_speech_frames(spec.speech)
    hop = sr // FRAME_RATE
    active = np.repeat(labels.speech, hop)[:n]
    speech = spec.speech.samples
    if not np.any(active) or _rms(speech[active]) == 0.0:
        raise SynthError("speech clip is silent; SNR is undefined")

    mixture = speech.copy()
    applied: list[AppliedGain] = []
    for event in spec.events:
        placed = _place_source(event, n, sr)
        overlap = placed != 0.0
        rms_src = _rms(placed[overlap])
        if rms_src == 0.0:
            raise SynthError(f"{event.role} source is silent; SNR is undefined")
        sp_region = overlap & active
        rms_sp = _rms(speech[sp_region]) if np.any(sp_region) else _rms(speech[active])
        gain = rms_sp / (rms_src * 10.0 ** (event.snr_db / 20.0))
        mixture += placed * gain
        applied.append(
            AppliedGain(
                role=event.role,
                onset=event.onset,
                duration=len(event.clip.samples) / sr,
                snr_db=event.snr_db,
                gain=gain,
            )
        )

    peak = float(np.max(np.abs(mixture)))
    global_gain = spec.peak_limit / peak if peak > spec.peak_limit else 1.0
    mixture = mixture * global_gain
    return MixResult(
        clip=AudioClip(samples=mixture, sample_rate=sr),
        labels=labels,
        event_gains=tuple(applied),
        global_gain=global_gain,
    )


# --- frame-label files -----------------------------------------------------

def write_frame_labels(path, labels: FrameLabels) -> None:
    body = "".join("s" if v else "n" for v in labels.speech)
    Path(path).write_text(f"#rate={labels.frame_rate}\n{body}\n", encoding="ascii")


def load_frame_labels(path) -> FrameLabels:
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith("#rate="):
        raise SynthError(f"{path}: missing #rate= header")
    rate = int(lines[0][len("#rate=") :])
    body = lines[1] if len(lines) > 1 else ""
    if set(body) - {"s", "n"}:
        raise SynthError(f"{path}: label characters must be 's' or 'n'")
    return FrameLabels(speech=np.array([c == "s" for c in body], dtype=bool), frame_rate=rate)


# --- token and noise synthesis ---------------------------------------------

def synth_tokens(kind: str, duration: float, f0: float = 140.0, seed: int = 0) -> AudioClip:
    """Synthesize a desk-scale speech token at 16 kHz.

    filler_like is a steady vowel-ish harmonic tone (f0 plus three
    harmonics under a slow envelope); word_like is 2-4 short noise bursts
    with distinct spectral tilts separated by brief gaps. Deterministic
    under seed.
    """
    if not (0.05 <= duration <= 2.0):
        raise SynthError(f"token duration {duration}s outside [0.05, 2.0]")
    rng = np.random.default_rng([1234, seed])
    sr = WORKING_RATE
    n = int(round(duration * sr))
    t = np.arange(n) / sr
    if kind == "filler_like":
        amps = np.array([1.0, 0.55, 0.3, 0.18])
        phases = rng.uniform(0, 2 * np.pi, size=4)
        x = np.zeros(n)
        for h in range(4):
            x += amps[h] * np.sin(2 * np.pi * f0 * (h + 1) * t + phases[h])
        attack = min(int(0.03 * sr), n // 4)
        release = min(int(0.05 * sr), n // 4)
        env = np.ones(n)
        env[:attack] = np.linspace(0.0, 1.0, attack, endpoint=False)
        env[n - release :] = np.linspace(1.0, 0.0, release)
        # slow loudness wobble so the token is not perfectly stationary
        env *= 1.0 - 0.15 * np.sin(2 * np.pi * rng.uniform(1.5, 3.5) * t)
        x *= env
    elif kind == "word_like":
        # syllable-ish bursts: tilted noise plus a voiced harmonic carrier,
        # so single frames resemble filler frames even though the
        # burst/gap envelope does not
        n_bursts = int(rng.integers(2, 5))
        gap = int(0.02 * sr)
        total = n - gap * (n_bursts - 1)
        if total < n_bursts:
            n_bursts, total = 1, n
        lens = np.full(n_bursts, total // n_bursts)
        lens[: total % n_bursts] += 1
        x = np.zeros(n)
        pos = 0
        for blen in lens:
            blen = int(blen)
            burst = rng.standard_normal(blen)
            tilt = rng.uniform(-1.0, 1.0)
            spec = np.fft.rfft(burst)
            freqs = np.maximum(np.fft.rfftfreq(blen, 1 / sr), 50.0)
            spec *= (freqs / 1000.0) ** tilt
            burst = np.fft.irfft(spec, n=blen)
            burst /= max(np.max(np.abs(burst)), 1e-9)
            voiced = rng.uniform(0.4, 0.9)
            bf0 = rng.uniform(90.0, 240.0)
            bt = np.arange(blen) / sr
            carrier = np.zeros(blen)
            for h, amp in enumerate((1.0, 0.5, 0.25)):
                carrier += amp * np.sin(2 * np.pi * bf0 * (h + 1) * bt + rng.uniform(0, 2 * np.pi))
            carrier /= max(np.max(np.abs(carrier)), 1e-9)
            burst = (1.0 - voiced) * burst + voiced * carrier
            ramp = max(1, blen // 10)
            burst[:ramp] *= np.linspace(0, 1, ramp, endpoint=False)
            burst[-ramp:] *= np.linspace(1, 0, ramp)
            x[pos : pos + blen] = burst
            pos += blen + gap
    else:
        raise SynthError(f"unknown token kind {kind!r}")
    peak = np.max(np.abs(x))
    if peak > 0:
        x = 0.9 * x / peak
    return AudioClip(samples=x, sample_rate=sr)


def synth_noise(kind: str, duration: float, seed: int = 0) -> AudioClip:
    """Background material: white or pink noise, or a mains-style hum."""
    rng = np.random.default_rng([5678, seed])
    sr = WORKING_RATE
    n = int(round(duration * sr))
    if n <= 0:
        raise SynthError("noise duration must be positive")
    if kind == "white":
        x = rng.standard_normal(n)
    elif kind == "pink":
        white = rng.standard_normal(n)
        spec = np.fft.rfft(white)
        freqs = np.fft.rfftfreq(n, 1 / sr)
        spec[1:] /= np.sqrt(freqs[1:])
        spec[0] = 0.0
        x = np.fft.irfft(spec, n=n)
    elif kind == "hum":
        t = np.arange(n) / sr
        x = np.sin(2 * np.pi * 60.0 * t) + 0.4 * np.sin(2 * np.pi * 180.0 * t)
        x += 0.05 * rng.standard_normal(n)
    else:
        raise SynthError(f"unknown noise kind {kind!r}")
    peak = np.max(np.abs(x))
    return AudioClip(samples=0.9 * x / peak, sample_rate=sr)


def compose_track(events: list[tuple[AudioClip, float]], duration: float, sample_rate: int = WORKING_RATE) -> AudioClip:
    """Sum clips onto a silent canvas at their onsets (seconds)."""
    n = int(round(duration * sample_rate))
    canvas = np.zeros(n)
    for clip, onset in events:
        if clip.sample_rate != sample_rate:
            raise SynthError("all clips must share the canvas sample rate")
        start = int(round(onset * sample_rate))
        seg = clip.samples[: max(0, n - start)]
        if start < 0 or len(seg) == 0:
            raise SynthError(f"event onset {onset}s outside the canvas")
        canvas[start : start + len(seg)] += seg
    peak = np.max(np.abs(canvas))
    if peak > 0.99:
        canvas *= 0.99 / peak
    return AudioClip(samples=canvas, sample_rate=sample_rate)


# --- VAD mixture corpus ----------------------------------------------------

@dataclass(frozen=True)
class SourceSet:
    """Source material for one split; paths to 16 kHz WAV files."""

    speech: tuple[str, ...]
    noise: tuple[str, ...]
    music: tuple[str, ...] = ()


MANIFEST_FIELDS = ["path", "label_path", "split", "duration_s", "seed"]


def _check_disjoint(train: SourceSet, test: SourceSet) -> None:
    for kind in ("speech", "noise", "music"):
        overlap = set(getattr(train, kind)) & set(getattr(test, kind))
        if overlap:
            raise SynthError(f"{kind} sources appear in both splits: {sorted(overlap)[:3]}")


def _make_mixture(speech_path: str, noise_paths, music_paths, snr: SnrRanges, rng) -> MixResult:
    speech = load_wav(speech_path)
    events = []
    lo, hi = snr.background
    events.append(
        MixEvent(clip=load_wav(rng.choice(noise_paths)), snr_db=float(rng.uniform(lo, hi)), role="background")
    )
    if rng.random() < 0.5:
        lo, hi = snr.foreground
        onset = float(rng.uniform(0.0, max(0.01, speech.duration - 0.3)))
        events.append(
            MixEvent(
                clip=load_wav(rng.choice(noise_paths)),
                snr_db=float(rng.uniform(lo, hi)),
                role="foreground",
                onset=onset,
            )
        )
    if music_paths and rng.random() < 0.5:
        lo, hi = snr.music
        events.append(
            MixEvent(clip=load_wav(rng.choice(music_paths)), snr_db=float(rng.uniform(lo, hi)), role="music")
        )
    return mix(MixSpec(speech=speech, events=tuple(events)))


def generate_corpus(
    out_dir,
    n_train: int,
    n_test: int,
    train_sources: SourceSet,
    test_sources: SourceSet,
    snr: SnrRanges = SnrRanges(),
    seed: int = 0,
    jobs: int = 1,
) -> Path:
    """Write a VAD mixture corpus: WAVs, frame-label files, and a manifest.

    Refuses to run if any source clip is shared between splits. Each
    mixture draws its own RNG stream from (seed, index), so parallel and
    serial runs produce byte-identical output for a fixed seed.
    """
    _check_disjoint(train_sources, test_sources)
    out = Path(out_dir)
    (out / "mixtures").mkdir(parents=True, exist_ok=True)
    (out / "labels").mkdir(parents=True, exist_ok=True)
    tasks = [("train", i, train_sources) for i in range(n_train)] + [
        ("test", i, test_sources) for i in range(n_test)
    ]

    def build(task):
        split, i, sources = task
        idx = i if split == "train" else n_train + i
        rng = np.random.default_rng([seed, idx])
        speech_path = str(rng.choice(sources.speech))
        result = _make_mixture(speech_path, sources.noise, sources.music or None, snr, rng)
        name = f"mix_{split}_{i:05d}"
        wav_path = out / "mixtures" / f"{name}.wav"
        lab_path = out / "labels" / f"{name}.lab"
        write_wav(wav_path, result.clip)
        write_frame_labels(lab_path, result.labels)
        return {
            "path": str(wav_path),
            "label_path": str(lab_path),
            "split": split,
            "duration_s": repr(result.clip.duration),
            "seed": str(idx),
        }

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(build, tasks))  # map preserves task order
    else:
        rows = [build(t) for t in tasks]
    manifest = out / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=MANIFEST_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    return manifest


def make_pseudo_embeddings(wav_paths, out_dir, dims: int = 32, seed: int = 0) -> list[str]:
    """Stand-in for precomputed speech embeddings: a fixed seeded random
    projection of log-mel, written as feature files (one per WAV, same stem).

    Exercises the external-feature path without any pretrained model.
    """
    from .audio import load_wav
    from .features import FrameSeries, MelConfig, log_mel, save_feature_file

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mel = MelConfig()
    rng = np.random.default_rng([404, seed])
    projection = rng.standard_normal((mel.n_mels, dims)) / np.sqrt(mel.n_mels)
    paths = []
    for wav in wav_paths:
        series = log_mel(load_wav(wav), mel)
        feat_path = out / f"{Path(wav).stem}.feat"
        save_feature_file(feat_path, FrameSeries(data=series.data @ projection, frame_rate=series.frame_rate))
        paths.append(str(feat_path))
    return paths


def make_token_pool(out_dir, kind: str, count: int, seed: int, f0_range=(110.0, 200.0)) -> list[str]:
    """Write a pool of token WAVs; returns their paths. Pools built with
    different seeds share no clips, which keeps splits leak-free."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng([91, seed])
    paths = []
    for i in range(count):
        dur = float(rng.uniform(0.2, 0.6)) if kind == "filler_like" else float(rng.uniform(0.25, 0.7))
        f0 = float(rng.uniform(*f0_range))
        clip = synth_tokens(kind, dur, f0=f0, seed=seed * 100003 + i)
        path = out / f"{kind}_{seed}_{i:04d}.wav"
        write_wav(path, clip)
        paths.append(str(path))
    return paths


def make_speech_pool(out_dir, count: int, seed: int, duration_range=(2.0, 4.0)) -> list[str]:
    """Write speech tracks built from tokens separated by silences.

    These serve as the clean-speech side of VAD mixtures: peak-normalized
    tracks whose silent stretches give the amplitude rule something to
    label as non-speech.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng([92, seed])
    paths = []
    for i in range(count):
        duration = float(rng.uniform(*duration_range))
        events = []
        cursor = float(rng.uniform(0.1, 0.4))
        j = 0
        while cursor < duration - 0.4:
            kind = "filler_like" if rng.random() < 0.5 else "word_like"
            tok_dur = float(rng.uniform(0.15, 0.6))
            token = synth_tokens(kind, tok_dur, f0=float(rng.uniform(100.0, 220.0)), seed=seed * 7919 + i * 101 + j)
            events.append((token, cursor))
            cursor += tok_dur + float(rng.uniform(0.2, 0.8))
            j += 1
        if not events:
            token = synth_tokens("filler_like", 0.4, seed=seed * 7919 + i * 101)
            events.append((token, 0.2))
        track = compose_track(events, duration)
        peak = np.max(np.abs(track.samples))
        samples = track.samples * (0.9 / peak) if peak > 0 else track.samples
        path = out / f"speech_{seed}_{i:04d}.wav"
        write_wav(path, AudioClip(samples=samples, sample_rate=track.sample_rate))
        paths.append(str(path))
    return paths


def make_noise_pool(out_dir, count: int, seed: int, duration: float = 3.0) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng([93, seed])
    kinds = ["white", "pink", "hum"]
    paths = []
    for i in range(count):
        kind = kinds[int(rng.integers(0, len(kinds)))]
        clip = synth_noise(kind, duration, seed=seed * 6007 + i)
        path = out / f"noise_{seed}_{i:04d}.wav"
        write_wav(path, clip)
        paths.append(str(path))
    return paths


# --- detection corpus with oracle transcripts --------------------------------

DETECTION_FIELDS = ["episode", "audio_path", "transcript_path", "ref_path", "duration_s", "n_fillers", "seed"]


def _with_noise_floor(samples: np.ndarray, rng, snr_db: float) -> np.ndarray:
    """Add white noise scaled against the non-silent part of the signal."""
    noise = rng.standard_normal(len(samples))
    loud = np.abs(samples) > 0.05
    rms_sig = _rms(samples[loud]) if np.any(loud) else _rms(samples)
    if rms_sig == 0.0:
        return samples
    gain = rms_sig / (_rms(noise) * 10.0 ** (snr_db / 20.0))
    return samples + noise * gain


def generate_detection_corpus(
    out_dir,
    n_episodes: int,
    seed: int = 0,
    noise_snr_db: float = 24.0,
    missed_word_rate: float = 0.25,
    phrase_rate: float = 0.45,
) -> Path:
    """Write short episodes with oracle transcripts and ground-truth fillers.

    Each episode strings word-like tokens (transcribed with exact times)
    and filler-like tokens (absent from the transcript) over a noise floor.
    A fraction of word tokens are dropped from the transcript to mimic ASR
    misses, giving the classifier non-filler candidates to reject. A share
    of slots are word-filler-word phrases with short pauses: the transcript
    still bounds those fillers tightly, while transcript-free detection has
    to find the boundaries acoustically.
    """
    out = Path(out_dir)
    for sub in ("episodes", "transcripts", "refs"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    from .transcripts import Transcript, Word, write_transcript_jsonl

    rows = []
    for i in range(n_episodes):
        rng = np.random.default_rng([seed, 17, i])
        events: list[tuple[AudioClip, float]] = []
        words: list[Word] = []
        fillers: list[tuple[float, float]] = []
        cursor = float(rng.uniform(0.3, 0.6))
        n_slots = int(rng.integers(4, 8))
        word_idx = 0

        def add_word(cursor, transcribed=None):
            nonlocal word_idx
            dur = float(rng.uniform(0.25, 0.7))
            token = synth_tokens("word_like", dur, seed=seed * 1000003 + i * 1009 + word_idx * 13 + 7)
            events.append((token, cursor))
            if transcribed if transcribed is not None else (rng.random() >= missed_word_rate):
                words.append(Word(text=f"w{word_idx}", start=cursor, end=cursor + dur, confidence=0.95))
            word_idx += 1
            return cursor + dur

        def add_filler(cursor, short=False):
            lo, hi = (0.15, 0.3) if short else (0.2, 0.6)
            dur = float(rng.uniform(lo, hi))
            token = synth_tokens(
                "filler_like", dur, f0=float(rng.uniform(100.0, 220.0)), seed=seed * 999983 + i * 1013 + len(events)
            )
            events.append((token, cursor))
            fillers.append((cursor, cursor + dur))
            return cursor + dur

        for slot in range(n_slots):
            roll = rng.random()
            if roll < phrase_rate:
                # word .. filler .. word with short pauses; the words are
                # always transcribed so the gap bounds the filler tightly
                cursor = add_word(cursor, transcribed=True)
                cursor += float(rng.uniform(0.3, 0.45))
                cursor = add_filler(cursor, short=bool(rng.random() < 0.5))
                cursor += float(rng.uniform(0.3, 0.45))
                cursor = add_word(cursor, transcribed=True)
            elif roll < phrase_rate + 0.25:
                cursor = add_filler(cursor, short=bool(rng.random() < 0.3))
            else:
                cursor = add_word(cursor)
            cursor += float(rng.uniform(0.5, 0.9))
        duration = cursor + float(rng.uniform(0.2, 0.5))
        track = compose_track(events, duration)
        samples = _with_noise_floor(track.samples, rng, noise_snr_db)
        peak = np.max(np.abs(samples))
        if peak > 0.99:
            samples = samples * (0.99 / peak)
        name = f"ep_{i:04d}"
        wav_path = out / "episodes" / f"{name}.wav"
        tr_path = out / "transcripts" / f"{name}.jsonl"
        ref_path = out / "refs" / f"{name}.csv"
        write_wav(wav_path, AudioClip(samples=samples, sample_rate=track.sample_rate))
        write_transcript_jsonl(tr_path, Transcript(tuple(words)))
        with open(ref_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["start_s", "end_s", "label", "confidence"])
            for s, e in fillers:
                writer.writerow([repr(s), repr(e), "filler", "1.0"])
        rows.append(
            {
                "episode": name,
                "audio_path": str(wav_path),
                "transcript_path": str(tr_path),
                "ref_path": str(ref_path),
                "duration_s": repr(duration),
                "n_fillers": str(len(fillers)),
                "seed": str(i),
            }
        )
    corpus = out / "corpus.csv"
    with open(corpus, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=DETECTION_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    return corpus


# --- labeled candidate corpus for classifier training ------------------------

def make_candidate_clip(label: str, rng, noise_snr_db: float | None = None) -> tuple[AudioClip, float, float]:
    """Build one 5 s candidate-context clip with its highlight at 3.0 s.

    label is an annotation-level label; the highlighted sound is a
    synthetic stand-in (low-pitched short tones for `uh`, higher and longer
    for `um`, noise bursts for word labels, sustained texture for music).
    The noise floor is drawn per clip when not pinned, so classifiers
    cannot latch onto one absolute floor level.
    """
    context = 5.0
    if noise_snr_db is None:
        noise_snr_db = float(rng.uniform(18.0, 34.0))
    seed = int(rng.integers(0, 2**31 - 1))
    if label == "uh":
        dur = float(rng.uniform(0.15, 0.45))
        token = synth_tokens("filler_like", dur, f0=float(rng.uniform(100.0, 145.0)), seed=seed)
    elif label == "um":
        dur = float(rng.uniform(0.35, 0.7))
        token = synth_tokens("filler_like", dur, f0=float(rng.uniform(160.0, 220.0)), seed=seed)
    elif label in ("regular_words", "repetitions"):
        dur = float(rng.uniform(0.25, 0.7))
        token = synth_tokens("word_like", dur, seed=seed)
    elif label == "music":
        dur = float(rng.uniform(0.3, 0.8))
        base = synth_noise("pink" if rng.random() < 0.5 else "hum", dur, seed=seed)
        token = AudioClip(samples=base.samples * 0.7, sample_rate=base.sample_rate)
    else:
        raise SynthError(f"no synthetic recipe for annotation label {label!r}")
    events = [(token, 3.0)]
    # context words: some far away, some hugging the highlight the way
    # phrase fillers appear between words in real timelines
    if rng.random() < 0.5:
        ctx = synth_tokens("word_like", float(rng.uniform(0.25, 0.5)), seed=seed + 1)
        events.append((ctx, float(rng.uniform(0.5, 1.6))))
    if rng.random() < 0.5:
        before = synth_tokens("word_like", float(rng.uniform(0.25, 0.6)), seed=seed + 2)
        events.append((before, 3.0 - float(rng.uniform(0.3, 0.5)) - before.duration))
    if rng.random() < 0.5:
        after = synth_tokens("word_like", float(rng.uniform(0.25, 0.6)), seed=seed + 3)
        events.append((after, 3.0 + dur + float(rng.uniform(0.3, 0.5))))
    track = compose_track(events, context)
    samples = _with_noise_floor(track.samples, rng, noise_snr_db)
    peak = np.max(np.abs(samples))
    if peak > 0.99:
        samples = samples * (0.99 / peak)
    return AudioClip(samples=samples, sample_rate=track.sample_rate), 3.0, 3.0 + dur


def make_classifier_corpus(
    out_dir,
    n_per_class: int,
    classes=("uh", "um", "regular_words", "repetitions", "music"),
    seed: int = 0,
) -> Path:
    """Write a resolved candidate manifest for classifier training."""
    from .candidates import CANDIDATE_FIELDS

    out = Path(out_dir)
    (out / "clips").mkdir(parents=True, exist_ok=True)
    rows = []
    idx = 0
    for label in classes:
        for j in range(n_per_class):
            rng = np.random.default_rng([seed, 23, idx])
            clip, hi_start, hi_end = make_candidate_clip(label, rng)
            cid = f"synth_{label}_{j:04d}"
            clip_path = out / "clips" / f"{cid}.wav"
            write_wav(clip_path, clip)
            rows.append(
                {
                    "id": cid,
                    "episode": "synthetic",
                    "gap_start_s": repr(hi_start),
                    "gap_end_s": repr(hi_end),
                    "clip_path": str(clip_path),
                    "highlight_start_s": repr(hi_start),
                    "highlight_end_s": repr(hi_end),
                    "status": "resolved",
                    "label": label,
                }
            )
            idx += 1
    manifest = out / "candidates.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CANDIDATE_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    return manifest
