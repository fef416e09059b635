"""Shared fixtures: synthetic corpora and trained models.

The expensive fixtures are session-scoped and lazy, so unit tests stay
fast while the acceptance tests share one VAD / classifier training run.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fillerkit.classifier import (
    FeatureSource,
    LabelSet,
    load_training_records,
    train_event_classifier,
    train_frame_classifier,
)
from fillerkit.nnet import TrainConfig
from fillerkit.synth import (
    SourceSet,
    generate_corpus,
    generate_detection_corpus,
    make_classifier_corpus,
    make_noise_pool,
    make_speech_pool,
)
from fillerkit.vad import train_vad

# acceptance-pinned sizes
VAD_TRAIN_MIXTURES = 520
VAD_TEST_MIXTURES = 60
DETECTION_EPISODES = 210
CLF_PER_CLASS = 110


@pytest.fixture(scope="session")
def world_dir(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("world")


@pytest.fixture(scope="session")
def small_vad_corpus(world_dir):
    """Quick corpus for unit tests: 80 train / 16 test mixtures."""
    root = world_dir / "vad_small"
    train = SourceSet(
        speech=tuple(make_speech_pool(root / "ts", 20, seed=10)),
        noise=tuple(make_noise_pool(root / "tn", 8, seed=10)),
    )
    test = SourceSet(
        speech=tuple(make_speech_pool(root / "es", 8, seed=11)),
        noise=tuple(make_noise_pool(root / "en", 4, seed=11)),
    )
    return generate_corpus(root / "corpus", 80, 16, train, test, seed=10)


@pytest.fixture(scope="session")
def vad_corpus(world_dir):
    """Acceptance-scale mixture corpus (>=500 training mixtures)."""
    root = world_dir / "vad_full"
    train = SourceSet(
        speech=tuple(make_speech_pool(root / "ts", 48, seed=0)),
        noise=tuple(make_noise_pool(root / "tn", 12, seed=0)),
    )
    test = SourceSet(
        speech=tuple(make_speech_pool(root / "es", 16, seed=1)),
        noise=tuple(make_noise_pool(root / "en", 6, seed=1)),
    )
    return generate_corpus(root / "corpus", VAD_TRAIN_MIXTURES, VAD_TEST_MIXTURES, train, test, seed=0)


@pytest.fixture(scope="session")
def trained_vad(vad_corpus):
    cfg = TrainConfig(lr=1e-3, epochs=8, batch_size=32, loss="binary_cross_entropy", seed=0)
    return train_vad(vad_corpus, cfg).model


@pytest.fixture(scope="session")
def tiny_vad(small_vad_corpus):
    """Lightly trained VAD for unit tests that just need sane activations."""
    cfg = TrainConfig(lr=1e-3, epochs=5, batch_size=32, loss="binary_cross_entropy", seed=0)
    return train_vad(small_vad_corpus, cfg).model


@pytest.fixture(scope="session")
def classifier_corpus(world_dir):
    return make_classifier_corpus(world_dir / "clf", n_per_class=CLF_PER_CLASS, seed=0)


@pytest.fixture(scope="session")
def trained_event_clf(classifier_corpus):
    records = load_training_records(classifier_corpus)
    cfg = TrainConfig(lr=1e-3, epochs=18, batch_size=32, seed=0)
    return train_event_classifier(records, LabelSet.desk3(), cfg, FeatureSource())


@pytest.fixture(scope="session")
def trained_frame_clf(classifier_corpus):
    records = load_training_records(classifier_corpus)
    cfg = TrainConfig(lr=1e-3, epochs=18, batch_size=32, seed=0)
    return train_frame_classifier(records, LabelSet.desk3(), cfg, FeatureSource())


@pytest.fixture(scope="session")
def detection_corpus(world_dir):
    """Evaluation episodes with oracle transcripts and reference fillers."""
    return generate_detection_corpus(world_dir / "detect", n_episodes=DETECTION_EPISODES, seed=5)


@pytest.fixture(scope="session")
def small_detection_corpus(world_dir):
    return generate_detection_corpus(world_dir / "detect_small", n_episodes=12, seed=6)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
