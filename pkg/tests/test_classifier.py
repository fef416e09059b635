import numpy as np
import pytest

from fillerkit.classifier import (
    ANNOTATION_LABELS,
    CLIP_FRAMES,
    ClassifierModel,
    Event,
    FeatureSource,
    LabelSet,
    LabelSetError,
    build_event_model,
    build_frame_model,
    classify_event,
    classify_frames,
    frames_to_events,
    load_classifier,
    load_training_records,
    map_labels,
    rasterize_events,
    save_classifier,
    train_event_classifier,
)
from fillerkit.nnet import TrainConfig


# --- label sets ---------------------------------------------------------------

def test_annotation13_is_five_plus_eight():
    ls = LabelSet.annotation13()
    assert len(ls.labels) == 13


def test_coarse5_content():
    assert LabelSet.coarse5().labels == ("filler", "words", "laughter", "music", "breath")


def test_granular6_splits_filler():
    ls = LabelSet.granular6()
    assert "uh" in ls.labels and "um" in ls.labels and "filler" not in ls.labels


def test_map_labels_consolidation():
    c5 = LabelSet.coarse5()
    assert map_labels("repetitions", c5) == "words"
    assert map_labels("regular_words", c5) == "words"
    assert map_labels("uh", c5) == "filler"
    assert map_labels("um", c5) == "filler"
    assert map_labels("laughter", c5) == "laughter"
    assert map_labels("simultaneous_speakers", c5) is None
    assert map_labels("agreement_sound", c5) is None  # below/at the 3K cutoff policy
    assert map_labels("uh", LabelSet.granular6()) == "uh"


def test_map_labels_total_over_annotation13():
    for target in (LabelSet.coarse5(), LabelSet.granular6(), LabelSet.desk3()):
        for label in ANNOTATION_LABELS:
            out = map_labels(label, target)  # mapped or dropped, never an error
            assert out is None or out in target.labels


def test_map_labels_unknown_rejected():
    with pytest.raises(LabelSetError):
        map_labels("mystery", LabelSet.coarse5())


def test_label_set_validates_mapping():
    with pytest.raises(LabelSetError):
        LabelSet("bad", ("a",), {"uh": "b"})
    with pytest.raises(LabelSetError):
        LabelSet("bad", ("a",), {"nope": "a"})


# --- model shapes ----------------------------------------------------------------

def test_event_model_posteriors():
    model = ClassifierModel("event", build_event_model(64, 3, seed=0), LabelSet.desk3(), 64)
    rng = np.random.default_rng(0)
    window = rng.standard_normal((CLIP_FRAMES, 64))
    post = classify_event(model, window)
    assert post.shape == (3,)
    assert post.sum() == pytest.approx(1.0, abs=1e-6)
    batch = classify_event(model, rng.standard_normal((4, CLIP_FRAMES, 64)))
    assert batch.shape == (4, 3)
    np.testing.assert_allclose(batch.sum(axis=1), 1.0, atol=1e-6)


def test_event_model_uniform_when_head_zeroed():
    graph = build_event_model(64, 5, seed=0)
    graph.layers[-1].w[...] = 0.0
    graph.layers[-1].b[...] = 0.0
    model = ClassifierModel("event", graph, LabelSet.coarse5(), 64)
    post = classify_event(model, np.random.default_rng(1).standard_normal((CLIP_FRAMES, 64)))
    np.testing.assert_allclose(post, 0.2, atol=1e-12)


def test_frame_model_shape():
    model = ClassifierModel("frame", build_frame_model(64, 3, seed=0), LabelSet.desk3(), 64)
    post = classify_frames(model, np.random.default_rng(2).standard_normal((CLIP_FRAMES, 64)))
    assert post.shape == (10, 3)
    np.testing.assert_allclose(post.sum(axis=1), 1.0, atol=1e-9)


def test_param_counts_near_100k():
    event = build_event_model(64, 5, seed=0)
    frame = build_frame_model(64, 5, seed=0)
    assert 50_000 <= event.param_count() <= 200_000
    assert 50_000 <= frame.param_count() <= 200_000


def test_variant_mismatch_rejected():
    model = ClassifierModel("event", build_event_model(64, 3, seed=0), LabelSet.desk3(), 64)
    with pytest.raises(ValueError):
        classify_frames(model, np.zeros((CLIP_FRAMES, 64)))


# --- rasterization and grouping ------------------------------------------------

def test_rasterize_spec_example():
    ls = LabelSet.desk3()
    targets = rasterize_events([Event(0.35, 0.65, "filler")], 0.0, 10, ls)
    words, filler = ls.index("words"), ls.index("filler")
    expected = [words] * 3 + [filler] * 4 + [words] * 3
    assert targets.tolist() == expected


def test_rasterize_no_events_all_background():
    ls = LabelSet.desk3()
    targets = rasterize_events([], 0.0, 10, ls)
    assert (targets == ls.index("words")).all()


def test_frames_to_events_run_grouping():
    ls = LabelSet.desk3()
    f, w = ls.index("filler"), ls.index("words")
    picks = [f, f, f, w, w, f, f, f, f, f]
    post = np.full((10, 3), 0.05)
    for i, k in enumerate(picks):
        post[i, k] = 0.9
    post /= post.sum(axis=1, keepdims=True)
    events = frames_to_events(post, 0.0, ls)
    assert [(e.start, e.end, e.label) for e in events] == [
        (0.0, 0.3, "filler"),
        (0.5, 1.0, "filler"),
    ]
    for e in events:
        assert 0.0 < e.confidence <= 1.0


def test_frames_to_events_all_background_empty():
    ls = LabelSet.desk3()
    post = np.zeros((10, 3))
    post[:, ls.index("words")] = 1.0
    assert frames_to_events(post, 0.0, ls) == []


def test_frames_to_events_matches_runlength_oracle():
    rng = np.random.default_rng(3)
    ls = LabelSet.desk3()
    for _ in range(100):
        post = rng.random((10, 3))
        post /= post.sum(axis=1, keepdims=True)
        events = frames_to_events(post, 0.0, ls)
        # oracle: brute-force run-length over argmax labels
        picks = post.argmax(axis=1)
        expected = []
        i = 0
        while i < 10:
            j = i
            while j + 1 < 10 and picks[j + 1] == picks[i]:
                j += 1
            if ls.labels[picks[i]] != "words":
                seg = post[i : j + 1, picks[i]]
                expected.append((i / 10, (j + 1) / 10, ls.labels[picks[i]], float(seg.mean())))
            i = j + 1
        assert [(e.start, e.end, e.label, e.confidence) for e in events] == expected


def test_frames_to_events_roundtrip_with_rasterize():
    rng = np.random.default_rng(4)
    ls = LabelSet.desk3()
    for _ in range(50):
        post = rng.random((10, 3))
        post /= post.sum(axis=1, keepdims=True)
        events = frames_to_events(post, 0.0, ls)
        targets = rasterize_events(events, 0.0, 10, ls)
        picks = post.argmax(axis=1)
        # frames whose argmax was background stay background; others match
        assert np.array_equal(targets, picks)


def test_frames_to_events_sorted_disjoint():
    rng = np.random.default_rng(5)
    ls = LabelSet.desk3()
    post = rng.random((40, 3))
    post /= post.sum(axis=1, keepdims=True)
    events = frames_to_events(post, 2.0, ls)
    for a, b in zip(events, events[1:]):
        assert a.end <= b.start + 1e-12
    assert all(e.start >= 2.0 for e in events)


# --- training path ----------------------------------------------------------------

def test_event_training_on_corpus(classifier_corpus, trained_event_clf):
    records = load_training_records(classifier_corpus)
    source = FeatureSource()
    from fillerkit.classifier import event_training_set

    x, y = event_training_set(records, LabelSet.desk3(), source)
    # held-out-ish check on the training distribution tail
    post = classify_event(trained_event_clf, np.swapaxes(x[-60:], 1, 2))
    acc = (post.argmax(axis=1) == y[-60:]).mean()
    assert acc >= 0.95


def test_zero_epochs_returns_initialized_model(classifier_corpus):
    records = load_training_records(classifier_corpus)[::12]  # spans all classes
    cfg = TrainConfig(epochs=0, seed=3)
    clf = train_event_classifier(records, LabelSet.desk3(), cfg)
    fresh = build_event_model(64, 3, seed=3)
    for k, v in clf.graph.named_params().items():
        np.testing.assert_array_equal(v, fresh.named_params()[k])


def test_training_deterministic_under_seed(classifier_corpus):
    records = load_training_records(classifier_corpus)[::20]  # spans all classes
    params = []
    for _ in range(2):
        cfg = TrainConfig(epochs=2, seed=11, batch_size=8)
        clf = train_event_classifier(records, LabelSet.desk3(), cfg)
        params.append({k: v.copy() for k, v in clf.graph.named_params().items()})
    for k in params[0]:
        np.testing.assert_array_equal(params[0][k], params[1][k])


def test_empty_class_rejected(classifier_corpus):
    records = [r for r in load_training_records(classifier_corpus) if r.label != "music"]
    with pytest.raises(ValueError, match="music"):
        train_event_classifier(records, LabelSet.desk3(), TrainConfig(epochs=1, seed=0))


def test_classifier_save_load_roundtrip(tmp_path, trained_event_clf):
    path = tmp_path / "clf.fwm"
    save_classifier(trained_event_clf, path)
    back = load_classifier(path)
    assert back.variant == "event"
    assert back.label_set.labels == trained_event_clf.label_set.labels
    rng = np.random.default_rng(6)
    window = rng.standard_normal((CLIP_FRAMES, 64))
    a = classify_event(trained_event_clf, window)
    b = classify_event(back, window)
    np.testing.assert_allclose(a, b, atol=1e-5)
