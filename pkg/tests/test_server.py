"""HTTP API behavior against a live threading server."""

import json
import threading
from urllib.request import Request, urlopen

import numpy as np
import pytest

from fillerkit.annotation import AnnotationStore
from fillerkit.audio import AudioClip, write_wav
from fillerkit.candidates import CandidateClip
from fillerkit.server import make_server


@pytest.fixture()
def live_server(tmp_path):
    clips = []
    for i in range(3):
        wav = tmp_path / f"c{i}.wav"
        write_wav(wav, AudioClip(samples=np.zeros(16000), sample_rate=16000))
        clips.append(
            CandidateClip(id=f"c{i}", episode="ep", gap=(3.0, 3.2), window=(0.0, 5.0), clip_path=str(wav))
        )
    store = AnnotationStore(clips, log_path=tmp_path / "labels.jsonl")
    server = make_server(store, port=0, ui_dir=str(tmp_path))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base, store
    server.shutdown()
    server.server_close()


def get_json(url):
    with urlopen(url, timeout=5) as resp:
        return json.loads(resp.read())


def post_json(url, payload):
    req = Request(url, data=json.dumps(payload).encode(), headers={"Content-Type": "application/json"})
    try:
        with urlopen(req, timeout=5) as resp:
            return resp.status, json.loads(resp.read())
    except Exception as exc:  # HTTPError carries the body
        return exc.code, json.loads(exc.read())


def test_next_label_flow(live_server):
    base, _ = live_server
    cand = get_json(f"{base}/api/next?annotator=alice")
    assert cand["id"].startswith("c")
    assert cand["highlight_start_s"] == 3.0
    status, out = post_json(
        f"{base}/api/label",
        {"candidate_id": cand["id"], "annotator_id": "alice", "label": "uh"},
    )
    assert status == 200
    assert out["state"] == "needs_second"
    status, out = post_json(
        f"{base}/api/label",
        {"candidate_id": cand["id"], "annotator_id": "bob", "label": "uh"},
    )
    assert out["state"] == "resolved" and out["final_label"] == "uh"


def test_audio_endpoint_serves_wav(live_server):
    base, _ = live_server
    cand = get_json(f"{base}/api/next?annotator=x")
    with urlopen(base + cand["audio_url"], timeout=5) as resp:
        data = resp.read()
    assert data[:4] == b"RIFF"
    assert resp.headers["Content-Type"] == "audio/wav"


def test_invalid_label_is_409(live_server):
    base, _ = live_server
    status, out = post_json(
        f"{base}/api/label", {"candidate_id": "c0", "annotator_id": "a", "label": "nope"}
    )
    assert status == 409
    assert "invalid label" in out["error"]


def test_unknown_audio_404(live_server):
    base, _ = live_server
    try:
        urlopen(f"{base}/api/audio/zzz", timeout=5)
        status = 200
    except Exception as exc:
        status = exc.code
    assert status == 404


def test_stats_and_labels_endpoints(live_server):
    base, _ = live_server
    stats = get_json(f"{base}/api/stats")
    assert stats["total"] == 3
    labels = get_json(f"{base}/api/labels")
    assert len(labels["filler"]) == 5
    assert len(labels["non_filler"]) == 8


def test_done_when_queue_exhausted(live_server):
    base, _ = live_server
    for i in range(3):
        for who in ("a", "b"):
            get_json(f"{base}/api/next?annotator={who}")
            post_json(f"{base}/api/label", {"candidate_id": f"c{i}", "annotator_id": who, "label": "um"})
    out = get_json(f"{base}/api/next?annotator=zz")
    assert out == {"done": True}


def test_concurrent_dispatch_distinct(live_server):
    base, _ = live_server
    results = []

    def poll(name):
        results.append(get_json(f"{base}/api/next?annotator={name}")["id"])

    threads = [threading.Thread(target=poll, args=(f"w{i}",)) for i in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 3
