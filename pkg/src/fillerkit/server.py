"""HTTP server for the annotation workflow.

JSON API consumed by the browser UI:

    GET  /api/next?annotator=ID   next leased candidate or {"done": true}
    POST /api/label               {candidate_id, annotator_id, label}
    GET  /api/audio/<id>          candidate clip WAV bytes
    GET  /api/stats               queue + agreement statistics
    GET  /api/labels              annotation label groups (filler / non-filler)

Anything else is served statically from the UI bundle directory. All store
mutations go through one lock; handlers run on the threading server.
"""

from __future__ import annotations

import json
import threading
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .annotation import AnnotationError, AnnotationStore
from .classifier import FILLER_LABELS, NON_FILLER_LABELS


class AnnotationHandler(SimpleHTTPRequestHandler):
    # instances are created per-request; store/lock arrive via partial()
    def __init__(self, *args, store: AnnotationStore, lock: threading.Lock, ui_dir: str, **kwargs):
        self._store = store
        self._lock = lock
        super().__init__(*args, directory=ui_dir, **kwargs)

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def end_headers(self):
        # the UI may be served from another origin during development
        if self.path.startswith("/api/"):
            self.send_header("Access-Control-Allow-Origin", "*")
        super().end_headers()

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _candidate_payload(self, clip) -> dict:
        hl = clip.highlight
        return {
            "id": clip.id,
            "episode": clip.episode,
            "highlight_start_s": hl[0],
            "highlight_end_s": hl[1],
            "audio_url": f"/api/audio/{clip.id}",
        }

    def do_GET(self):
        parsed = urlparse(self.path)
        if parsed.path == "/api/next":
            annotator = parse_qs(parsed.query).get("annotator", [""])[0]
            try:
                with self._lock:
                    clip = self._store.next_candidate(annotator)
            except AnnotationError as exc:
                self._send_json({"error": str(exc)}, status=400)
                return
            if clip is None:
                self._send_json({"done": True})
            else:
                self._send_json(self._candidate_payload(clip))
        elif parsed.path.startswith("/api/audio/"):
            cid = parsed.path[len("/api/audio/") :]
            try:
                with self._lock:
                    clip = self._store.get_clip(cid)
            except AnnotationError as exc:
                self._send_json({"error": str(exc)}, status=404)
                return
            wav = Path(clip.clip_path)
            if not wav.exists():
                self._send_json({"error": f"missing audio for {cid}"}, status=404)
                return
            data = wav.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", "audio/wav")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)
        elif parsed.path == "/api/stats":
            with self._lock:
                payload = {**self._store.stats(), "agreement": self._store.agreement_stats()}
            self._send_json(payload)
        elif parsed.path == "/api/labels":
            self._send_json({"filler": list(FILLER_LABELS), "non_filler": list(NON_FILLER_LABELS)})
        else:
            super().do_GET()

    def do_POST(self):
        parsed = urlparse(self.path)
        if parsed.path != "/api/label":
            self._send_json({"error": "unknown endpoint"}, status=404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            cid = payload["candidate_id"]
            annotator = payload["annotator_id"]
            label = payload["label"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            self._send_json({"error": f"bad request: {exc}"}, status=400)
            return
        try:
            with self._lock:
                state, final = self._store.submit_label(cid, annotator, label)
        except AnnotationError as exc:
            self._send_json({"error": str(exc)}, status=409)
            return
        self._send_json({"candidate_id": cid, "state": state, "final_label": final})


def make_server(store: AnnotationStore, port: int = 0, ui_dir: str | None = None, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Build (but do not start) the threading HTTP server; port 0 picks a
    free port, available afterwards as server.server_address[1]."""
    lock = threading.Lock()
    handler = partial(
        AnnotationHandler,
        store=store,
        lock=lock,
        ui_dir=ui_dir or str(Path.cwd()),
    )
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(store: AnnotationStore, port: int, ui_dir: str | None = None) -> None:
    server = make_server(store, port=port, ui_dir=ui_dir)
    host, bound_port = server.server_address[:2]
    print(f"annotation server listening on http://{host}:{bound_port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
