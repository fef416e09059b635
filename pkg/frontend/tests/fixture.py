"""Build a small candidate fixture for the UI end-to-end test.

Usage: python3 fixture.py <out_dir> <n_candidates>
Writes clips/<id>.wav and candidates.csv under out_dir.
"""

import sys
from pathlib import Path

import numpy as np

from fillerkit.audio import write_wav
from fillerkit.candidates import CandidateClip, write_candidate_manifest
from fillerkit.synth import compose_track, synth_tokens

out = Path(sys.argv[1])
n = int(sys.argv[2])
(out / "clips").mkdir(parents=True, exist_ok=True)
records = []
for i in range(n):
    rng = np.random.default_rng([77, i])
    dur = float(rng.uniform(0.2, 0.5))
    kind = "filler_like" if i % 3 != 2 else "word_like"
    token = synth_tokens(kind, dur, f0=float(rng.uniform(110, 200)), seed=i)
    clip = compose_track([(token, 3.0)], 5.0)
    cid = f"fix_{i:03d}"
    path = out / "clips" / f"{cid}.wav"
    write_wav(path, clip)
    records.append(
        CandidateClip(
            id=cid,
            episode="fixture",
            gap=(3.0, 3.0 + dur),
            window=(0.0, 5.0),
            clip_path=str(path),
        )
    )
write_candidate_manifest(out / "candidates.csv", records)
print(out / "candidates.csv")
