"""fillerkit: filler-word detection and classification toolkit.

Pipeline stages: synthetic soundscape corpora with frame-level speech
labels, a from-scratch VAD trained on them, candidate generation from
VAD/transcript gaps, filler classifiers over candidates, segment/event
evaluation, and an HTTP annotation workflow with 2-of-3 agreement.
"""

__version__ = "0.1.0"
