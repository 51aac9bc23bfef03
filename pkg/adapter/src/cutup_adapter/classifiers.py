"""Classifier plug-in loading.

A classifier is any callable (frame_indices, crop, clip) -> three logits.
`frame_indices` is the sample's frame index tuple, `crop` the crop-geometry
dict, and `clip` a dict with clip_id/video_id/split/start_s/end_s/label plus
video_path when a video root is configured.  Plug-ins are addressed by dotted
entry-point name ("package.module:attribute"); the name "dummy" resolves to
the bundled constant classifier.
"""

from __future__ import annotations

import importlib
from typing import Callable, Sequence

Classifier = Callable[[Sequence[int], dict, dict], Sequence[float]]


def dummy_classifier(frame_indices, crop, clip) -> tuple[float, float, float]:
    """Constant-logit stand-in for smoke tests and format checks."""
    return (1.0, 0.0, 0.0)


def load_classifier(spec: str) -> Classifier:
    if spec == "dummy":
        return dummy_classifier
    module_name, sep, attr = spec.partition(":")
    if not sep or not module_name or not attr:
        raise ValueError(
            f"classifier spec {spec!r} must be 'dummy' or 'package.module:attribute'"
        )
    try:
        module = importlib.import_module(module_name)
    except ImportError as exc:
        raise ValueError(f"cannot import classifier module {module_name!r}: {exc}") from exc
    try:
        fn = getattr(module, attr)
    except AttributeError as exc:
        raise ValueError(f"module {module_name!r} has no attribute {attr!r}") from exc
    if not callable(fn):
        raise ValueError(f"classifier {spec!r} is not callable")
    return fn
