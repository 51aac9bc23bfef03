"""Bridge between clip manifests/frame plans and an arbitrary clip classifier."""

__version__ = "0.1.0"

from .classifiers import dummy_classifier, load_classifier
from .formats import ClipRow, CropRow, FormatError, PlanRow, read_frameplans, read_manifest
from .runner import AdapterConfig, InferenceResult, run_inference
