"""Deterministic clip-dataset generation and fall-detection evaluation toolkit."""

__version__ = "0.1.0"

from .annotations import (
    ActionClass,
    Segment,
    Timeline,
    VideoKind,
    VideoRecord,
    build_timeline,
    parse_annotations,
    serialize_annotations,
)
from .dataset import (
    Manifest,
    SplitConfig,
    UndersamplePolicy,
    build_manifest,
    class_weights,
    distribution_report,
    read_manifest,
    stratified_split,
    undersample,
    write_manifest,
)
from .errors import (
    ConfigError,
    CoverageError,
    CutupError,
    GeometryError,
    ParseError,
    UnsampleableVideoError,
    ValidationError,
)
from .evaluation import (
    PredictionRecord,
    aggregate_clip,
    clip_metrics,
    read_predictions,
    score_predictions,
    video_aggregate,
    video_metrics,
    write_predictions,
)
from .frameplan import (
    CropPlan,
    FramePlanConfig,
    FrameWindow,
    SamplePlan,
    normalization_moments,
    plan_clip,
    plan_crops,
    plan_frames,
    read_frameplans,
    write_frameplans,
)
from .labeling import LabeledClip, LabelPolicy, Split, label_clip, label_quality
from .sampling import (
    ClipSpec,
    CutupConfig,
    GaussianConfig,
    SamplerKind,
    cutup_sample,
    gaussian_sample,
    gaussian_sigma_s,
)
from .synth import CorpusConfig, OracleConfig, generate_corpus, oracle_predict
