"""Synthetic annotation corpora and a confusion-driven oracle classifier.

The corpus mimics the aggregate shape of a multi-hour fall-simulation dataset
(long ADL recordings, ~2:45 min fall scenarios) without any pixels.  The
oracle stands in for a trained clip classifier: it knows each clip's true
label and predicts by drawing from the matching row of a confusion matrix,
which makes downstream metric values statistically predictable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .annotations import ActionClass, VideoKind, VideoRecord
from .dataset import Manifest
from .errors import ConfigError
from .evaluation import CLASS_ORDER, PredictionRecord
from .frameplan import SamplePlan
from .rational import quantize_ms
from .rng import Stream


@dataclass(frozen=True, slots=True)
class CorpusConfig:
    n_fall_videos: int = 55
    n_adl_videos: int = 17
    fall_len_mean_s: Fraction = Fraction(165)
    adl_len_mean_s: Fraction = Fraction(1237)
    fps: Fraction = Fraction(25)
    fall_interval_len_s: tuple[Fraction, Fraction] = (Fraction(2), Fraction(6))
    visibility_miss_rate: float = 0.0
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_fall_videos < 0 or self.n_adl_videos < 0:
            raise ConfigError("video counts must be nonnegative")
        if not (0 <= self.visibility_miss_rate <= 1):
            raise ConfigError("visibility_miss_rate must lie in [0, 1]")
        lo, hi = self.fall_interval_len_s
        if not (0 < lo <= hi):
            raise ConfigError("fall_interval_len_s must be a positive (low, high) range")
        if self.fall_len_mean_s <= 0 or self.adl_len_mean_s <= 0 or self.fps <= 0:
            raise ConfigError("durations and fps must be positive")


def _uniform_seconds(stream: Stream, lo: Fraction, hi: Fraction) -> Fraction:
    """Millisecond-quantized uniform draw in [lo, hi]."""
    value = quantize_ms(float(lo) + stream.uniform() * float(hi - lo))
    return min(max(value, lo), hi)


def generate_corpus(cfg: CorpusConfig) -> list[VideoRecord]:
    """Deterministic synthetic records; fall videos place the fall in the middle 60%."""
    records: list[VideoRecord] = []
    for i in range(cfg.n_fall_videos):
        video_id = f"fall_{i:04d}"
        stream = Stream(cfg.master_seed, "corpus", video_id)
        duration = _uniform_seconds(
            stream, cfg.fall_len_mean_s / 2, cfg.fall_len_mean_s * 3 / 2
        )
        fall_len = _uniform_seconds(stream, *cfg.fall_interval_len_s)
        start_lo = duration * Fraction(2, 10)
        start_hi = min(duration * Fraction(8, 10), duration - fall_len)
        if start_hi < start_lo:
            raise ConfigError(
                f"{video_id}: fall interval ({fall_len}s) does not fit the video "
                f"({duration}s); shrink fall_interval_len_s"
            )
        fall_start = _uniform_seconds(stream, start_lo, start_hi)
        fall_end = fall_start + fall_len
        lying_end = _uniform_seconds(stream, fall_end, duration)
        records.append(
            VideoRecord(
                video_id=video_id,
                scenario_id=f"scn_{i:04d}",
                camera_id="cam1",
                camera_rank=1,
                fps=cfg.fps,
                duration_s=duration,
                kind=VideoKind.FALL,
                fall_start_s=fall_start,
                fall_end_s=fall_end,
                lying_end_s=lying_end,
                fall_visible=not stream.bernoulli(cfg.visibility_miss_rate),
                lying_visible=not stream.bernoulli(cfg.visibility_miss_rate),
            )
        )
    for i in range(cfg.n_adl_videos):
        video_id = f"adl_{i:04d}"
        stream = Stream(cfg.master_seed, "corpus", video_id)
        duration = _uniform_seconds(stream, cfg.adl_len_mean_s / 2, cfg.adl_len_mean_s * 3 / 2)
        records.append(
            VideoRecord(
                video_id=video_id,
                scenario_id=f"scn_adl_{i:04d}",
                camera_id="cam1",
                camera_rank=1,
                fps=cfg.fps,
                duration_s=duration,
                kind=VideoKind.ADL,
            )
        )
    return records


@dataclass(frozen=True, slots=True)
class OracleConfig:
    """Row-stochastic confusion matrix in (fall, lying, other) order."""

    confusion: tuple[tuple[float, float, float], ...] = (
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (0.0, 0.0, 1.0),
    )
    logit_margin: float = 2.0
    per_clip: bool = False  # correlated mode: one draw shared by a clip's predictions
    master_seed: int = 0

    def __post_init__(self) -> None:
        if self.logit_margin <= 0:
            raise ConfigError("logit_margin must be positive")
        if len(self.confusion) != 3 or any(len(row) != 3 for row in self.confusion):
            raise ConfigError("confusion must be a 3x3 matrix")
        for row in self.confusion:
            if any(p < 0 for p in row):
                raise ConfigError("confusion entries must be nonnegative")
            if abs(sum(row) - 1.0) > 1e-9:
                raise ConfigError("confusion rows must sum to 1")


def _margin_logits(cls_index: int, margin: float) -> tuple[float, float, float]:
    logits = [0.0, 0.0, 0.0]
    logits[cls_index] = margin
    return tuple(logits)


def oracle_predict(
    manifest: Manifest, plans: list[SamplePlan], cfg: OracleConfig
) -> list[PredictionRecord]:
    """One prediction per (clip, sample, crop) plan, drawn from the truth's confusion row."""
    label_of: dict[str, ActionClass] = {c.clip_id: c.label for c in manifest.clips}
    class_index = {cls: i for i, cls in enumerate(CLASS_ORDER)}
    out: list[PredictionRecord] = []
    for plan in plans:
        true_label = label_of.get(plan.clip_id)
        if true_label is None:
            raise ConfigError(f"plan references unknown clip {plan.clip_id!r}")
        row = list(cfg.confusion[class_index[true_label]])
        for crop in plan.crops:
            if cfg.per_clip:
                stream = Stream(cfg.master_seed, "oracle", plan.clip_id)
            else:
                stream = Stream(
                    cfg.master_seed, "oracle", plan.clip_id, str(plan.sample_idx), str(crop.crop_idx)
                )
            drawn = stream.choose_weighted(row)
            out.append(
                PredictionRecord(
                    clip_id=plan.clip_id,
                    sample_idx=plan.sample_idx,
                    crop_idx=crop.crop_idx,
                    logits=_margin_logits(drawn, cfg.logit_margin),
                )
            )
    return out
