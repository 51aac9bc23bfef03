"""Priority labeling of clips over class timelines, plus the label-quality bound."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .annotations import ActionClass, Timeline
from .errors import ConfigError, GeometryError
from .sampling import ClipSpec, SamplerKind


class Split(enum.Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


@dataclass(frozen=True, slots=True)
class LabelPolicy:
    """Minimum overlap fraction a class needs before it can claim a clip.

    Zero (the default) means any positive overlap counts, so a clip touching
    the fall for a single instant is still labeled Fall.
    """

    min_overlap_fall: Fraction = Fraction(0)
    min_overlap_lying: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name, frac in (("fall", self.min_overlap_fall), ("lying", self.min_overlap_lying)):
            if not (0 <= frac <= 1):
                raise ConfigError(f"min_overlap[{name}] must lie in [0, 1]")

    def threshold(self, cls: ActionClass) -> Fraction:
        return self.min_overlap_fall if cls is ActionClass.FALL else self.min_overlap_lying


@dataclass(frozen=True, slots=True)
class LabeledClip:
    clip_id: str
    video_id: str
    start_s: Fraction
    end_s: Fraction
    sampler: SamplerKind
    label: ActionClass
    split: Split


def overlap_fractions(
    clip_start: Fraction, clip_end: Fraction, tl: Timeline
) -> dict[ActionClass, Fraction]:
    """Fraction of the clip overlapping each class, under half-open segments."""
    if clip_start < 0 or clip_end > tl.total_s:
        raise GeometryError(
            f"clip ({clip_start}, {clip_end}) outside timeline [0, {tl.total_s}] "
            f"of {tl.video_id}"
        )
    duration = clip_end - clip_start
    out = {cls: Fraction(0) for cls in ActionClass}
    for seg in tl.segments:
        lo = max(clip_start, seg.start_s)
        hi = min(clip_end, seg.end_s)
        if hi > lo:
            out[seg.cls] += (hi - lo) / duration
    return out


def label_clip(clip: ClipSpec, tl: Timeline, policy: LabelPolicy) -> ActionClass:
    """Highest-priority class whose overlap exceeds its threshold."""
    fractions = overlap_fractions(clip.start_s, clip.end_s, tl)
    if fractions[ActionClass.FALL] > policy.min_overlap_fall:
        return ActionClass.FALL
    if fractions[ActionClass.LYING] > policy.min_overlap_lying:
        return ActionClass.LYING
    return ActionClass.OTHER


def label_quality(
    clip_len_s: Fraction,
    fps: Fraction,
    tau: int,
    frames_per_sample: int = 16,
) -> Fraction:
    """Worst-case chance a sampled frame window sees the fall inside a fall clip.

    The window spans tau * frames_per_sample of the clip_len_s * fps frames a
    clip contains; the ratio is capped at 1 (the final 5 s / stride-8 setup
    saturates it).
    """
    if clip_len_s <= 0 or fps <= 0 or tau <= 0 or frames_per_sample <= 0:
        raise ConfigError("label_quality requires positive inputs")
    window = Fraction(tau * frames_per_sample)
    total = clip_len_s * fps
    return min(Fraction(1), window / total)
