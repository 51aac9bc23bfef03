"""Deterministic frame-index windows and crop/flip geometry per clip.

No pixels are touched here: the plans are the contract an inference side
executes.  Each sample window picks frames_per_sample indices spaced by the
stride, clamped to the clip's last frame when the window overruns the clip.
Crops operate on frames resized to width x 224 preserving aspect ratio.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ConfigError, GeometryError, ParseError
from .labeling import LabeledClip, Split
from .rng import Stream

CROP_SIZE = 224
TEST_SAMPLES_PER_CLIP = 5
TEST_CROPS_PER_SAMPLE = 3


@dataclass(frozen=True, slots=True)
class FramePlanConfig:
    mode: Split
    stride: int
    frames_per_sample: int = 16
    samples_per_clip: int | None = None

    def __post_init__(self) -> None:
        if self.frames_per_sample < 1 or self.stride < 1:
            raise ConfigError("frames_per_sample and stride must be >= 1")
        required = TEST_SAMPLES_PER_CLIP if self.mode is Split.TEST else 1
        if self.samples_per_clip is None:
            object.__setattr__(self, "samples_per_clip", required)
        elif self.samples_per_clip != required:
            raise ConfigError(
                f"{self.mode.value} mode requires samples_per_clip={required}"
            )

    @property
    def window_frames(self) -> int:
        return self.stride * self.frames_per_sample


@dataclass(frozen=True, slots=True)
class FrameWindow:
    clip_id: str
    sample_idx: int
    frame_indices: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class CropPlan:
    clip_id: str
    sample_idx: int
    crop_idx: int
    resize_to: tuple[int, int]
    crop_rect: tuple[int, int, int, int]
    flip: bool


@dataclass(frozen=True, slots=True)
class SamplePlan:
    """Frame window plus crop geometry for one sample of one clip."""

    clip_id: str
    sample_idx: int
    frame_indices: tuple[int, ...]
    crops: tuple[CropPlan, ...]


def clip_frame_count(clip_len_s: Fraction, fps: Fraction) -> int:
    return round(clip_len_s * fps)


def _window(start: int, cfg: FramePlanConfig, last_frame: int) -> tuple[int, ...]:
    return tuple(min(start + k * cfg.stride, last_frame) for k in range(cfg.frames_per_sample))


def plan_frames(
    clip: LabeledClip, fps: Fraction, cfg: FramePlanConfig, master_seed: int
) -> list[FrameWindow]:
    """Window starts: train uniform-random, val centred, test evenly spaced."""
    m = clip_frame_count(clip.end_s - clip.start_s, fps)
    if m < 1:
        raise GeometryError(f"clip {clip.clip_id} has no frames (M={m})")
    max_start = max(0, m - cfg.window_frames)
    if cfg.mode is Split.TRAIN:
        stream = Stream(master_seed, "frames", clip.clip_id, "0")
        starts = [stream.below(max_start + 1)]
    elif cfg.mode is Split.VAL:
        starts = [max_start // 2]
    else:
        c = cfg.samples_per_clip
        starts = [round(Fraction(j * max_start, c - 1)) for j in range(c)] if c > 1 else [0]
    return [
        FrameWindow(clip.clip_id, idx, _window(start, cfg, m - 1))
        for idx, start in enumerate(starts)
    ]


def resized_width(orig_w: int, orig_h: int) -> int:
    """Width after aspect-preserving resize to height 224."""
    if orig_w < 1 or orig_h < 1:
        raise GeometryError(f"bad source dimensions {orig_w}x{orig_h}")
    return round(Fraction(orig_w * CROP_SIZE, orig_h))


def plan_crops(
    clip_id: str,
    sample_idx: int,
    orig_dims: tuple[int, int],
    mode: Split,
    master_seed: int,
) -> list[CropPlan]:
    """Test: left/centre/right three-crop; val: centre; train: seeded random + flip."""
    width = resized_width(*orig_dims)
    if width < CROP_SIZE:
        raise GeometryError(
            f"resized width {width} narrower than crop size {CROP_SIZE} "
            f"for source {orig_dims[0]}x{orig_dims[1]}"
        )
    span = width - CROP_SIZE
    if mode is Split.TEST:
        xs = [0, span // 2, span]
        flips = [False] * 3
    elif mode is Split.VAL:
        xs = [span // 2]
        flips = [False]
    else:
        stream = Stream(master_seed, "crops", clip_id, str(sample_idx))
        xs = [stream.below(span + 1)]
        flips = [stream.bernoulli(0.5)]
    return [
        CropPlan(
            clip_id=clip_id,
            sample_idx=sample_idx,
            crop_idx=i,
            resize_to=(width, CROP_SIZE),
            crop_rect=(x, 0, CROP_SIZE, CROP_SIZE),
            flip=flip,
        )
        for i, (x, flip) in enumerate(zip(xs, flips))
    ]


def plan_clip(
    clip: LabeledClip,
    fps: Fraction,
    stride: int,
    orig_dims: tuple[int, int],
    master_seed: int,
    frames_per_sample: int = 16,
) -> list[SamplePlan]:
    """All sample plans for one clip; mode follows the clip's split."""
    cfg = FramePlanConfig(mode=clip.split, stride=stride, frames_per_sample=frames_per_sample)
    plans = []
    for window in plan_frames(clip, fps, cfg, master_seed):
        crops = plan_crops(clip.clip_id, window.sample_idx, orig_dims, clip.split, master_seed)
        plans.append(
            SamplePlan(clip.clip_id, window.sample_idx, window.frame_indices, tuple(crops))
        )
    return plans


def normalization_moments(
    pixel_stream: Iterable[Sequence[float]],
) -> list[tuple[float, float]]:
    """Single-pass per-channel mean and population standard deviation (Welford)."""
    count = 0
    means: list[float] = []
    m2: list[float] = []
    for values in pixel_stream:
        if count == 0:
            means = [0.0] * len(values)
            m2 = [0.0] * len(values)
        elif len(values) != len(means):
            raise ConfigError("inconsistent channel arity in pixel stream")
        count += 1
        for ch, v in enumerate(values):
            delta = v - means[ch]
            means[ch] += delta / count
            m2[ch] += delta * (v - means[ch])
    if count == 0:
        raise ConfigError("empty pixel stream")
    return [(means[ch], math.sqrt(m2[ch] / count)) for ch in range(len(means))]


def write_frameplans(plans: Iterable[SamplePlan], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for plan in plans:
            row = {
                "clip_id": plan.clip_id,
                "sample_idx": plan.sample_idx,
                "frame_indices": list(plan.frame_indices),
                "crops": [
                    {
                        "crop_idx": c.crop_idx,
                        "x": c.crop_rect[0],
                        "y": c.crop_rect[1],
                        "w": c.crop_rect[2],
                        "h": c.crop_rect[3],
                        "flip": c.flip,
                        "resize_w": c.resize_to[0],
                        "resize_h": c.resize_to[1],
                    }
                    for c in plan.crops
                ],
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_frameplans(path: str) -> list[SamplePlan]:
    plans = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                crops = tuple(
                    CropPlan(
                        clip_id=obj["clip_id"],
                        sample_idx=obj["sample_idx"],
                        crop_idx=c["crop_idx"],
                        resize_to=(c["resize_w"], c["resize_h"]),
                        crop_rect=(c["x"], c["y"], c["w"], c["h"]),
                        flip=c["flip"],
                    )
                    for c in obj["crops"]
                )
                plans.append(
                    SamplePlan(
                        clip_id=obj["clip_id"],
                        sample_idx=obj["sample_idx"],
                        frame_indices=tuple(obj["frame_indices"]),
                        crops=crops,
                    )
                )
            except (KeyError, json.JSONDecodeError) as exc:
                raise ParseError(f"bad frame-plan line: {exc}", line=lineno, offset=0) from exc
    return plans
