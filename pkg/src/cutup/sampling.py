"""Clip sampling: sliding-window (cutup) and fall-centred Gaussian strategies.

Gaussian sampling draws n = ceil(T / clip_len) clip midpoints from
Normal(fall_midpoint, sigma) with sigma = min(fall_midpoint, T - fall_midpoint) / 3,
floored at min_sigma_s.  Midpoints are quantized to milliseconds and clamped
into [clip_len/2, T - clip_len/2] so every clip stays inside the video; the
raw pre-clamp draw is kept on the ClipSpec for distribution checks.
Videos without a fall interval fall back to the configured cutup sampler.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .annotations import VideoKind, VideoRecord
from .errors import ConfigError, UnsampleableVideoError
from .rational import quantize_ms
from .rng import Stream


class SamplerKind(enum.Enum):
    CUTUP = "cutup"
    GAUSSIAN = "gaussian"
    FALLBACK = "fallback"


@dataclass(frozen=True, slots=True)
class CutupConfig:
    clip_len_s: Fraction
    stride_s: Fraction

    def __post_init__(self) -> None:
        if self.clip_len_s <= 0:
            raise ConfigError("clip_len_s must be positive")
        if not (0 < self.stride_s <= self.clip_len_s):
            raise ConfigError("stride must satisfy 0 < stride_s <= clip_len_s")

    @property
    def overlap_s(self) -> Fraction:
        return self.clip_len_s - self.stride_s


@dataclass(frozen=True, slots=True)
class GaussianConfig:
    clip_len_s: Fraction
    fallback: CutupConfig
    min_sigma_s: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.clip_len_s <= 0:
            raise ConfigError("clip_len_s must be positive")
        if self.min_sigma_s <= 0:
            raise ConfigError("min_sigma_s must be positive")


@dataclass(frozen=True, slots=True)
class ClipSpec:
    """One sampled clip; times are exact rational seconds."""

    clip_id: str
    video_id: str
    start_s: Fraction
    end_s: Fraction
    sampler: SamplerKind
    seed_index: int | None = None
    seed_raw_s: float | None = None  # pre-clamp Gaussian draw, not serialized

    @property
    def duration_s(self) -> Fraction:
        return self.end_s - self.start_s


def _clip_id(video_id: str, sampler: SamplerKind, ordinal: int) -> str:
    return f"{video_id}:{sampler.value}:{ordinal}"


def cutup_sample(
    rec: VideoRecord, cfg: CutupConfig, sampler: SamplerKind = SamplerKind.CUTUP
) -> list[ClipSpec]:
    """Tile [0, duration] with fixed-length clips; a short tail is dropped."""
    if rec.duration_s < cfg.clip_len_s:
        raise UnsampleableVideoError([rec.video_id], cfg.clip_len_s)
    count = (rec.duration_s - cfg.clip_len_s) // cfg.stride_s + 1
    clips = []
    for k in range(int(count)):
        start = k * cfg.stride_s
        clips.append(
            ClipSpec(
                clip_id=_clip_id(rec.video_id, sampler, k),
                video_id=rec.video_id,
                start_s=start,
                end_s=start + cfg.clip_len_s,
                sampler=sampler,
            )
        )
    return clips


def gaussian_sigma_s(rec: VideoRecord) -> Fraction:
    """One third of the distance from the fall midpoint to the nearer video edge."""
    mid = rec.fall_midpoint_s
    return min(mid, rec.duration_s - mid) / 3


def gaussian_clip_count(duration_s: Fraction, clip_len_s: Fraction) -> int:
    return math.ceil(duration_s / clip_len_s)


def gaussian_sample(
    rec: VideoRecord, cfg: GaussianConfig, master_seed: int
) -> list[ClipSpec]:
    """Sample clips whose midpoints cluster around the fall interval.

    Deterministic per (master_seed, video_id): the substream key is
    derive_key(master_seed, "sample", video_id).  ADL videos use the fallback
    cutup sampler and are tagged Fallback.
    """
    if rec.kind is not VideoKind.FALL:
        return cutup_sample(rec, cfg.fallback, sampler=SamplerKind.FALLBACK)
    if rec.duration_s < cfg.clip_len_s:
        raise UnsampleableVideoError([rec.video_id], cfg.clip_len_s)

    n = gaussian_clip_count(rec.duration_s, cfg.clip_len_s)
    mid = rec.fall_midpoint_s
    sigma = max(gaussian_sigma_s(rec), cfg.min_sigma_s)
    half = cfg.clip_len_s / 2
    lo, hi = half, rec.duration_s - half

    stream = Stream(master_seed, "sample", rec.video_id)
    clips = []
    for i in range(n):
        raw = stream.normal(float(mid), float(sigma))
        t = min(max(quantize_ms(raw), lo), hi)
        clips.append(
            ClipSpec(
                clip_id=_clip_id(rec.video_id, SamplerKind.GAUSSIAN, i),
                video_id=rec.video_id,
                start_s=t - half,
                end_s=t + half,
                sampler=SamplerKind.GAUSSIAN,
                seed_index=i,
                seed_raw_s=raw,
            )
        )
    return clips
