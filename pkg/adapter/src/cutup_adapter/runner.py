"""Inference driver: manifest + frame plans -> prediction JSONL.

The adapter never reorders, filters, or aggregates scores; it emits exactly
one prediction row per (clip, sample, crop) plan entry, in plan order, and
leaves all aggregation to the scoring side.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from .classifiers import load_classifier
from .formats import FormatError, prediction_row, read_frameplans, read_manifest, write_predictions

log = logging.getLogger("cutup_adapter")


@dataclass(frozen=True, slots=True)
class AdapterConfig:
    manifest_path: str
    frameplan_path: str
    output_path: str
    classifier_spec: str = "dummy"
    video_root: str | None = None
    batch_size: int = 256

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True, slots=True)
class InferenceResult:
    rows_written: int
    failed_clips: list[str]


def run_inference(cfg: AdapterConfig) -> InferenceResult:
    """Run the classifier over every planned (clip, sample, crop).

    A classifier exception marks the whole clip failed (its rows are dropped,
    the clip_id is reported); a malformed return value aborts the run.
    """
    for path in (cfg.manifest_path, cfg.frameplan_path):
        if not os.path.exists(path):
            raise FileNotFoundError(f"input file not found: {path}")
    clips = {row.clip_id: row for row in read_manifest(cfg.manifest_path)}
    plans = read_frameplans(cfg.frameplan_path)
    unknown = sorted({p.clip_id for p in plans} - set(clips))
    if unknown:
        raise FormatError(f"frame plans reference clips missing from manifest: {unknown[:5]}")

    classifier = load_classifier(cfg.classifier_spec)
    failed: dict[str, str] = {}

    def clip_payload(clip_id: str) -> dict:
        row = clips[clip_id]
        payload = {
            "clip_id": row.clip_id,
            "video_id": row.video_id,
            "split": row.split,
            "start_s": row.start_s,
            "end_s": row.end_s,
            "label": row.label,
        }
        if cfg.video_root is not None:
            payload["video_path"] = os.path.join(cfg.video_root, f"{row.video_id}.mp4")
        return payload

    # Buffer (plan-position, row) so a clip failing on a later sample emits
    # nothing at all; surviving rows keep exact plan order.
    staged: list[tuple[int, str, dict]] = []
    for position, plan in enumerate(plans):
        if plan.clip_id in failed:
            continue
        payload = clip_payload(plan.clip_id)
        for crop in plan.crops:
            crop_geom = {
                "crop_idx": crop.crop_idx,
                "x": crop.x,
                "y": crop.y,
                "w": crop.w,
                "h": crop.h,
                "flip": crop.flip,
                "resize_w": crop.resize_w,
                "resize_h": crop.resize_h,
            }
            try:
                logits = classifier(plan.frame_indices, crop_geom, payload)
            except Exception as exc:  # noqa: BLE001 - plug-in boundary
                failed[plan.clip_id] = f"{type(exc).__name__}: {exc}"
                log.warning("classifier failed on %s: %s", plan.clip_id, exc)
                break
            staged.append(
                (position, plan.clip_id, prediction_row(plan.clip_id, plan.sample_idx, crop.crop_idx, logits))
            )

    surviving = (row for _, clip_id, row in staged if clip_id not in failed)
    count = write_predictions(surviving, cfg.output_path, cfg.batch_size)
    return InferenceResult(rows_written=count, failed_clips=sorted(failed))
