"""Readers and writers for the toolkit's wire formats.

Deliberately self-contained: the adapter talks to the dataset toolkit only
through its documented JSONL files, so these parsers implement the formats
directly instead of importing the toolkit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable


class FormatError(Exception):
    """Input file violates the documented wire format."""


@dataclass(frozen=True, slots=True)
class ClipRow:
    """One manifest line (header provenance line excluded)."""

    clip_id: str
    video_id: str
    split: str
    start_s: str
    end_s: str
    sampler: str
    label: str


@dataclass(frozen=True, slots=True)
class CropRow:
    crop_idx: int
    x: int
    y: int
    w: int
    h: int
    flip: bool
    resize_w: int
    resize_h: int


@dataclass(frozen=True, slots=True)
class PlanRow:
    """One frame-plan line: a sample window plus its crop geometries."""

    clip_id: str
    sample_idx: int
    frame_indices: tuple[int, ...]
    crops: tuple[CropRow, ...]


def _lines(path: str):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if line:
                yield lineno, line


def read_manifest(path: str) -> list[ClipRow]:
    rows: list[ClipRow] = []
    for lineno, line in _lines(path):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}:{lineno}: not JSON: {exc.msg}") from exc
        if lineno == 1 and "provenance" in obj:
            continue
        try:
            rows.append(
                ClipRow(
                    clip_id=obj["clip_id"],
                    video_id=obj["video_id"],
                    split=obj["split"],
                    start_s=obj["start_s"],
                    end_s=obj["end_s"],
                    sampler=obj["sampler"],
                    label=obj["label"],
                )
            )
        except KeyError as exc:
            raise FormatError(f"{path}:{lineno}: missing manifest field {exc}") from exc
    return rows


def read_frameplans(path: str) -> list[PlanRow]:
    rows: list[PlanRow] = []
    for lineno, line in _lines(path):
        try:
            obj = json.loads(line)
            crops = tuple(
                CropRow(
                    crop_idx=c["crop_idx"],
                    x=c["x"],
                    y=c["y"],
                    w=c["w"],
                    h=c["h"],
                    flip=c["flip"],
                    resize_w=c["resize_w"],
                    resize_h=c["resize_h"],
                )
                for c in obj["crops"]
            )
            rows.append(
                PlanRow(
                    clip_id=obj["clip_id"],
                    sample_idx=obj["sample_idx"],
                    frame_indices=tuple(obj["frame_indices"]),
                    crops=crops,
                )
            )
        except (KeyError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}:{lineno}: bad frame-plan line: {exc}") from exc
    return rows


def prediction_row(clip_id: str, sample_idx: int, crop_idx: int, logits) -> dict:
    """Validate one output row against the prediction schema."""
    values = [float(x) for x in logits]
    if len(values) != 3 or not all(math.isfinite(v) for v in values):
        raise FormatError(
            f"classifier returned invalid logits for {clip_id}: {logits!r}"
        )
    return {
        "clip_id": clip_id,
        "sample_idx": int(sample_idx),
        "crop_idx": int(crop_idx),
        "logits": values,
    }


def write_predictions(rows: Iterable[dict], path: str, batch_size: int = 256) -> int:
    """Stream rows to JSONL in order; returns the row count."""
    count = 0
    buffer: list[str] = []
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            buffer.append(json.dumps(row, sort_keys=True))
            count += 1
            if len(buffer) >= batch_size:
                fh.write("\n".join(buffer) + "\n")
                buffer.clear()
        if buffer:
            fh.write("\n".join(buffer) + "\n")
    return count
