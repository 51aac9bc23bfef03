"""Annotation schema for timestamped untrimmed videos and per-video class timelines.

The annotation file is a JSON array of objects, one per video, with times as
decimal-string seconds:

    {
      "video_id": "fall_0001", "scenario_id": "s001", "camera_id": "cam1",
      "camera_rank": 1, "fps": "25", "duration_s": "165", "kind": "fall",
      "fall_start_s": "60", "fall_end_s": "63", "lying_end_s": "120",
      "fall_visible": true, "lying_visible": true
    }

ADL videos omit the three timestamps.  Unknown fields are rejected.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, ValidationError
from .rational import format_seconds, parse_seconds


class VideoKind(enum.Enum):
    FALL = "fall"
    ADL = "adl"


class ActionClass(enum.Enum):
    """Clip/segment classes, in priority order."""

    FALL = "fall"
    LYING = "lying"
    OTHER = "other"


# Minimum frames one sample window needs; a video must supply at least this many.
MIN_FRAMES = 16

_FIELDS = {
    "video_id",
    "scenario_id",
    "camera_id",
    "camera_rank",
    "fps",
    "duration_s",
    "kind",
    "fall_start_s",
    "fall_end_s",
    "lying_end_s",
    "fall_visible",
    "lying_visible",
}
_TIMESTAMP_FIELDS = ("fall_start_s", "fall_end_s", "lying_end_s")


@dataclass(frozen=True, slots=True)
class VideoRecord:
    """Metadata for one untrimmed video."""

    video_id: str
    scenario_id: str
    camera_id: str
    camera_rank: int
    fps: Fraction
    duration_s: Fraction
    kind: VideoKind
    fall_start_s: Fraction | None = None
    fall_end_s: Fraction | None = None
    lying_end_s: Fraction | None = None
    fall_visible: bool = True
    lying_visible: bool = True

    def __post_init__(self) -> None:
        vid = self.video_id
        if not vid:
            raise ValidationError("video_id must be nonempty")
        if self.camera_rank < 1:
            raise ValidationError(f"{vid}: camera_rank must be >= 1")
        if self.fps <= 0:
            raise ValidationError(f"{vid}: fps must be positive")
        if self.duration_s <= 0:
            raise ValidationError(f"{vid}: duration_s must be positive")
        if self.fps * self.duration_s < MIN_FRAMES:
            raise ValidationError(
                f"{vid}: video supplies fewer than {MIN_FRAMES} frames"
            )
        if self.kind is VideoKind.FALL:
            if self.fall_start_s is None or self.fall_end_s is None or self.lying_end_s is None:
                raise ValidationError(f"{vid}: fall videos require all three timestamps")
            if not (
                0 <= self.fall_start_s
                < self.fall_end_s
                <= self.lying_end_s
                <= self.duration_s
            ):
                raise ValidationError(
                    f"{vid}: timestamps must satisfy "
                    "0 <= fall_start_s < fall_end_s <= lying_end_s <= duration_s"
                )
        else:
            for name in _TIMESTAMP_FIELDS:
                if getattr(self, name) is not None:
                    raise ValidationError(f"{vid}: ADL videos must not carry {name}")
            if not (self.fall_visible and self.lying_visible):
                raise ValidationError(f"{vid}: ADL videos carry both visibility flags true")

    @property
    def fall_midpoint_s(self) -> Fraction:
        """Midpoint of the fall interval (defined for fall videos only)."""
        if self.fall_start_s is None or self.fall_end_s is None:
            raise ValidationError(f"{self.video_id}: no fall interval")
        return (self.fall_start_s + self.fall_end_s) / 2


@dataclass(frozen=True, slots=True)
class Segment:
    start_s: Fraction
    end_s: Fraction
    cls: ActionClass


@dataclass(frozen=True, slots=True)
class Timeline:
    """Per-video partition of [0, total_s] into class segments.

    Segments are half-open [start, end) for overlap purposes, with the final
    segment closed at total_s; adjacent segments always differ in class.
    """

    video_id: str
    segments: tuple[Segment, ...]
    total_s: Fraction

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValidationError(f"{self.video_id}: timeline has no segments")
        if self.segments[0].start_s != 0 or self.segments[-1].end_s != self.total_s:
            raise ValidationError(f"{self.video_id}: segments do not span [0, total_s]")
        for prev, cur in zip(self.segments, self.segments[1:]):
            if prev.end_s != cur.start_s:
                raise ValidationError(f"{self.video_id}: segments are not contiguous")
            if prev.cls is cur.cls:
                raise ValidationError(f"{self.video_id}: adjacent segments share a class")
        for seg in self.segments:
            if seg.start_s >= seg.end_s:
                raise ValidationError(f"{self.video_id}: empty or inverted segment")


def build_timeline(rec: VideoRecord) -> Timeline:
    """Expand a record into class segments, gating invisible actions to Other.

    The fall interval [fall_start_s, fall_end_s] maps to Fall only while
    fall_visible; the lying interval (fall_end_s, lying_end_s] maps to Lying
    only while lying_visible.  Invisible intervals become Other.
    """
    marks: list[tuple[Fraction, Fraction, ActionClass]] = []
    if rec.kind is VideoKind.FALL:
        assert rec.fall_start_s is not None and rec.fall_end_s is not None
        assert rec.lying_end_s is not None
        if rec.fall_visible:
            marks.append((rec.fall_start_s, rec.fall_end_s, ActionClass.FALL))
        if rec.lying_visible and rec.lying_end_s > rec.fall_end_s:
            marks.append((rec.fall_end_s, rec.lying_end_s, ActionClass.LYING))

    segments: list[Segment] = []
    cursor = Fraction(0)
    for start, end, cls in marks:
        if start > cursor:
            segments.append(Segment(cursor, start, ActionClass.OTHER))
        segments.append(Segment(start, end, cls))
        cursor = end
    if cursor < rec.duration_s:
        segments.append(Segment(cursor, rec.duration_s, ActionClass.OTHER))

    # Gating can leave equal-class neighbours; merge them.
    merged: list[Segment] = []
    for seg in segments:
        if merged and merged[-1].cls is seg.cls:
            merged[-1] = Segment(merged[-1].start_s, seg.end_s, seg.cls)
        else:
            merged.append(seg)
    return Timeline(rec.video_id, tuple(merged), rec.duration_s)


def _record_from_obj(obj: dict, index: int) -> VideoRecord:
    if not isinstance(obj, dict):
        raise ParseError(f"annotation entry {index} is not an object")
    unknown = set(obj) - _FIELDS
    if unknown:
        raise ValidationError(
            f"annotation entry {index}: unknown field(s) {sorted(unknown)}"
        )
    missing = _FIELDS - set(obj) - set(_TIMESTAMP_FIELDS)
    if missing:
        raise ValidationError(
            f"annotation entry {index}: missing field(s) {sorted(missing)}"
        )
    try:
        kind = VideoKind(obj["kind"])
    except ValueError:
        raise ValidationError(f"annotation entry {index}: bad kind {obj['kind']!r}") from None

    def opt_time(name: str) -> Fraction | None:
        if name not in obj or obj[name] is None:
            return None
        return parse_seconds(obj[name], name)

    return VideoRecord(
        video_id=str(obj["video_id"]),
        scenario_id=str(obj["scenario_id"]),
        camera_id=str(obj["camera_id"]),
        camera_rank=int(obj["camera_rank"]),
        fps=parse_seconds(obj["fps"], "fps"),
        duration_s=parse_seconds(obj["duration_s"], "duration_s"),
        kind=kind,
        fall_start_s=opt_time("fall_start_s"),
        fall_end_s=opt_time("fall_end_s"),
        lying_end_s=opt_time("lying_end_s"),
        fall_visible=bool(obj["fall_visible"]),
        lying_visible=bool(obj["lying_visible"]),
    )


def parse_annotations(data: bytes | str) -> list[VideoRecord]:
    """Parse an annotation file into validated records, preserving file order."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed annotation JSON: {exc.msg}", line=exc.lineno, offset=exc.colno) from exc
    if not isinstance(raw, list):
        raise ParseError("annotation file must be a JSON array")
    records = [_record_from_obj(obj, i) for i, obj in enumerate(raw)]
    seen: set[str] = set()
    for rec in records:
        if rec.video_id in seen:
            raise ValidationError(f"duplicate video_id {rec.video_id!r}")
        seen.add(rec.video_id)
    return records


def serialize_annotations(records: list[VideoRecord]) -> bytes:
    """Inverse of parse_annotations on valid record lists."""
    rows = []
    for rec in records:
        row: dict = {
            "video_id": rec.video_id,
            "scenario_id": rec.scenario_id,
            "camera_id": rec.camera_id,
            "camera_rank": rec.camera_rank,
            "fps": format_seconds(rec.fps),
            "duration_s": format_seconds(rec.duration_s),
            "kind": rec.kind.value,
            "fall_visible": rec.fall_visible,
            "lying_visible": rec.lying_visible,
        }
        if rec.kind is VideoKind.FALL:
            row["fall_start_s"] = format_seconds(rec.fall_start_s)
            row["fall_end_s"] = format_seconds(rec.fall_end_s)
            row["lying_end_s"] = format_seconds(rec.lying_end_s)
        rows.append(row)
    return (json.dumps(rows, indent=2) + "\n").encode("utf-8")
