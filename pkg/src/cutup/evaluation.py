"""Score aggregation and clip/video-level fall-detection metrics."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .annotations import ActionClass, VideoKind
from .dataset import Manifest
from .errors import CoverageError, ParseError, ValidationError
from .labeling import Split

log = logging.getLogger("cutup")

# Column order of logit vectors and of confusion-matrix axes.
CLASS_ORDER = (ActionClass.FALL, ActionClass.LYING, ActionClass.OTHER)


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    clip_id: str
    sample_idx: int
    crop_idx: int
    logits: tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.logits) != len(CLASS_ORDER):
            raise ValidationError(f"{self.clip_id}: expected {len(CLASS_ORDER)} logits")
        if not all(math.isfinite(x) for x in self.logits):
            raise ValidationError(f"{self.clip_id}: non-finite logit")


@dataclass(frozen=True, slots=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


def _softmax(logits: Sequence[float]) -> list[float]:
    peak = max(logits)
    exps = [math.exp(x - peak) for x in logits]
    total = sum(exps)
    return [e / total for e in exps]


def aggregate_clip(preds: Sequence[PredictionRecord], softmax: bool = False) -> ActionClass:
    """Elementwise mean of the clip's score vectors, argmax with Fall-first ties."""
    if not preds:
        raise CoverageError("no predictions for clip", [])
    sums = [0.0, 0.0, 0.0]
    for rec in preds:
        scores = _softmax(rec.logits) if softmax else rec.logits
        for i, s in enumerate(scores):
            sums[i] += s
    mean = [s / len(preds) for s in sums]
    best = max(range(len(mean)), key=lambda i: (mean[i], -i))
    return CLASS_ORDER[best]


def _rate(num: int, den: int, flag: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def clip_metrics(
    truth: Mapping[str, ActionClass],
    preds: Mapping[str, ActionClass],
) -> tuple[dict[ActionClass, ClassMetrics], dict[str, float], list[list[int]], list[str]]:
    """One-vs-rest metrics per class, unweighted macro average, confusion matrix."""
    if set(truth) != set(preds):
        missing = sorted(set(truth) - set(preds))
        extra = sorted(set(preds) - set(truth))
        raise CoverageError("truth/prediction clip_id mismatch", missing + extra)

    index = {cls: i for i, cls in enumerate(CLASS_ORDER)}
    confusion = [[0] * len(CLASS_ORDER) for _ in CLASS_ORDER]
    for clip_id, true_cls in truth.items():
        confusion[index[true_cls]][index[preds[clip_id]]] += 1

    flags: list[str] = []
    per_class: dict[ActionClass, ClassMetrics] = {}
    for cls in CLASS_ORDER:
        i = index[cls]
        tp = confusion[i][i]
        fp = sum(confusion[r][i] for r in range(3) if r != i)
        fn = sum(confusion[i][c] for c in range(3) if c != i)
        precision = _rate(tp, tp + fp, f"clip precision[{cls.value}]", flags)
        recall = _rate(tp, tp + fn, f"clip recall[{cls.value}]", flags)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        per_class[cls] = ClassMetrics(precision, recall, f1, support=tp + fn)
    macro = {
        "precision": sum(m.precision for m in per_class.values()) / len(per_class),
        "recall": sum(m.recall for m in per_class.values()) / len(per_class),
        "f1": sum(m.f1 for m in per_class.values()) / len(per_class),
    }
    return per_class, macro, confusion, flags


class VideoLabel:
    FALL_VIDEO = "fall_video"
    ADL = "adl"


def video_aggregate(clips_by_video: Mapping[str, Sequence[ActionClass]]) -> dict[str, str]:
    """A video is a fall video iff any of its clips is predicted Fall."""
    out = {}
    for video_id, labels in clips_by_video.items():
        if not labels:
            log.warning("video %s has no predicted clips; marking ADL", video_id)
        out[video_id] = (
            VideoLabel.FALL_VIDEO
            if any(lbl is ActionClass.FALL for lbl in labels)
            else VideoLabel.ADL
        )
    return out


@dataclass(frozen=True, slots=True)
class VideoMetrics:
    precision: float
    sensitivity: float
    specificity: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


def video_metrics(
    truth: Mapping[str, VideoKind], preds: Mapping[str, str]
) -> tuple[VideoMetrics, list[str]]:
    """Binary fall-detection rates with fall videos as the positive class."""
    if set(truth) != set(preds):
        mismatch = sorted(set(truth) ^ set(preds))
        raise CoverageError("truth/prediction video_id mismatch", mismatch)
    tp = fp = fn = tn = 0
    for video_id, kind in truth.items():
        positive = preds[video_id] == VideoLabel.FALL_VIDEO
        if kind is VideoKind.FALL:
            tp, fn = (tp + 1, fn) if positive else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if positive else (fp, tn + 1)
    flags: list[str] = []
    precision = _rate(tp, tp + fp, "video precision", flags)
    sensitivity = _rate(tp, tp + fn, "video sensitivity", flags)
    specificity = _rate(tn, tn + fp, "video specificity", flags)
    f1 = (
        0.0
        if precision + sensitivity == 0
        else 2 * precision * sensitivity / (precision + sensitivity)
    )
    return VideoMetrics(precision, sensitivity, specificity, f1, tp, fp, fn, tn), flags


def score_predictions(
    manifest: Manifest,
    video_kinds: Mapping[str, VideoKind],
    predictions: Sequence[PredictionRecord],
    split: Split = Split.TEST,
    softmax: bool = False,
) -> dict:
    """Full scoring pass over one split; returns the report structure.

    Every manifested clip of the split needs at least one prediction and every
    prediction must reference a manifested clip; predictions for clips in other
    splits are out of scope and ignored.
    """
    eval_clips = manifest.by_split(split)
    truth = {c.clip_id: c.label for c in eval_clips}
    all_ids = {c.clip_id for c in manifest.clips}

    by_clip: dict[str, list[PredictionRecord]] = {}
    unknown = sorted({p.clip_id for p in predictions} - all_ids)
    if unknown:
        raise CoverageError("predictions reference clips absent from manifest", unknown)
    for pred in predictions:
        if pred.clip_id in truth:
            by_clip.setdefault(pred.clip_id, []).append(pred)
    missing = sorted(set(truth) - set(by_clip))
    if missing:
        raise CoverageError("manifested clips without predictions", missing)

    clip_preds = {cid: aggregate_clip(recs, softmax=softmax) for cid, recs in by_clip.items()}
    per_class, macro, confusion, flags = clip_metrics(truth, clip_preds)

    video_of = {c.clip_id: c.video_id for c in eval_clips}
    grouped: dict[str, list[ActionClass]] = {}
    for cid, cls in clip_preds.items():
        grouped.setdefault(video_of[cid], []).append(cls)
    unknown_videos = sorted(set(grouped) - set(video_kinds))
    if unknown_videos:
        raise ValidationError(
            f"manifest references video(s) absent from annotations: {', '.join(unknown_videos)}"
        )
    video_truth = {vid: video_kinds[vid] for vid in grouped}
    video_preds = video_aggregate(grouped)
    vm, video_flags = video_metrics(video_truth, video_preds)

    multiplicity: dict[str, int] = {}
    for recs in by_clip.values():
        key = str(len(recs))
        multiplicity[key] = multiplicity.get(key, 0) + 1

    return {
        "split": split.value,
        "clip_level": {
            "per_class": {
                cls.value: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for cls, m in per_class.items()
            },
            "macro": macro,
            "confusion": confusion,
            "evaluated_clips": len(truth),
        },
        "video_level": {
            "precision": vm.precision,
            "sensitivity": vm.sensitivity,
            "specificity": vm.specificity,
            "f1": vm.f1,
            "confusion": {"tp": vm.tp, "fp": vm.fp, "fn": vm.fn, "tn": vm.tn},
            "videos": len(video_truth),
        },
        "prediction_multiplicity": multiplicity,
        "zero_division_flags": flags + video_flags,
        "provenance": dict(manifest.provenance),
    }


def write_predictions(predictions: Iterable[PredictionRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in predictions:
            row = {
                "clip_id": p.clip_id,
                "sample_idx": p.sample_idx,
                "crop_idx": p.crop_idx,
                "logits": list(p.logits),
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_predictions(path: str) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    seen: set[tuple[str, int, int]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rec = PredictionRecord(
                    clip_id=obj["clip_id"],
                    sample_idx=int(obj["sample_idx"]),
                    crop_idx=int(obj["crop_idx"]),
                    logits=tuple(float(x) for x in obj["logits"]),
                )
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ParseError(f"bad prediction line: {exc}", line=lineno, offset=0) from exc
            key = (rec.clip_id, rec.sample_idx, rec.crop_idx)
            if key in seen:
                raise ValidationError(f"duplicate prediction for {key}")
            seen.add(key)
            records.append(rec)
    return records


def render_table(report: dict) -> str:
    """Human-readable clip- and video-level tables for one report."""
    lines = [f"Clip-level metrics (split={report['split']})", ""]
    header = f"{'Class':<8}{'Precision':>11}{'Recall':>9}{'F1-Score':>10}{'Support':>9}"
    lines.append(header)
    lines.append("-" * len(header))
    per_class = report["clip_level"]["per_class"]
    for name in ("fall", "lying", "other"):
        m = per_class[name]
        lines.append(
            f"{name.capitalize():<8}{m['precision']:>11.2f}{m['recall']:>9.2f}"
            f"{m['f1']:>10.2f}{m['support']:>9d}"
        )
    macro = report["clip_level"]["macro"]
    lines.append(
        f"{'Avg':<8}{macro['precision']:>11.2f}{macro['recall']:>9.2f}"
        f"{macro['f1']:>10.2f}{report['clip_level']['evaluated_clips']:>9d}"
    )
    lines.append("")
    lines.append("Video-level fall detection")
    lines.append("")
    vheader = f"{'Prec':>8}{'Recall/Sens':>13}{'Spec':>8}{'F1':>8}"
    lines.append(vheader)
    lines.append("-" * len(vheader))
    v = report["video_level"]
    lines.append(
        f"{v['precision']:>8.2f}{v['sensitivity']:>13.2f}{v['specificity']:>8.2f}{v['f1']:>8.2f}"
    )
    lines.append("")
    lines.append(f"Videos evaluated: {v['videos']}")
    conf = v["confusion"]
    lines.append(
        f"Video confusion: TP={conf['tp']} FP={conf['fp']} FN={conf['fn']} TN={conf['tn']}"
    )
    if report["zero_division_flags"]:
        lines.append("Zero-denominator rates reported as 0: " + ", ".join(report["zero_division_flags"]))
    prov = report.get("provenance", {})
    if prov:
        lines.append("")
        lines.append("Provenance:")
        for key in sorted(prov):
            lines.append(f"  {key}: {prov[key]}")
    return "\n".join(lines) + "\n"
