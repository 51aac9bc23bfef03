"""Split assignment, undersampling, class weights, and manifest construction."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .annotations import ActionClass, VideoKind, VideoRecord, build_timeline
from .errors import ConfigError, ParseError, UnsampleableVideoError, ValidationError
from .labeling import LabeledClip, LabelPolicy, Split, label_clip
from .rational import format_seconds, parse_seconds
from .rng import Stream
from .sampling import ClipSpec, CutupConfig, GaussianConfig, SamplerKind, cutup_sample, gaussian_sample

SPLIT_ORDER = (Split.TRAIN, Split.VAL, Split.TEST)


@dataclass(frozen=True, slots=True)
class SplitConfig:
    fractions: tuple[Fraction, Fraction, Fraction] = (
        Fraction(7, 10),
        Fraction(2, 10),
        Fraction(1, 10),
    )
    master_seed: int = 0
    group_by_scenario: bool = False

    def __post_init__(self) -> None:
        if any(f < 0 for f in self.fractions):
            raise ConfigError("split fractions must be nonnegative")
        if abs(float(sum(self.fractions)) - 1.0) > 1e-9:
            raise ConfigError("split fractions must sum to 1")


@dataclass(frozen=True, slots=True)
class UndersamplePolicy:
    keep_fraction: dict[ActionClass, Fraction] = field(default_factory=dict)
    master_seed: int = 0

    def __post_init__(self) -> None:
        for cls, q in self.keep_fraction.items():
            if not (0 < q <= 1):
                raise ConfigError(f"keep_fraction[{cls.value}] must lie in (0, 1]")


@dataclass(frozen=True, slots=True)
class Manifest:
    clips: tuple[LabeledClip, ...]
    provenance: dict

    def by_split(self, split: Split) -> list[LabeledClip]:
        return [c for c in self.clips if c.split is split]


def _largest_remainder(n: int, fractions: tuple[Fraction, ...]) -> list[int]:
    quotas = [n * f for f in fractions]
    counts = [int(q) for q in quotas]  # floor; quotas are nonnegative
    leftover = n - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def stratified_split(records: list[VideoRecord], cfg: SplitConfig) -> dict[str, Split]:
    """Assign each video to a split, shuffling and allocating per kind stratum.

    Videos are sorted before shuffling so assignment does not depend on input
    order.  With group_by_scenario, all camera views of a scenario move as one
    unit (allocation then counts scenarios, not videos).
    """
    if not records:
        raise ConfigError("cannot split an empty record list")
    strata: dict[VideoKind, list[VideoRecord]] = {k: [] for k in VideoKind}
    for rec in records:
        strata[rec.kind].append(rec)

    assignment: dict[str, Split] = {}
    for kind in VideoKind:
        members = strata[kind]
        if not members:
            continue
        if cfg.group_by_scenario:
            groups: dict[str, list[str]] = {}
            for rec in members:
                groups.setdefault(rec.scenario_id, []).append(rec.video_id)
            units = [groups[s] for s in sorted(groups)]
        else:
            units = [[rec.video_id] for rec in sorted(members, key=lambda r: r.video_id)]
        stream = Stream(cfg.master_seed, "split", kind.value)
        stream.shuffle(units)
        counts = _largest_remainder(len(units), cfg.fractions)
        cursor = 0
        for split, count in zip(SPLIT_ORDER, counts):
            for unit in units[cursor : cursor + count]:
                for video_id in unit:
                    assignment[video_id] = split
            cursor += count
    return assignment


def undersample(clips: list[LabeledClip], policy: UndersamplePolicy) -> list[LabeledClip]:
    """Keep ceil(q * n) clips per configured class, chosen by seeded shuffle."""
    drop: set[str] = set()
    for cls, q in sorted(policy.keep_fraction.items(), key=lambda kv: kv[0].value):
        if q == 1:
            continue
        members = [c.clip_id for c in clips if c.label is cls]
        if not members:
            continue
        keep = math.ceil(q * len(members))
        stream = Stream(policy.master_seed, "undersample", cls.value)
        stream.shuffle(members)
        drop.update(members[keep:])
    return [c for c in clips if c.clip_id not in drop]


def class_weights(clips: list[LabeledClip]) -> dict[ActionClass, float]:
    """Inverse-frequency loss weights: total / (per-class count * class count)."""
    counts = {cls: 0 for cls in ActionClass}
    for clip in clips:
        counts[clip.label] += 1
    missing = [cls.value for cls in ActionClass if counts[cls] == 0]
    if missing:
        raise ValidationError(f"class(es) absent from clip set: {', '.join(missing)}")
    total = len(clips)
    c = len(ActionClass)
    return {cls: total / (counts[cls] * c) for cls in ActionClass}


SamplerConfig = CutupConfig | GaussianConfig


def _clip_ordinal(clip_id: str) -> int:
    return int(clip_id.rsplit(":", 1)[1])


def _manifest_sort_key(clip: LabeledClip) -> tuple:
    return (clip.video_id, clip.start_s, clip.sampler.value, _clip_ordinal(clip.clip_id))


def _sample_one(
    rec: VideoRecord,
    split: Split,
    samplers: dict[Split, SamplerConfig],
    policy: LabelPolicy,
    master_seed: int,
) -> list[LabeledClip]:
    cfg = samplers[split]
    if isinstance(cfg, GaussianConfig):
        clips: list[ClipSpec] = gaussian_sample(rec, cfg, master_seed)
    else:
        clips = cutup_sample(rec, cfg)
    tl = build_timeline(rec)
    return [
        LabeledClip(
            clip_id=c.clip_id,
            video_id=c.video_id,
            start_s=c.start_s,
            end_s=c.end_s,
            sampler=c.sampler,
            label=label_clip(c, tl, policy),
            split=split,
        )
        for c in clips
    ]


def build_manifest(
    records: list[VideoRecord],
    split_cfg: SplitConfig,
    samplers: dict[Split, SamplerConfig],
    label_policy: LabelPolicy,
    undersample_policy: UndersamplePolicy | None = None,
    *,
    master_seed: int = 0,
    config_digest: str = "",
    jobs: int = 1,
) -> Manifest:
    """Run split -> sample -> label -> undersample and return the ordered manifest.

    Gaussian sampling is refused outside the train split.  Undersampling only
    touches train clips; validation and test sets keep their natural class mix.
    """
    for split in (Split.VAL, Split.TEST):
        if isinstance(samplers.get(split), GaussianConfig):
            raise ConfigError(
                f"gaussian sampler is restricted to the train split, not {split.value}"
            )
    missing = [s.value for s in SPLIT_ORDER if s not in samplers]
    if missing:
        raise ConfigError(f"no sampler configured for split(s): {', '.join(missing)}")

    provenance = {
        "config_digest": config_digest,
        "master_seed": master_seed,
        "version": __version__,
    }
    if not records:
        return Manifest(clips=(), provenance=provenance)

    assignment = stratified_split(records, split_cfg)
    ordered = sorted(records, key=lambda r: r.video_id)

    def work(rec: VideoRecord) -> list[LabeledClip] | UnsampleableVideoError:
        try:
            return _sample_one(rec, assignment[rec.video_id], samplers, label_policy, master_seed)
        except UnsampleableVideoError as exc:
            return exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, ordered))
    else:
        results = [work(rec) for rec in ordered]

    unsampleable = [
        vid for res in results if isinstance(res, UnsampleableVideoError) for vid in res.video_ids
    ]
    if unsampleable:
        raise UnsampleableVideoError(sorted(unsampleable))

    clips = [clip for res in results for clip in res]  # type: ignore[union-attr]
    clips.sort(key=_manifest_sort_key)

    if undersample_policy is not None:
        train = [c for c in clips if c.split is Split.TRAIN]
        kept = {c.clip_id for c in undersample(train, undersample_policy)}
        clips = [c for c in clips if c.split is not Split.TRAIN or c.clip_id in kept]

    return Manifest(clips=tuple(clips), provenance=provenance)


def distribution_report(manifest: Manifest, records: list[VideoRecord]) -> dict:
    """Per-split class counts/percentages plus video count and duration shares."""
    by_id = {rec.video_id: rec for rec in records}
    total_duration = sum((rec.duration_s for rec in records), Fraction(0))
    report: dict = {"splits": {}, "provenance": manifest.provenance}
    split_videos: dict[Split, set[str]] = {s: set() for s in SPLIT_ORDER}
    for clip in manifest.clips:
        split_videos[clip.split].add(clip.video_id)
    for split in SPLIT_ORDER:
        clips = manifest.by_split(split)
        counts = {cls.value: 0 for cls in ActionClass}
        for clip in clips:
            counts[clip.label.value] += 1
        total = len(clips)
        duration = sum((by_id[v].duration_s for v in split_videos[split]), Fraction(0))
        report["splits"][split.value] = {
            "total_clips": total,
            "class_counts": counts,
            "class_percentages": {
                cls: round(100 * n / total, 4) if total else 0.0 for cls, n in counts.items()
            },
            "video_count": len(split_videos[split]),
            "video_duration_s": format_seconds(duration),
            "video_duration_share": round(float(duration / total_duration), 4)
            if total_duration
            else 0.0,
        }
    return report


def write_manifest(manifest: Manifest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"provenance": manifest.provenance}, sort_keys=True) + "\n")
        for clip in manifest.clips:
            row = {
                "clip_id": clip.clip_id,
                "video_id": clip.video_id,
                "split": clip.split.value,
                "start_s": format_seconds(clip.start_s),
                "end_s": format_seconds(clip.end_s),
                "sampler": clip.sampler.value,
                "label": clip.label.value,
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_manifest(path: str) -> Manifest:
    clips: list[LabeledClip] = []
    provenance: dict = {}
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"bad manifest line: {exc.msg}", line=lineno, offset=exc.colno) from exc
            if lineno == 1 and "provenance" in obj:
                provenance = obj["provenance"]
                continue
            try:
                clip = LabeledClip(
                    clip_id=obj["clip_id"],
                    video_id=obj["video_id"],
                    start_s=parse_seconds(obj["start_s"], "start_s"),
                    end_s=parse_seconds(obj["end_s"], "end_s"),
                    sampler=SamplerKind(obj["sampler"]),
                    label=ActionClass(obj["label"]),
                    split=Split(obj["split"]),
                )
            except (KeyError, ValueError) as exc:
                raise ParseError(f"bad manifest line: {exc}", line=lineno, offset=0) from exc
            if clip.clip_id in seen:
                raise ValidationError(f"duplicate clip_id {clip.clip_id!r} in manifest")
            seen.add(clip.clip_id)
            clips.append(clip)
    return Manifest(clips=tuple(clips), provenance=provenance)
