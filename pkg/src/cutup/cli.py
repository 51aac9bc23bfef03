"""Command-line entry point exposing the pipeline stages as subcommands.

Stages and their artifacts:

    synth     config -> annotations.json
    validate  annotations.json -> (exit status)
    split     annotations.json -> splits.json
    sample    annotations.json + splits.json -> clips.jsonl
    label     annotations.json + clips.jsonl -> labeled.jsonl
    build     annotations.json -> manifest.jsonl + distribution_report.json
    plan      annotations.json + manifest.jsonl -> frameplan.jsonl
    oracle    manifest.jsonl + frameplan.jsonl -> predictions.jsonl
    score     manifest.jsonl + predictions.jsonl + annotations.json -> report.json
    report    report.json -> stdout (json or table)
    quality   prints the frame-window label-quality bound for a config

All randomness flows from --seed (or the config's master_seed); repeated runs
with identical inputs produce byte-identical artifacts regardless of --jobs.
Set CUTUP_LOG=debug|info|warning|error to control verbosity.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .annotations import build_timeline, parse_annotations, serialize_annotations
from .config import PipelineConfig, load_config
from .dataset import (
    build_manifest,
    distribution_report,
    read_manifest,
    stratified_split,
    write_manifest,
)
from .errors import CutupError, ValidationError
from .evaluation import read_predictions, render_table, score_predictions, write_predictions
from .frameplan import plan_clip, read_frameplans, write_frameplans
from .labeling import LabeledClip, Split, label_clip, label_quality
from .rational import format_seconds, parse_seconds
from .sampling import ClipSpec, GaussianConfig, SamplerKind, cutup_sample, gaussian_sample
from .synth import generate_corpus, oracle_predict

log = logging.getLogger("cutup")


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _read_annotations(path: str):
    with open(path, "rb") as fh:
        return parse_annotations(fh.read())


def _sample_split_clips(records, config: PipelineConfig, assignment) -> list[tuple[ClipSpec, Split]]:
    unassigned = sorted({r.video_id for r in records} - set(assignment))
    if unassigned:
        raise ValidationError(f"video(s) missing from split file: {', '.join(unassigned)}")
    out: list[tuple[ClipSpec, Split]] = []
    for rec in sorted(records, key=lambda r: r.video_id):
        split = assignment[rec.video_id]
        cfg = config.samplers[split]
        if isinstance(cfg, GaussianConfig):
            clips = gaussian_sample(rec, cfg, config.master_seed)
        else:
            clips = cutup_sample(rec, cfg)
        out.extend((clip, split) for clip in clips)
    return out


def _cmd_synth(args) -> int:
    config = load_config(args.config, args.seed)
    records = generate_corpus(config.corpus)
    with open(args.out, "wb") as fh:
        fh.write(serialize_annotations(records))
    log.info("wrote %d records to %s", len(records), args.out)
    return 0


def _cmd_validate(args) -> int:
    records = _read_annotations(args.annotations)
    for rec in records:
        build_timeline(rec)
    print(f"OK: {len(records)} valid records")
    return 0


def _cmd_split(args) -> int:
    config = load_config(args.config, args.seed)
    records = _read_annotations(args.annotations)
    assignment = stratified_split(records, config.split)
    payload = {vid: split.value for vid, split in sorted(assignment.items())}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _clip_row(clip: ClipSpec, split: Split) -> dict:
    return {
        "clip_id": clip.clip_id,
        "video_id": clip.video_id,
        "split": split.value,
        "start_s": format_seconds(clip.start_s),
        "end_s": format_seconds(clip.end_s),
        "sampler": clip.sampler.value,
        "seed_index": clip.seed_index,
    }


def _cmd_sample(args) -> int:
    config = load_config(args.config, args.seed)
    records = _read_annotations(args.annotations)
    with open(args.splits, encoding="utf-8") as fh:
        assignment = {vid: Split(name) for vid, name in json.load(fh).items()}
    for split in (Split.VAL, Split.TEST):
        if isinstance(config.samplers.get(split), GaussianConfig):
            raise ValidationError(f"gaussian sampler configured for {split.value}")
    sampled = _sample_split_clips(records, config, assignment)
    with open(args.out, "w", encoding="utf-8") as fh:
        for clip, split in sampled:
            fh.write(json.dumps(_clip_row(clip, split), sort_keys=True) + "\n")
    return 0


def _cmd_label(args) -> int:
    config = load_config(args.config, args.seed)
    records = _read_annotations(args.annotations)
    timelines = {rec.video_id: build_timeline(rec) for rec in records}
    rows = []
    with open(args.clips, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            clip = ClipSpec(
                clip_id=obj["clip_id"],
                video_id=obj["video_id"],
                start_s=parse_seconds(obj["start_s"], "start_s"),
                end_s=parse_seconds(obj["end_s"], "end_s"),
                sampler=SamplerKind(obj["sampler"]),
                seed_index=obj.get("seed_index"),
            )
            if clip.video_id not in timelines:
                raise ValidationError(f"clip {clip.clip_id} references unknown video {clip.video_id}")
            label = label_clip(clip, timelines[clip.video_id], config.label_policy)
            row = _clip_row(clip, Split(obj["split"]))
            del row["seed_index"]
            row["label"] = label.value
            rows.append(row)
    with open(args.out, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return 0


def _cmd_build(args) -> int:
    config = load_config(args.config, args.seed)
    records = _read_annotations(args.annotations)
    manifest = build_manifest(
        records,
        config.split,
        config.samplers,
        config.label_policy,
        config.undersample,
        master_seed=config.master_seed,
        config_digest=config.digest,
        jobs=args.jobs,
    )
    write_manifest(manifest, args.out)
    if args.report:
        report = distribution_report(manifest, records)
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    log.info("wrote %d clips to %s", len(manifest.clips), args.out)
    return 0


def _cmd_plan(args) -> int:
    config = load_config(args.config, args.seed)
    records = _read_annotations(args.annotations)
    fps_of = {rec.video_id: rec.fps for rec in records}
    manifest = read_manifest(args.manifest)
    missing = sorted({c.video_id for c in manifest.clips} - set(fps_of))
    if missing:
        raise ValidationError(f"manifest references unknown video(s): {', '.join(missing)}")
    dims = (config.frameplan.source_width, config.frameplan.source_height)

    def work(clip: LabeledClip):
        return plan_clip(
            clip,
            fps_of[clip.video_id],
            config.frameplan.stride,
            dims,
            config.master_seed,
            config.frameplan.frames_per_sample,
        )

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            per_clip = list(pool.map(work, manifest.clips))
    else:
        per_clip = [work(clip) for clip in manifest.clips]
    plans = [plan for group in per_clip for plan in group]
    write_frameplans(plans, args.out)
    log.info("wrote %d sample plans to %s", len(plans), args.out)
    return 0


def _cmd_oracle(args) -> int:
    config = load_config(args.config, args.seed)
    manifest = read_manifest(args.manifest)
    plans = read_frameplans(args.plans)
    predictions = oracle_predict(manifest, plans, config.oracle)
    write_predictions(predictions, args.out)
    log.info("wrote %d predictions to %s", len(predictions), args.out)
    return 0


def _cmd_score(args) -> int:
    config = load_config(args.config, args.seed) if args.config else None
    manifest = read_manifest(args.manifest)
    predictions = read_predictions(args.pred)
    records = _read_annotations(args.annotations)
    kinds = {rec.video_id: rec.kind for rec in records}
    if args.split:
        split = Split(args.split)
    elif config is not None:
        split = config.score_split
    else:
        split = Split.TEST
    softmax = config.score_softmax if config is not None else False
    report = score_predictions(manifest, kinds, predictions, split=split, softmax=softmax)
    report["provenance"]["manifest_digest"] = _file_digest(args.manifest)
    report["provenance"]["predictions_digest"] = _file_digest(args.pred)
    report["provenance"]["annotations_digest"] = _file_digest(args.annotations)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_report(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        report = json.load(fh)
    if args.format == "table":
        sys.stdout.write(render_table(report))
    else:
        json.dump(report, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def _cmd_quality(args) -> int:
    value = label_quality(
        parse_seconds(args.clip_len, "clip-len"),
        parse_seconds(args.fps, "fps"),
        args.tau,
        args.frames,
    )
    print(format_seconds(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutup",
        description="Deterministic clip-dataset generation and fall-detection evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        return p

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="config path or built-in profile name")
        p.add_argument("--seed", type=int, default=None, help="master seed override")

    p = add("synth", _cmd_synth, "generate a synthetic annotation corpus")
    common(p)
    p.add_argument("--out", required=True)

    p = add("validate", _cmd_validate, "validate an annotation file")
    p.add_argument("--annotations", required=True)

    p = add("split", _cmd_split, "assign videos to train/val/test splits")
    common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)

    p = add("sample", _cmd_sample, "sample clips for every video")
    common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--splits", required=True)
    p.add_argument("--out", required=True)

    p = add("label", _cmd_label, "label sampled clips against timelines")
    common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--clips", required=True)
    p.add_argument("--out", required=True)

    p = add("build", _cmd_build, "split + sample + label + undersample into a manifest")
    common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None, help="distribution report path")
    p.add_argument("--jobs", type=int, default=1)

    p = add("plan", _cmd_plan, "emit frame windows and crop plans per clip")
    common(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = add("oracle", _cmd_oracle, "emit noisy-oracle predictions for planned clips")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--plans", required=True)
    p.add_argument("--out", required=True)

    p = add("score", _cmd_score, "aggregate predictions and compute metrics")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split", choices=[s.value for s in Split], default=None)

    p = add("report", _cmd_report, "render a score report")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=["json", "table"], default="json")

    p = add("quality", _cmd_quality, "print the frame-window label-quality bound")
    p.add_argument("--clip-len", required=True)
    p.add_argument("--fps", required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--frames", type=int, default=16)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("CUTUP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CutupError as exc:
        sys.stderr.write(json.dumps(exc.record()) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
