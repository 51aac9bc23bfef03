"""Pipeline configuration: strict JSON parsing, built-in profiles, digests.

A config file has one section per pipeline stage; unknown keys anywhere are
rejected.  The single master_seed (overridable by --seed) feeds every seeded
component.  Two built-in profiles ship with the package: "paper_cutup" and
"paper_gaussian" (5 s clips, stride-5 cutup fallback, 30% fall-class
undersampling, frame stride 8, five test samples with three crops).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .annotations import ActionClass
from .dataset import SplitConfig, UndersamplePolicy
from .errors import ConfigError, ParseError
from .labeling import LabelPolicy, Split
from .rational import parse_seconds
from .sampling import CutupConfig, GaussianConfig
from .synth import CorpusConfig, OracleConfig

BUILTIN_PROFILES = ("paper_cutup", "paper_gaussian")


def _as_fraction(value, field: str) -> Fraction:
    """Exact fraction from a JSON number or string; floats read as their decimal literal."""
    try:
        if isinstance(value, bool):
            raise ValueError("boolean")
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"cannot parse {field} value {value!r} as a fraction") from exc


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


@dataclass(frozen=True, slots=True)
class FramePlanSettings:
    stride: int = 8
    frames_per_sample: int = 16
    source_width: int = 640
    source_height: int = 360


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    master_seed: int
    corpus: CorpusConfig
    split: SplitConfig
    samplers: dict[Split, CutupConfig | GaussianConfig]
    label_policy: LabelPolicy
    undersample: UndersamplePolicy | None
    frameplan: FramePlanSettings
    oracle: OracleConfig
    score_split: Split
    score_softmax: bool
    digest: str


def _parse_sampler(obj: dict, where: str) -> CutupConfig | GaussianConfig:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"{where}: sampler needs a 'kind'")
    kind = obj["kind"]
    if kind == "cutup":
        _check_keys(obj, {"kind", "clip_len_s", "stride_s"}, where)
        return CutupConfig(
            clip_len_s=parse_seconds(obj["clip_len_s"], "clip_len_s"),
            stride_s=parse_seconds(obj["stride_s"], "stride_s"),
        )
    if kind == "gaussian":
        _check_keys(obj, {"kind", "clip_len_s", "min_sigma_s", "fallback"}, where)
        if "fallback" not in obj:
            raise ConfigError(f"{where}: gaussian sampler requires a fallback")
        fallback = _parse_sampler(obj["fallback"], f"{where}.fallback")
        if not isinstance(fallback, CutupConfig):
            raise ConfigError(f"{where}: fallback must be a cutup sampler")
        return GaussianConfig(
            clip_len_s=parse_seconds(obj["clip_len_s"], "clip_len_s"),
            fallback=fallback,
            min_sigma_s=parse_seconds(obj.get("min_sigma_s", "1"), "min_sigma_s"),
        )
    raise ConfigError(f"{where}: unknown sampler kind {kind!r}")


def _parse_corpus(obj: dict, master_seed: int) -> CorpusConfig:
    _check_keys(
        obj,
        {
            "n_fall_videos",
            "n_adl_videos",
            "fall_len_mean_s",
            "adl_len_mean_s",
            "fps",
            "fall_interval_len_s",
            "visibility_miss_rate",
        },
        "corpus",
    )
    kwargs: dict = {"master_seed": master_seed}
    if "n_fall_videos" in obj:
        kwargs["n_fall_videos"] = int(obj["n_fall_videos"])
    if "n_adl_videos" in obj:
        kwargs["n_adl_videos"] = int(obj["n_adl_videos"])
    if "fall_len_mean_s" in obj:
        kwargs["fall_len_mean_s"] = parse_seconds(obj["fall_len_mean_s"], "fall_len_mean_s")
    if "adl_len_mean_s" in obj:
        kwargs["adl_len_mean_s"] = parse_seconds(obj["adl_len_mean_s"], "adl_len_mean_s")
    if "fps" in obj:
        kwargs["fps"] = parse_seconds(obj["fps"], "fps")
    if "fall_interval_len_s" in obj:
        lo, hi = obj["fall_interval_len_s"]
        kwargs["fall_interval_len_s"] = (parse_seconds(lo, "range low"), parse_seconds(hi, "range high"))
    if "visibility_miss_rate" in obj:
        kwargs["visibility_miss_rate"] = float(obj["visibility_miss_rate"])
    return CorpusConfig(**kwargs)


def _parse_oracle(obj: dict, master_seed: int) -> OracleConfig:
    _check_keys(obj, {"confusion", "logit_margin", "per_clip"}, "oracle")
    kwargs: dict = {"master_seed": master_seed}
    if "confusion" in obj:
        kwargs["confusion"] = tuple(tuple(float(x) for x in row) for row in obj["confusion"])
    if "logit_margin" in obj:
        kwargs["logit_margin"] = float(obj["logit_margin"])
    if "per_clip" in obj:
        kwargs["per_clip"] = bool(obj["per_clip"])
    return OracleConfig(**kwargs)


def parse_config(raw: dict, seed_override: int | None = None) -> PipelineConfig:
    _check_keys(
        raw,
        {
            "master_seed",
            "corpus",
            "split",
            "samplers",
            "labeling",
            "undersample",
            "frameplan",
            "oracle",
            "score",
        },
        "config",
    )
    master_seed = seed_override if seed_override is not None else int(raw.get("master_seed", 0))

    split_obj = dict(raw.get("split", {}))
    _check_keys(split_obj, {"train", "val", "test", "group_by_scenario"}, "split")
    fractions = (
        _as_fraction(split_obj.get("train", 0.7), "split.train"),
        _as_fraction(split_obj.get("val", 0.2), "split.val"),
        _as_fraction(split_obj.get("test", 0.1), "split.test"),
    )
    split_cfg = SplitConfig(
        fractions=fractions,
        master_seed=master_seed,
        group_by_scenario=bool(split_obj.get("group_by_scenario", False)),
    )

    samplers_obj = raw.get("samplers", {})
    _check_keys(samplers_obj, {s.value for s in Split}, "samplers")
    samplers: dict[Split, CutupConfig | GaussianConfig] = {}
    for split in Split:
        if split.value in samplers_obj:
            samplers[split] = _parse_sampler(samplers_obj[split.value], f"samplers.{split.value}")

    labeling_obj = raw.get("labeling", {})
    _check_keys(labeling_obj, {"min_overlap"}, "labeling")
    overlap_obj = labeling_obj.get("min_overlap", {})
    _check_keys(overlap_obj, {"fall", "lying"}, "labeling.min_overlap")
    label_policy = LabelPolicy(
        min_overlap_fall=_as_fraction(overlap_obj.get("fall", 0), "min_overlap.fall"),
        min_overlap_lying=_as_fraction(overlap_obj.get("lying", 0), "min_overlap.lying"),
    )

    undersample = None
    if "undersample" in raw:
        under_obj = raw["undersample"]
        _check_keys(under_obj, {"keep_fraction"}, "undersample")
        keep_obj = under_obj.get("keep_fraction", {})
        _check_keys(keep_obj, {c.value for c in ActionClass}, "undersample.keep_fraction")
        keep = {
            ActionClass(name): _as_fraction(q, f"keep_fraction.{name}")
            for name, q in keep_obj.items()
        }
        if keep:
            undersample = UndersamplePolicy(keep_fraction=keep, master_seed=master_seed)

    fp_obj = raw.get("frameplan", {})
    _check_keys(
        fp_obj, {"stride", "frames_per_sample", "source_width", "source_height"}, "frameplan"
    )
    frameplan = FramePlanSettings(
        stride=int(fp_obj.get("stride", 8)),
        frames_per_sample=int(fp_obj.get("frames_per_sample", 16)),
        source_width=int(fp_obj.get("source_width", 640)),
        source_height=int(fp_obj.get("source_height", 360)),
    )
    if frameplan.stride < 1 or frameplan.frames_per_sample < 1:
        raise ConfigError("frameplan stride and frames_per_sample must be >= 1")

    score_obj = raw.get("score", {})
    _check_keys(score_obj, {"split", "softmax"}, "score")
    try:
        score_split = Split(score_obj.get("split", "test"))
    except ValueError:
        raise ConfigError(f"score.split must be one of train/val/test") from None

    digest_source = {k: v for k, v in raw.items() if k != "master_seed"}
    digest = hashlib.sha256(
        json.dumps(digest_source, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()

    return PipelineConfig(
        master_seed=master_seed,
        corpus=_parse_corpus(raw.get("corpus", {}), master_seed),
        split=split_cfg,
        samplers=samplers,
        label_policy=label_policy,
        undersample=undersample,
        frameplan=frameplan,
        oracle=_parse_oracle(raw.get("oracle", {}), master_seed),
        score_split=score_split,
        score_softmax=bool(score_obj.get("softmax", False)),
        digest=digest,
    )


def load_config(ref: str, seed_override: int | None = None) -> PipelineConfig:
    """Load a config from a file path or a built-in profile name."""
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            text = fh.read()
    else:
        name = ref[:-5] if ref.endswith(".json") else ref
        if name not in BUILTIN_PROFILES:
            raise ConfigError(
                f"config {ref!r} is neither a file nor a built-in profile "
                f"(available: {', '.join(BUILTIN_PROFILES)})"
            )
        text = resources.files("cutup").joinpath(f"profiles/{name}.json").read_text("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config JSON: {exc.msg}", line=exc.lineno, offset=exc.colno) from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(raw, seed_override)
