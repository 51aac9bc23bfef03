"""Acceptance suite: every release criterion at its stated tolerance.

Each test is one criterion; the conftest hook prints a [PASS]/[FAIL] line per
criterion on every run.  Expected values come from hand derivations or from
the independent oracles in oracles.py, never from the code under test.
"""

from __future__ import annotations

import json
import random
import statistics
import time
from fractions import Fraction

from cutup import (
    ActionClass,
    CorpusConfig,
    CutupConfig,
    GaussianConfig,
    LabelPolicy,
    OracleConfig,
    Split,
    SplitConfig,
    UndersamplePolicy,
    VideoKind,
    build_manifest,
    class_weights,
    cutup_sample,
    gaussian_sample,
    gaussian_sigma_s,
    generate_corpus,
    label_clip,
    label_quality,
    oracle_predict,
    plan_clip,
    plan_frames,
    score_predictions,
)
from cutup.cli import main as cli_main
from cutup.dataset import LabeledClip
from cutup.evaluation import VideoLabel, clip_metrics, video_metrics
from cutup.frameplan import FramePlanConfig
from cutup.labeling import Split as Mode
from cutup.sampling import ClipSpec, SamplerKind, gaussian_clip_count
from conftest import make_adl_record, make_fall_record
from oracles import (
    brute_force_label,
    direct_binary_metrics,
    direct_class_metrics,
    expected_fall_vote_rate,
    random_ms_timeline,
)

MASTER_SEED = 20250809
CUTUP55 = CutupConfig(Fraction(5), Fraction(5))


def test_sampling_formula_suite():
    started = time.monotonic()
    # hand values: T=165, fall midpoint 60 -> n=33, sigma=20, clip (57.5, 62.5)
    rec = make_fall_record(duration="165", fall=("57", "63"))
    assert gaussian_clip_count(rec.duration_s, Fraction(5)) == 33
    assert rec.fall_midpoint_s == 60
    assert gaussian_sigma_s(rec) == 20
    clips = gaussian_sample(rec, GaussianConfig(Fraction(5), CUTUP55), MASTER_SEED)
    assert len(clips) == 33
    for clip in clips:
        mid = (clip.start_s + clip.end_s) / 2
        assert clip.start_s == mid - Fraction(5, 2)
        assert clip.end_s == mid + Fraction(5, 2)

    # distribution check: 10,000 pre-clamp seeds across per-video substreams
    seeds: list[float] = []
    index = 0
    cfg = GaussianConfig(Fraction(5), CUTUP55)
    while len(seeds) < 10_000:
        video = make_fall_record(
            video_id=f"stat_{index:04d}", duration="165", fall=("57", "63")
        )
        seeds.extend(c.seed_raw_s for c in gaussian_sample(video, cfg, MASTER_SEED))
        index += 1
    seeds = seeds[:10_000]
    mean = statistics.fmean(seeds)
    std = statistics.pstdev(seeds)
    assert abs(mean - 60) <= 0.6
    assert abs(std - 20) <= 0.02 * 20
    assert time.monotonic() - started < 5.0


def test_cutup_tiling_randomized_exact():
    rng = random.Random(MASTER_SEED)
    for _ in range(1_000):
        clip_len = Fraction(rng.randint(500, 10_000), 1000)
        stride = Fraction(rng.randint(1, int(clip_len * 1000)), 1000)
        duration = clip_len + Fraction(rng.randint(0, 120_000), 1000)
        rec = make_adl_record(video_id="tile", duration=str(duration), fps="1000")
        clips = cutup_sample(rec, CutupConfig(clip_len_s=clip_len, stride_s=stride))
        # count formula, bounds, exact stride/overlap, maximality: zero tolerance
        assert len(clips) == (duration - clip_len) // stride + 1
        assert clips[0].start_s == 0
        assert clips[-1].end_s <= duration
        assert clips[-1].start_s + stride + clip_len > duration
        for clip in clips:
            assert clip.end_s - clip.start_s == clip_len
        for prev, cur in zip(clips, clips[1:]):
            assert cur.start_s - prev.start_s == stride
            assert prev.end_s - cur.start_s == clip_len - stride


def test_labeling_oracle_equivalence_1000_timelines():
    rng = random.Random(MASTER_SEED)
    policy = LabelPolicy()
    agreements = 0
    for i in range(1_000):
        tl = random_ms_timeline(rng, f"tl{i}")
        total_ms = int(tl.total_s * 1000)
        start_ms = rng.randint(0, total_ms - 2_200)
        len_ms = rng.randint(200, 2_000)
        clip = ClipSpec(
            clip_id="tl:cutup:0",
            video_id=tl.video_id,
            start_s=Fraction(start_ms, 1000),
            end_s=Fraction(start_ms + len_ms, 1000),
            sampler=SamplerKind.CUTUP,
        )
        expected = brute_force_label(clip.start_s, clip.end_s, tl)
        if label_clip(clip, tl, policy) is expected:
            agreements += 1
    assert agreements == 1_000  # 100% agreement


def test_label_quality_calculator():
    assert label_quality(Fraction(10), Fraction(25), 4) == Fraction(256, 1000)
    assert label_quality(Fraction(5), Fraction(25), 8) == 1


def test_class_weights_appendix_table():
    def stub(n, cls):
        return [
            LabeledClip(
                clip_id=f"w:{cls.value}:{i}",
                video_id="w",
                start_s=Fraction(0),
                end_s=Fraction(5),
                sampler=SamplerKind.CUTUP,
                label=cls,
                split=Split.TRAIN,
            )
            for i in range(n)
        ]

    clips = (
        stub(231, ActionClass.FALL)
        + stub(1769, ActionClass.LYING)
        + stub(8764, ActionClass.OTHER)
    )
    weights = class_weights(clips)
    # oracle: exact rational arithmetic on the published counts
    exact = {
        ActionClass.FALL: Fraction(10764, 231 * 3),
        ActionClass.LYING: Fraction(10764, 1769 * 3),
        ActionClass.OTHER: Fraction(10764, 8764 * 3),
    }
    for cls in ActionClass:
        assert abs(weights[cls] - exact[cls]) < 1e-9


def test_metric_engine_hand_confusion_and_brute_force():
    # hand-computed video confusion TP=9 FN=1 FP=2 TN=8
    truth = {}
    preds = {}
    for i in range(10):
        truth[f"f{i}"] = VideoKind.FALL
        preds[f"f{i}"] = VideoLabel.FALL_VIDEO if i < 9 else VideoLabel.ADL
    for i in range(10):
        truth[f"a{i}"] = VideoKind.ADL
        preds[f"a{i}"] = VideoLabel.FALL_VIDEO if i < 2 else VideoLabel.ADL
    vm, _ = video_metrics(truth, preds)
    assert abs(vm.precision - Fraction(9, 11)) < 1e-9
    assert abs(vm.sensitivity - Fraction(9, 10)) < 1e-9
    assert abs(vm.specificity - Fraction(8, 10)) < 1e-9
    assert abs(vm.f1 - Fraction(18, 21)) < 1e-9  # 2*(9/11)*(9/10) / (9/11 + 9/10)

    rng = random.Random(MASTER_SEED)
    classes = list(ActionClass)
    for _ in range(500):
        n = rng.randint(1, 50)
        truths = [rng.choice(classes) for _ in range(n)]
        guesses = [rng.choice(classes) for _ in range(n)]
        per_class, macro, _, _ = clip_metrics(
            {f"c{i}": t for i, t in enumerate(truths)},
            {f"c{i}": p for i, p in enumerate(guesses)},
        )
        oracle = direct_class_metrics(truths, guesses)
        for cls in classes:
            precision, recall, f1, support = oracle[cls]
            assert per_class[cls].precision == precision
            assert per_class[cls].recall == recall
            assert per_class[cls].f1 == f1
            assert per_class[cls].support == support
        assert macro["f1"] == sum(o[2] for o in oracle.values()) / 3

        pairs = [(rng.random() < 0.5, rng.random() < 0.6) for _ in range(n)]
        vt = {f"v{i}": VideoKind.FALL if t else VideoKind.ADL for i, (t, _) in enumerate(pairs)}
        vp = {
            f"v{i}": VideoLabel.FALL_VIDEO if p else VideoLabel.ADL
            for i, (_, p) in enumerate(pairs)
        }
        got, _ = video_metrics(vt, vp)
        assert (got.precision, got.sensitivity, got.specificity, got.f1) == direct_binary_metrics(pairs)


def _paper_gaussian_profile():
    from cutup.config import load_config

    profile = load_config("paper_gaussian")
    # the pipeline parameters this suite hard-codes must match the shipped profile
    assert profile.samplers[Split.TRAIN] == GaussianConfig(Fraction(5), CUTUP55)
    assert profile.samplers[Split.VAL] == CUTUP55
    assert profile.samplers[Split.TEST] == CUTUP55
    assert profile.undersample is not None
    assert profile.undersample.keep_fraction == {ActionClass.FALL: Fraction(3, 10)}
    assert profile.frameplan.stride == 8
    assert profile.frameplan.frames_per_sample == 16
    assert profile.split.fractions == (Fraction(7, 10), Fraction(2, 10), Fraction(1, 10))
    assert profile.corpus.n_fall_videos == 55
    assert profile.corpus.n_adl_videos == 17
    return profile


def _acceptance_pipeline(oracle_cfg: OracleConfig):
    _paper_gaussian_profile()
    corpus_cfg = CorpusConfig(
        n_fall_videos=55,
        n_adl_videos=17,
        fall_len_mean_s=Fraction(165),
        adl_len_mean_s=Fraction(1237),
        fall_interval_len_s=(Fraction(20), Fraction(40)),
        visibility_miss_rate=0.0,
        master_seed=MASTER_SEED,
    )
    records = generate_corpus(corpus_cfg)
    samplers = {
        Split.TRAIN: GaussianConfig(Fraction(5), CUTUP55),
        Split.VAL: CUTUP55,
        Split.TEST: CUTUP55,
    }
    manifest = build_manifest(
        records,
        SplitConfig(master_seed=MASTER_SEED),
        samplers,
        LabelPolicy(),
        UndersamplePolicy({ActionClass.FALL: Fraction(3, 10)}, master_seed=MASTER_SEED),
        master_seed=MASTER_SEED,
    )
    fps_of = {r.video_id: r.fps for r in records}
    plans = [
        plan
        for clip in manifest.clips
        for plan in plan_clip(clip, fps_of[clip.video_id], 8, (640, 360), MASTER_SEED)
    ]
    predictions = oracle_predict(manifest, plans, oracle_cfg)
    kinds = {r.video_id: r.kind for r in records}
    return score_predictions(manifest, kinds, predictions, split=Split.TEST)


def test_end_to_end_synthetic_pipeline():
    started = time.monotonic()

    report = _acceptance_pipeline(OracleConfig(master_seed=MASTER_SEED))
    video = report["video_level"]
    assert video["precision"] == 1.0
    assert video["sensitivity"] == 1.0
    assert video["specificity"] == 1.0
    assert video["f1"] == 1.0
    # test-time augmentation: every evaluated clip carries 5 samples x 3 crops
    assert set(report["prediction_multiplicity"]) == {"15"}

    noisy = OracleConfig(
        confusion=((0.78, 0.02, 0.20), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
        master_seed=MASTER_SEED,
    )
    noisy_report = _acceptance_pipeline(noisy)
    fall = noisy_report["clip_level"]["per_class"]["fall"]
    assert fall["support"] >= 30
    expected = expected_fall_vote_rate((0.78, 0.02, 0.20), 15)
    assert abs(fall["recall"] - expected) <= 0.03

    assert time.monotonic() - started < 60.0


def test_determinism_jobs_and_reruns(tmp_path):
    corpus = {
        "n_fall_videos": 6,
        "n_adl_videos": 3,
        "fall_len_mean_s": "100",
        "adl_len_mean_s": "140",
        "fall_interval_len_s": ["2", "6"],
        "visibility_miss_rate": 0.0,
    }
    config = {
        "master_seed": 0,
        "corpus": corpus,
        "split": {"train": 0.6, "val": 0.2, "test": 0.2},
        "samplers": {
            "train": {
                "kind": "gaussian",
                "clip_len_s": "5",
                "min_sigma_s": "1",
                "fallback": {"kind": "cutup", "clip_len_s": "5", "stride_s": "5"},
            },
            "val": {"kind": "cutup", "clip_len_s": "5", "stride_s": "5"},
            "test": {"kind": "cutup", "clip_len_s": "5", "stride_s": "5"},
        },
        "undersample": {"keep_fraction": {"fall": 0.3}},
        "frameplan": {"stride": 8},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))

    for seed in range(20):
        ann = tmp_path / f"ann{seed}.json"
        assert cli_main(["synth", "--config", str(cfg_path), "--seed", str(seed), "--out", str(ann)]) == 0
        artifacts = {}
        for jobs in ("1", "8"):
            manifest = tmp_path / f"m{seed}_{jobs}.jsonl"
            plans = tmp_path / f"p{seed}_{jobs}.jsonl"
            assert cli_main([
                "build", "--config", str(cfg_path), "--seed", str(seed),
                "--annotations", str(ann), "--out", str(manifest), "--jobs", jobs,
            ]) == 0
            assert cli_main([
                "plan", "--config", str(cfg_path), "--seed", str(seed),
                "--annotations", str(ann), "--manifest", str(manifest),
                "--out", str(plans), "--jobs", jobs,
            ]) == 0
            artifacts[jobs] = (manifest.read_bytes(), plans.read_bytes())
        assert artifacts["1"] == artifacts["8"]


def test_frame_plan_bounds_randomized():
    rng = random.Random(MASTER_SEED)
    cases = [(125, 8, 16, mode) for mode in Mode]  # saturating config S=128 > M=125
    while len(cases) < 1_000:
        cases.append(
            (rng.randint(1, 500), rng.randint(1, 12), rng.randint(1, 32), rng.choice(list(Mode)))
        )
    for m, tau, frames, mode in cases:
        clip = LabeledClip(
            clip_id="b:cutup:0",
            video_id="b",
            start_s=Fraction(0),
            end_s=Fraction(m),
            sampler=SamplerKind.CUTUP,
            label=ActionClass.OTHER,
            split=mode,
        )
        cfg = FramePlanConfig(mode=mode, stride=tau, frames_per_sample=frames)
        windows = plan_frames(clip, Fraction(1), cfg, rng.randint(0, 2**63))
        max_start = max(0, m - tau * frames)
        for window in windows:
            assert all(0 <= idx <= m - 1 for idx in window.frame_indices)
        if mode is Mode.TEST:
            starts = [w.frame_indices[0] for w in windows]
            assert starts[0] == 0
            assert starts[-1] == max_start
            assert starts == sorted(starts)
