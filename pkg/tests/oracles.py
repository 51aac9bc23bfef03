"""Independent brute-force oracles the test suite checks the library against.

Everything here deliberately avoids the library's own code paths: labels come
from point enumeration, metrics from direct counting, and the expected
15-way-vote fall rate from exact multinomial enumeration.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from fractions import Fraction

from cutup import ActionClass, Timeline

MS = Fraction(1, 1000)
PRIORITY = (ActionClass.FALL, ActionClass.LYING, ActionClass.OTHER)


def brute_force_label(clip_start: Fraction, clip_end: Fraction, tl: Timeline) -> ActionClass:
    """Enumerate the clip at millisecond steps and apply Fall > Lying > Other."""
    boundaries = [seg.start_s for seg in tl.segments]
    observed: set[ActionClass] = set()
    steps = int((clip_end - clip_start) / MS)
    for k in range(steps):
        t = clip_start + k * MS
        idx = bisect_right(boundaries, t) - 1
        observed.add(tl.segments[idx].cls)
    for cls in PRIORITY:
        if cls in observed:
            return cls
    return ActionClass.OTHER


def random_ms_timeline(rng: random.Random, video_id: str = "v") -> Timeline:
    """Random millisecond-aligned partition of [0, T] with distinct neighbours."""
    from cutup import Segment

    total_ms = rng.randint(8_000, 60_000)
    n_cuts = rng.randint(0, 6)
    cuts = sorted(rng.sample(range(1, total_ms), min(n_cuts, total_ms - 1)))
    bounds = [0, *cuts, total_ms]
    segments = []
    prev_cls = None
    for lo, hi in zip(bounds, bounds[1:]):
        choices = [cls for cls in PRIORITY if cls is not prev_cls]
        cls = rng.choice(choices)
        segments.append(Segment(Fraction(lo, 1000), Fraction(hi, 1000), cls))
        prev_cls = cls
    return Timeline(video_id, tuple(segments), Fraction(total_ms, 1000))


def direct_class_metrics(
    truths: list[ActionClass], preds: list[ActionClass]
) -> dict[ActionClass, tuple[float, float, float, int]]:
    """Per-class (precision, recall, f1, support) by direct pair counting."""
    out = {}
    for cls in PRIORITY:
        tp = sum(1 for t, p in zip(truths, preds) if t is cls and p is cls)
        fp = sum(1 for t, p in zip(truths, preds) if t is not cls and p is cls)
        fn = sum(1 for t, p in zip(truths, preds) if t is cls and p is not cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out[cls] = (precision, recall, f1, tp + fn)
    return out


def direct_binary_metrics(
    pairs: list[tuple[bool, bool]]
) -> tuple[float, float, float, float]:
    """(precision, sensitivity, specificity, f1) from (truth, pred) booleans."""
    tp = sum(1 for t, p in pairs if t and p)
    fp = sum(1 for t, p in pairs if not t and p)
    fn = sum(1 for t, p in pairs if t and not p)
    tn = sum(1 for t, p in pairs if not t and not p)
    precision = tp / (tp + fp) if tp + fp else 0.0
    sensitivity = tp / (tp + fn) if tp + fn else 0.0
    specificity = tn / (tn + fp) if tn + fp else 0.0
    f1 = (
        2 * precision * sensitivity / (precision + sensitivity)
        if precision + sensitivity
        else 0.0
    )
    return precision, sensitivity, specificity, f1


def expected_fall_vote_rate(row: tuple[float, float, float], draws: int) -> float:
    """Exact P(fall wins the vote) for `draws` iid draws from a confusion row.

    With margin logits the averaged vector is proportional to the draw counts,
    so fall wins iff its count is >= both others (fall takes ties).
    """
    p_fall, p_lying, p_other = row
    total = 0.0
    for a in range(draws + 1):
        for b in range(draws - a + 1):
            c = draws - a - b
            if a >= b and a >= c:
                total += (
                    math.comb(draws, a)
                    * math.comb(draws - a, b)
                    * (p_fall**a)
                    * (p_lying**b)
                    * (p_other**c)
                )
    return total


def two_pass_moments(values_by_channel: list[list[float]]) -> list[tuple[float, float]]:
    """Two-pass mean and population std per channel."""
    out = []
    for values in values_by_channel:
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        out.append((mean, math.sqrt(var)))
    return out
