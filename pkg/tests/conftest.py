from __future__ import annotations

import sys
from fractions import Fraction

import pytest

from cutup import VideoKind, VideoRecord


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    status = "PASS" if report.passed else "FAIL"
    name = report.nodeid.split("::")[-1]
    sys.stderr.write(f"[{status}] {name}\n")
    sys.stderr.flush()


def make_fall_record(
    video_id: str = "fall_demo",
    duration: str = "165",
    fall: tuple[str, str] = ("60", "63"),
    lying_end: str = "120",
    fps: str = "25",
    fall_visible: bool = True,
    lying_visible: bool = True,
    scenario_id: str = "scn",
) -> VideoRecord:
    return VideoRecord(
        video_id=video_id,
        scenario_id=scenario_id,
        camera_id="cam1",
        camera_rank=1,
        fps=Fraction(fps),
        duration_s=Fraction(duration),
        kind=VideoKind.FALL,
        fall_start_s=Fraction(fall[0]),
        fall_end_s=Fraction(fall[1]),
        lying_end_s=Fraction(lying_end),
        fall_visible=fall_visible,
        lying_visible=lying_visible,
    )


def make_adl_record(
    video_id: str = "adl_demo",
    duration: str = "300",
    fps: str = "25",
    scenario_id: str = "scn_adl",
) -> VideoRecord:
    return VideoRecord(
        video_id=video_id,
        scenario_id=scenario_id,
        camera_id="cam1",
        camera_rank=1,
        fps=Fraction(fps),
        duration_s=Fraction(duration),
        kind=VideoKind.ADL,
    )


@pytest.fixture
def fall_record() -> VideoRecord:
    return make_fall_record()


@pytest.fixture
def adl_record() -> VideoRecord:
    return make_adl_record()
