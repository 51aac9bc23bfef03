from __future__ import annotations

import shutil
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    status = "PASS" if report.passed else "FAIL"
    sys.stderr.write(f"[{status}] {report.nodeid.split('::')[-1]}\n")
    sys.stderr.flush()


@pytest.fixture
def golden_dir(tmp_path) -> Path:
    """Copy of the golden three-clip manifest/frameplan/annotations set."""
    for name in ("annotations.json", "config.json", "manifest.jsonl", "frameplan.jsonl"):
        shutil.copy(DATA / name, tmp_path / name)
    return tmp_path
