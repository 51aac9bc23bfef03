"""cutup-adapter: run a pluggable clip classifier over a manifest + frame plans.

Exit codes: 0 success, 2 startup problem (missing input, bad classifier
spec), 3 some clips failed in the classifier (failure list on stderr),
4 classifier output violated the prediction schema.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .formats import FormatError
from .runner import AdapterConfig, run_inference


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutup-adapter", description=__doc__.splitlines()[0])
    parser.add_argument("--manifest", required=True, help="manifest.jsonl from the dataset toolkit")
    parser.add_argument("--plans", required=True, help="frameplan.jsonl from the dataset toolkit")
    parser.add_argument("--out", required=True, help="predictions.jsonl to write")
    parser.add_argument(
        "--classifier",
        default="dummy",
        help="'dummy' or dotted entry point 'package.module:attribute'",
    )
    parser.add_argument("--video-root", default=None, help="directory holding <video_id>.mp4 files")
    parser.add_argument("--batch-size", type=int, default=256)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, os.environ.get("CUTUP_LOG", "warning").upper(), logging.WARNING),
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = AdapterConfig(
            manifest_path=args.manifest,
            frameplan_path=args.plans,
            output_path=args.out,
            classifier_spec=args.classifier,
            video_root=args.video_root,
            batch_size=args.batch_size,
        )
        result = run_inference(cfg)
    except (FileNotFoundError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except FormatError as exc:
        sys.stderr.write(json.dumps({"error": "FormatError", "message": str(exc)}) + "\n")
        return 4
    if result.failed_clips:
        sys.stderr.write(
            json.dumps({"error": "ClassifierFailures", "failed_clips": result.failed_clips}) + "\n"
        )
        return 3
    logging.getLogger("cutup_adapter").info("wrote %d rows to %s", result.rows_written, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
