"""Command-line entry point: extract --video in.mp4 --out keypoints.csv."""

from __future__ import annotations

import argparse
import sys

from .errors import ExtractionError
from .extract import ExtractionJob, extract_keypoints


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Run a holistic pose estimator on a video and write a canonical keypoint file.",
    )
    parser.add_argument("--video", required=True, help="input video file")
    parser.add_argument("--out", required=True, help="output keypoint file")
    parser.add_argument("--signer", help="signer label recorded in the output header")
    parser.add_argument("--det", type=float, default=0.5,
                        help="minimum detection confidence (default 0.5)")
    parser.add_argument("--track", type=float, default=0.5,
                        help="minimum tracking confidence (default 0.5)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = ExtractionJob(
            video=args.video,
            out=args.out,
            signer=args.signer,
            detection_confidence=args.det,
            tracking_confidence=args.track,
        )
        result = extract_keypoints(job)
    except ExtractionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"{result.out_path} ({result.frames_with_landmarks}/{result.frames_decoded} "
        f"frames with landmarks, {result.rows_written} rows, {result.frame_rate:g} fps)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
