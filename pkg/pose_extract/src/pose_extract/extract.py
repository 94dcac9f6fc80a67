"""Video decoding and keypoint-file emission."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ExtractionError, NoFramesError, UnreadableVideoError
from .mapping import LANDMARK_TO_JOINT

DEFAULT_FALLBACK_FPS = 30.0


@dataclass(frozen=True)
class ExtractionJob:
    video: str
    out: str
    signer: str | None = None
    detection_confidence: float = 0.5
    tracking_confidence: float = 0.5

    def __post_init__(self):
        for name in ("detection_confidence", "tracking_confidence"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ExtractionError(f"{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class ExtractionResult:
    out_path: Path
    frames_decoded: int
    frames_with_landmarks: int
    rows_written: int
    frame_rate: float


def _fmt(v: float) -> str:
    return repr(float(v))


def _serialize(frames, frame_rate: float, signer: str | None) -> tuple[str, int]:
    """Canonical keypoint file: headers, then time_ms,joint,x,y,,confidence
    rows (2D source, so the z column is empty)."""
    lines = [
        f"#frame_rate={_fmt(frame_rate)}",
        "#source_kind=pose2d",
        "#up_axis=-y",
        "#unit_label=normalized-image",
    ]
    if signer:
        lines.append(f"#signer={signer}")
    rows = 0
    for time_ms, joints in frames:
        for joint in sorted(joints):
            x, y, conf = joints[joint]
            conf_str = "" if conf is None else _fmt(conf)
            lines.append(f"{_fmt(time_ms)},{joint},{_fmt(x)},{_fmt(y)},,{conf_str}")
            rows += 1
    return "\n".join(lines) + "\n", rows


def extract_keypoints(job: ExtractionJob, estimator=None) -> ExtractionResult:
    """Decode the video, run the estimator on every frame, and write the 46
    mapped joints per frame to the canonical keypoint format.

    Frames where the estimator reports nothing (no person, or an
    undetected hand) simply emit no rows for the missing joints; the
    downstream gap policy handles them.
    """
    import cv2

    video_path = Path(job.video)
    if not video_path.exists():
        raise UnreadableVideoError(f"video not found: {video_path}")
    capture = cv2.VideoCapture(str(video_path))
    if not capture.isOpened():
        raise UnreadableVideoError(f"could not open video: {video_path}")

    owns_estimator = estimator is None
    if owns_estimator:
        from .estimator import default_estimator

        estimator = default_estimator(job.detection_confidence, job.tracking_confidence)

    fps = capture.get(cv2.CAP_PROP_FPS) or 0.0
    if fps <= 0:
        fps = DEFAULT_FALLBACK_FPS
    frame_ms = 1000.0 / fps

    frames = []
    decoded = 0
    detected = 0
    try:
        while True:
            ok, frame = capture.read()
            if not ok:
                break
            landmarks = estimator.process(frame)
            mapped = {
                LANDMARK_TO_JOINT[key]: value
                for key, value in landmarks.items()
                if key in LANDMARK_TO_JOINT
            }
            if mapped:
                frames.append((decoded * frame_ms, mapped))
                detected += 1
            decoded += 1
    finally:
        capture.release()
        if owns_estimator:
            estimator.close()

    if decoded == 0:
        raise NoFramesError(f"zero frames decoded from {video_path}")
    if detected == 0:
        print(f"warning: no landmarks detected in {video_path}", file=sys.stderr)

    text, rows = _serialize(frames, fps, job.signer)
    out_path = Path(job.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(text, encoding="utf-8")
    return ExtractionResult(out_path, decoded, detected, rows, fps)
