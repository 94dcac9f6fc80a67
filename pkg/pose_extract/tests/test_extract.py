import math

import cv2
import numpy as np
import pytest

from pose_extract import (
    ExtractionJob,
    LANDMARK_TO_JOINT,
    extract_keypoints,
)
from pose_extract.cli import main as cli_main
from pose_extract.errors import ExtractionError, NoFramesError, UnreadableVideoError

# the primary toolkit is the consumer of the emitted file format
from signkin.skeleton import CANONICAL_JOINTS, parse_keypoint_file


class StubEstimator:
    """Deterministic estimator: a 'person' whose right hand orbits the
    frame center, plus arm/forearm landmarks; reports nothing on frames
    where detect=False."""

    def __init__(self, detect=True, extra_keys=()):
        self.detect = detect
        self.extra_keys = tuple(extra_keys)
        self.frame_index = 0
        self.closed = False

    def process(self, frame_bgr):
        i = self.frame_index
        self.frame_index += 1
        if not self.detect:
            return {}
        angle = 2 * math.pi * i / 30.0
        out = {
            "pose_12": (0.6, 0.4, 0.9),
            "pose_14": (0.65, 0.5, 0.9),
            "pose_16": (0.5 + 0.1 * math.cos(angle), 0.5 + 0.1 * math.sin(angle), 0.8),
            "pose_11": (0.4, 0.4, 0.9),
            # face and lower-body landmarks the adapter must drop
            "pose_0": (0.5, 0.1, 0.99),
            "pose_28": (0.5, 0.95, 0.7),
        }
        for k in range(1, 21):
            out[f"right_hand_{k}"] = (0.5 + 0.001 * k, 0.5 + 0.002 * i, 1.0)
        for key in self.extra_keys:
            out[key] = (0.1, 0.1, 0.5)
        return out

    def close(self):
        self.closed = True


def make_clip(path, n_frames=30, fps=30.0, size=(64, 48)):
    writer = cv2.VideoWriter(
        str(path), cv2.VideoWriter_fourcc(*"MJPG"), fps, size
    )
    assert writer.isOpened()
    for i in range(n_frames):
        frame = np.full((size[1], size[0], 3), 30, dtype=np.uint8)
        cv2.circle(frame, (size[0] // 2, size[1] // 2), 5 + i % 5, (0, 255, 0), -1)
        writer.write(frame)
    writer.release()
    return path


@pytest.fixture()
def clip(tmp_path):
    return make_clip(tmp_path / "clip.avi")


def test_output_parses_with_zero_errors(clip, tmp_path):
    out = tmp_path / "keypoints.csv"
    job = ExtractionJob(video=str(clip), out=str(out), signer="cam0")
    result = extract_keypoints(job, estimator=StubEstimator())
    assert result.frames_decoded == 30
    assert result.frames_with_landmarks == 30

    seq = parse_keypoint_file(out)
    assert seq.source_kind == "pose2d"
    assert seq.up_axis == "-y"
    assert seq.signer == "cam0"
    assert len(seq.frames) == 30
    for frame in seq.frames:
        for joint, (x, y, z) in frame.positions.items():
            assert joint in CANONICAL_JOINTS
            assert z is None  # 2D source


def test_unmapped_landmarks_are_dropped(clip, tmp_path):
    out = tmp_path / "keypoints.csv"
    job = ExtractionJob(video=str(clip), out=str(out))
    extract_keypoints(job, estimator=StubEstimator(extra_keys=("face_10", "pose_0")))
    seq = parse_keypoint_file(out)
    emitted = {j for f in seq.frames for j in f.positions}
    assert emitted <= set(LANDMARK_TO_JOINT.values())
    # only 24 mapped keys in the stub: 4 pose + 20 right-hand
    assert len(seq.frames[0].positions) == 24


def test_confidences_recorded(clip, tmp_path):
    out = tmp_path / "keypoints.csv"
    extract_keypoints(
        ExtractionJob(video=str(clip), out=str(out)), estimator=StubEstimator()
    )
    seq = parse_keypoint_file(out)
    assert seq.frames[0].confidence["RightHand"] == pytest.approx(0.8)
    assert seq.frames[0].confidence["RightHandMiddle1"] == pytest.approx(1.0)


def test_frame_count_bounded_by_duration(tmp_path):
    clip = make_clip(tmp_path / "c.avi", n_frames=150, fps=30.0)
    out = tmp_path / "keypoints.csv"
    result = extract_keypoints(
        ExtractionJob(video=str(clip), out=str(out)), estimator=StubEstimator()
    )
    assert result.frames_decoded <= 150
    seq = parse_keypoint_file(out)
    assert len(seq.frames) <= 150
    # timestamps follow the container frame rate
    assert seq.frames[1].time_ms - seq.frames[0].time_ms == pytest.approx(1000.0 / 30.0)


def test_no_person_clip_emits_headers_only(clip, tmp_path, capsys):
    out = tmp_path / "keypoints.csv"
    result = extract_keypoints(
        ExtractionJob(video=str(clip), out=str(out)), estimator=StubEstimator(detect=False)
    )
    assert result.frames_with_landmarks == 0
    assert result.rows_written == 0
    assert "warning" in capsys.readouterr().err
    text = out.read_text()
    body = [l for l in text.splitlines() if l and not l.startswith("#")]
    assert body == []
    seq = parse_keypoint_file(text)
    assert len(seq.frames) == 0


def test_repeatability_identical_bytes(clip, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    extract_keypoints(ExtractionJob(video=str(clip), out=str(a)), estimator=StubEstimator())
    extract_keypoints(ExtractionJob(video=str(clip), out=str(b)), estimator=StubEstimator())
    assert a.read_bytes() == b.read_bytes()


def test_job_validation_and_defaults():
    job = ExtractionJob(video="v", out="o")
    assert job.detection_confidence == 0.5
    assert job.tracking_confidence == 0.5
    with pytest.raises(ExtractionError):
        ExtractionJob(video="v", out="o", detection_confidence=1.5)


def test_unreadable_video(tmp_path):
    with pytest.raises(UnreadableVideoError):
        extract_keypoints(
            ExtractionJob(video=str(tmp_path / "missing.avi"), out=str(tmp_path / "o.csv")),
            estimator=StubEstimator(),
        )
    bogus = tmp_path / "bogus.avi"
    bogus.write_bytes(b"not a video")
    with pytest.raises((UnreadableVideoError, NoFramesError)):
        extract_keypoints(
            ExtractionJob(video=str(bogus), out=str(tmp_path / "o.csv")),
            estimator=StubEstimator(),
        )


def test_supplied_estimator_is_not_closed(clip, tmp_path):
    est = StubEstimator()
    extract_keypoints(ExtractionJob(video=str(clip), out=str(tmp_path / "o.csv")), estimator=est)
    assert not est.closed  # caller owns its estimator's lifecycle


def test_cli_reports_missing_video(tmp_path, capsys):
    code = cli_main(["--video", str(tmp_path / "nope.avi"), "--out", str(tmp_path / "o.csv")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_cli_rejects_bad_confidence(tmp_path, capsys):
    code = cli_main([
        "--video", str(tmp_path / "nope.avi"), "--out", str(tmp_path / "o.csv"),
        "--det", "2.0",
    ])
    assert code == 1


def test_acceptance_extraction_conformance(tmp_path, capsys):
    """One pass/fail line for the extraction-conformance criterion."""
    try:
        clip = make_clip(tmp_path / "person.avi", n_frames=150, fps=30.0)  # 5 s at 30 fps
        out = tmp_path / "keypoints.csv"
        job = ExtractionJob(video=str(clip), out=str(out), signer="subject")
        assert job.detection_confidence == 0.5 and job.tracking_confidence == 0.5
        extract_keypoints(job, estimator=StubEstimator())

        seq = parse_keypoint_file(out)  # zero errors
        assert len(seq.frames) <= 150
        joints = {j for f in seq.frames for j in f.positions}
        assert joints and joints <= set(CANONICAL_JOINTS)
        assert set(LANDMARK_TO_JOINT.values()) == set(CANONICAL_JOINTS)
    except BaseException:
        print("[FAIL] extraction-conformance")
        raise
    print("[PASS] extraction-conformance")
