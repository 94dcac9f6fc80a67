"""Canonical joint model and keypoint file I/O.

The canonical skeleton has 46 joints (23 per side): the arm chain
(Arm, ForeArm, Hand) plus 20 finger/thumb joints per hand. Keypoint
files are line-oriented UTF-8 text with ``#key=value`` header lines
followed by ``time_ms,joint,x,y,z,confidence`` body rows; 2D sources
leave the z column empty.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field

from .errors import (
    ArgumentError,
    IncompleteMappingError,
    MalformedHeaderError,
    MixedDimensionError,
    NonMonotoneTimestampError,
    ParseError,
    UnknownJointError,
)

_FINGER_BASES = [
    ("Middle1", "Middle2", "Middle3", "Middle4"),
    ("Ring", "Ring1", "Ring2", "Ring4"),
    ("Pinky", "Pinky1", "Pinky2", "Pinky4"),
    ("Index", "Index1", "Index2", "Index4"),
    ("Thumb1", "Thumb2", "Thumb3", "Thumb4"),
]


def _side_joints(side: str) -> list[str]:
    joints = [f"{side}Arm", f"{side}ForeArm", f"{side}Hand"]
    for chain in _FINGER_BASES:
        joints.extend(f"{side}Hand{name}" for name in chain)
    return joints


RIGHT_JOINTS = tuple(_side_joints("Right"))
LEFT_JOINTS = tuple(_side_joints("Left"))
CANONICAL_JOINTS = RIGHT_JOINTS + LEFT_JOINTS
CANONICAL_JOINT_SET = frozenset(CANONICAL_JOINTS)

SOURCE_KINDS = ("mocap3d", "pose2d")
UP_AXES = ("+y", "-y", "+z")


@dataclass(frozen=True)
class JointGroup:
    """A named set of canonical joints aggregated to one metric row."""

    label: str
    members: frozenset[str]


def _fingers(side: str) -> frozenset[str]:
    return frozenset(j for j in _side_joints(side) if "Hand" in j and j != f"{side}Hand")


# Row order follows the reduction table layout: Fingers, Hand, Forearm, Arm,
# left before right within each pair.
JOINT_GROUPS: dict[str, JointGroup] = {
    g.label: g
    for g in [
        JointGroup("Fingers (L)", _fingers("Left")),
        JointGroup("Fingers (R)", _fingers("Right")),
        JointGroup("Hand (L)", frozenset({"LeftHand"})),
        JointGroup("Hand (R)", frozenset({"RightHand"})),
        JointGroup("Forearm (L)", frozenset({"LeftForeArm"})),
        JointGroup("Forearm (R)", frozenset({"RightForeArm"})),
        JointGroup("Arm (L)", frozenset({"LeftArm"})),
        JointGroup("Arm (R)", frozenset({"RightArm"})),
    ]
}

GROUP_ORDER = tuple(JOINT_GROUPS)


@dataclass(frozen=True)
class Frame:
    """One sampled time point: positions (x, y, z-or-None) and optional confidences."""

    time_ms: float
    positions: dict[str, tuple[float, float, float | None]]
    confidence: dict[str, float | None] = field(default_factory=dict)


@dataclass(frozen=True)
class KeypointSequence:
    frames: tuple[Frame, ...]
    frame_rate: float
    source_kind: str
    up_axis: str
    unit_label: str = "unknown"
    signer: str | None = None
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.frame_rate <= 0:
            raise ArgumentError(f"frame_rate must be positive, got {self.frame_rate}")
        if self.source_kind not in SOURCE_KINDS:
            raise ArgumentError(f"unknown source_kind {self.source_kind!r}")
        if self.up_axis not in UP_AXES:
            raise ArgumentError(f"unknown up_axis {self.up_axis!r}")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def timestamps(self) -> list[float]:
        return [f.time_ms for f in self.frames]


@dataclass(frozen=True)
class LandmarkMapping:
    """Bijective map from pose-landmark keys to the 46 canonical joints."""

    entries: dict[str, str]

    def __post_init__(self):
        joints = set(self.entries.values())
        if joints != set(CANONICAL_JOINT_SET) or len(self.entries) != len(CANONICAL_JOINTS):
            missing = sorted(CANONICAL_JOINT_SET - joints)
            raise IncompleteMappingError(
                f"mapping must cover all 46 canonical joints exactly once; missing: {missing}"
            )

    def inverse(self) -> dict[str, str]:
        return {joint: key for key, joint in self.entries.items()}


def load_mapping_file(path) -> LandmarkMapping:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected 'landmark_key,joint_name', got {line!r}", line=lineno, path=path)
            entries[parts[0].strip()] = parts[1].strip()
    return LandmarkMapping(entries)


def default_mapping() -> LandmarkMapping:
    """The bundled pose-landmark correspondence table."""
    ref = importlib.resources.files("signkin.data") / "landmark_mapping.csv"
    entries = {}
    for line in ref.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, joint = line.split(",")
        entries[key] = joint
    return LandmarkMapping(entries)


_REQUIRED_HEADERS = ("frame_rate", "source_kind", "up_axis")


def _fmt(v: float) -> str:
    # repr round-trips exactly, which keeps parse -> serialize a fixed point.
    return repr(float(v))


def parse_keypoint_file(stream, path=None) -> KeypointSequence:
    """Parse a keypoint file from a text stream, file path, or string content."""
    if isinstance(stream, os.PathLike) or (
        isinstance(stream, (str, bytes)) and "\n" not in str(stream)
    ):
        with open(stream, encoding="utf-8") as fh:
            return parse_keypoint_file(fh, path=str(stream))
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()

    headers: dict[str, str] = {}
    frames: list[Frame] = []
    cur_time: float | None = None
    cur_pos: dict = {}
    cur_conf: dict = {}

    def flush():
        if cur_time is not None:
            frames.append(Frame(cur_time, dict(cur_pos), dict(cur_conf)))

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if frames or cur_time is not None:
                raise MalformedHeaderError("header line after body rows", line=lineno, path=path)
            if "=" not in line:
                raise MalformedHeaderError(f"expected '#key=value', got {line!r}", line=lineno, path=path)
            key, _, value = line[1:].partition("=")
            headers[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise ParseError(f"expected 6 columns, got {len(parts)}", line=lineno, path=path)
        t_str, joint, x_str, y_str, z_str, c_str = (p.strip() for p in parts)
        if joint not in CANONICAL_JOINT_SET:
            raise UnknownJointError(f"unknown joint name {joint!r}", line=lineno, path=path)
        source_kind = headers.get("source_kind")
        if source_kind == "pose2d" and z_str != "":
            raise MixedDimensionError("z coordinate present in a pose2d file", line=lineno, path=path)
        if source_kind == "mocap3d" and z_str == "":
            raise MixedDimensionError("missing z coordinate in a mocap3d file", line=lineno, path=path)
        try:
            t = float(t_str)
            x = float(x_str)
            y = float(y_str)
            z = float(z_str) if z_str != "" else None
            conf = float(c_str) if c_str != "" else None
        except ValueError as exc:
            raise ParseError(f"non-numeric field: {exc}", line=lineno, path=path) from None
        if cur_time is None or t != cur_time:
            if cur_time is not None and t < cur_time:
                raise NonMonotoneTimestampError(
                    f"timestamp {t} precedes previous {cur_time}", line=lineno, path=path
                )
            flush()
            cur_time, cur_pos, cur_conf = t, {}, {}
        cur_pos[joint] = (x, y, z)
        if conf is not None:
            cur_conf[joint] = conf
    flush()

    for key in _REQUIRED_HEADERS:
        if key not in headers:
            raise MalformedHeaderError(f"missing required header #{key}=", path=path)
    try:
        frame_rate = float(headers["frame_rate"])
    except ValueError:
        raise MalformedHeaderError(f"non-numeric frame_rate {headers['frame_rate']!r}", path=path) from None
    # config_digest is run provenance written by the batch front end, not data.
    known = {"frame_rate", "source_kind", "up_axis", "unit_label", "signer", "config_digest"}
    meta = {k: v for k, v in headers.items() if k not in known}
    try:
        return KeypointSequence(
            frames=tuple(frames),
            frame_rate=frame_rate,
            source_kind=headers["source_kind"],
            up_axis=headers["up_axis"],
            unit_label=headers.get("unit_label", "unknown"),
            signer=headers.get("signer"),
            meta=meta,
        )
    except ArgumentError as exc:
        raise MalformedHeaderError(str(exc), path=path) from None


def serialize_keypoint_sequence(seq: KeypointSequence) -> str:
    lines = [
        f"#frame_rate={_fmt(seq.frame_rate)}",
        f"#source_kind={seq.source_kind}",
        f"#up_axis={seq.up_axis}",
        f"#unit_label={seq.unit_label}",
    ]
    if seq.signer is not None:
        lines.append(f"#signer={seq.signer}")
    for key in sorted(seq.meta):
        lines.append(f"#{key}={seq.meta[key]}")
    for frame in seq.frames:
        for joint in sorted(frame.positions):
            x, y, z = frame.positions[joint]
            conf = frame.confidence.get(joint)
            lines.append(
                ",".join(
                    [
                        _fmt(frame.time_ms),
                        joint,
                        _fmt(x),
                        _fmt(y),
                        _fmt(z) if z is not None else "",
                        _fmt(conf) if conf is not None else "",
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def map_pose_landmarks(raw_frames, mapping: LandmarkMapping, *, frame_rate: float,
                       unit_label: str = "normalized-image", signer: str | None = None) -> KeypointSequence:
    """Rename pose-estimator landmarks to canonical joints; drop unmapped keys.

    ``raw_frames`` is an iterable of ``(time_ms, {landmark_key: (x, y) or
    (x, y, confidence)})``. 2D image coordinates grow downward, so the
    output declares ``up_axis=-y``.
    """
    frames = []
    for time_ms, landmarks in raw_frames:
        positions: dict[str, tuple[float, float, float | None]] = {}
        confidence: dict[str, float | None] = {}
        for key, value in landmarks.items():
            joint = mapping.entries.get(key)
            if joint is None:
                continue
            if len(value) == 3:
                x, y, conf = value
            else:
                x, y = value
                conf = None
            positions[joint] = (float(x), float(y), None)
            confidence[joint] = float(conf) if conf is not None else None
        frames.append(Frame(float(time_ms), positions, confidence))
    return KeypointSequence(
        frames=tuple(frames),
        frame_rate=frame_rate,
        source_kind="pose2d",
        up_axis="-y",
        unit_label=unit_label,
        signer=signer,
    )


def slice_interval(seq: KeypointSequence, interval) -> KeypointSequence:
    """Frames with start_ms <= t <= end_ms (inclusive); metadata preserved."""
    start_ms, end_ms = interval
    if start_ms >= end_ms:
        raise ArgumentError(f"inverted interval [{start_ms}, {end_ms}]")
    kept = tuple(f for f in seq.frames if start_ms <= f.time_ms <= end_ms)
    return KeypointSequence(
        frames=kept,
        frame_rate=seq.frame_rate,
        source_kind=seq.source_kind,
        up_axis=seq.up_axis,
        unit_label=seq.unit_label,
        signer=seq.signer,
        meta=dict(seq.meta),
    )
