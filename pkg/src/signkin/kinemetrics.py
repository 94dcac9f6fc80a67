"""Per-token articulatory metrics: spatial extent, path length, velocity,
duration, and mean vertical position, aggregated over joint groups."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotation import SignInstance
from .errors import (
    ArgumentError,
    EmptyTrajectoryError,
    GapRatioExceededError,
    IntervalNotCoveredError,
    MissingJointsError,
)
from .skeleton import JointGroup, KeypointSequence

DEFAULT_CONFIDENCE_FLOOR = 0.5
DEFAULT_GAP_THRESHOLD = 0.25

METRIC_NAMES = ("spatial_extent", "path_length", "avg_velocity", "duration_s", "mean_vertical")


@dataclass(frozen=True)
class MetricRecord:
    instance: SignInstance
    group: str
    spatial_extent: float
    path_length: float
    avg_velocity: float
    duration_s: float
    mean_vertical: float
    mention_index: int | None = None

    def metric(self, name: str) -> float:
        return getattr(self, name)


def _as_array(traj) -> np.ndarray:
    arr = np.asarray(
        [[p[0], p[1], (p[2] if len(p) > 2 and p[2] is not None else 0.0)] for p in traj],
        dtype=float,
    )
    return arr


def spatial_extent(traj) -> float:
    """Diagonal of the axis-aligned bounding box of the trajectory."""
    if len(traj) == 0:
        raise EmptyTrajectoryError("spatial_extent of an empty trajectory")
    arr = _as_array(traj)
    ranges = arr.max(axis=0) - arr.min(axis=0)
    return float(np.sqrt(np.sum(ranges**2)))


def path_length(traj) -> float:
    """Cumulative Euclidean distance between consecutive positions."""
    if len(traj) == 0:
        raise EmptyTrajectoryError("path_length of an empty trajectory")
    arr = _as_array(traj)
    if len(arr) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(arr, axis=0), axis=1)))


def average_velocity(traj, duration_s: float) -> float:
    if duration_s <= 0:
        raise ArgumentError(f"duration must be positive, got {duration_s}")
    return path_length(traj) / duration_s


def mean_vertical(traj, up_axis: str) -> float:
    """Mean vertical position, sign-corrected so that larger means higher."""
    if len(traj) == 0:
        raise EmptyTrajectoryError("mean_vertical of an empty trajectory")
    arr = _as_array(traj)
    if up_axis == "+y":
        return float(arr[:, 1].mean())
    if up_axis == "-y":
        return float(-arr[:, 1].mean())
    if up_axis == "+z":
        return float(arr[:, 2].mean())
    raise ArgumentError(f"unknown up_axis {up_axis!r}")


def _joint_trajectory(frames, joint, confidence_floor, gap_threshold):
    """Gap-filled per-joint trajectory over the given frames, or None.

    A gap is a frame where the joint is missing or its confidence is below
    the floor. Interior gaps are linearly interpolated per coordinate;
    leading/trailing gaps clamp to the nearest valid frame. Returns None
    when the joint never appears or its gap fraction exceeds the threshold.
    """
    times = np.array([f.time_ms for f in frames], dtype=float)
    valid = []
    coords = np.zeros((len(frames), 3))
    has_z = False
    for i, f in enumerate(frames):
        pos = f.positions.get(joint)
        conf = f.confidence.get(joint)
        if pos is None or (conf is not None and conf < confidence_floor):
            continue
        valid.append(i)
        coords[i, 0], coords[i, 1] = pos[0], pos[1]
        if pos[2] is not None:
            coords[i, 2] = pos[2]
            has_z = True
    if not valid:
        return None
    gap_ratio = 1.0 - len(valid) / len(frames)
    if gap_ratio > gap_threshold:
        return None
    if len(valid) == len(frames):
        if not has_z:
            coords[:, 2] = 0.0
        return coords
    vi = np.array(valid)
    out = np.empty((len(frames), 3))
    for c in range(3):
        out[:, c] = np.interp(times, times[vi], coords[vi, c])
    if not has_z:
        out[:, 2] = 0.0
    return out


def compute_record(
    seq: KeypointSequence,
    instance: SignInstance,
    group: JointGroup,
    *,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
    gap_threshold: float = DEFAULT_GAP_THRESHOLD,
    mention_index: int | None = None,
    aggregate_trajectory: bool = False,
) -> MetricRecord:
    """Metrics for one sign token over one joint group.

    Default aggregation computes per-member-joint metrics and takes their
    unweighted mean; ``aggregate_trajectory`` instead averages member
    positions into one centroid trajectory first.
    """
    start_ms, end_ms = instance.interval
    frames = [f for f in seq.frames if start_ms <= f.time_ms <= end_ms]
    if not frames:
        raise IntervalNotCoveredError(
            f"interval [{start_ms}, {end_ms}] has no frames in the sequence"
        )
    present = [j for j in sorted(group.members) if any(j in f.positions for f in frames)]
    if not present:
        raise MissingJointsError(
            f"no member joint of group {group.label!r} appears in the interval"
        )
    trajectories = {}
    for joint in present:
        traj = _joint_trajectory(frames, joint, confidence_floor, gap_threshold)
        if traj is not None:
            trajectories[joint] = traj
    if not trajectories:
        raise GapRatioExceededError(
            f"every member joint of group {group.label!r} exceeds the "
            f"{gap_threshold:.0%} gap threshold in [{start_ms}, {end_ms}]"
        )
    duration_s = instance.duration_s
    if aggregate_trajectory:
        stacked = np.mean(np.stack(list(trajectories.values())), axis=0)
        trajectories = {"<centroid>": stacked}
    extents, paths, verticals = [], [], []
    for traj in trajectories.values():
        extents.append(spatial_extent(traj))
        paths.append(path_length(traj))
        verticals.append(mean_vertical(traj, seq.up_axis))
    ext = float(np.mean(extents))
    pl = float(np.mean(paths))
    return MetricRecord(
        instance=instance,
        group=group.label,
        spatial_extent=ext,
        path_length=pl,
        avg_velocity=pl / duration_s,
        duration_s=duration_s,
        mean_vertical=float(np.mean(verticals)),
        mention_index=mention_index,
    )


METRIC_TABLE_HEADER = (
    "gloss,variation,signer,condition,session,mention_index,group,"
    "spatial_extent,path_length,avg_velocity,duration_s,mean_vertical"
)


def record_to_row(rec: MetricRecord) -> str:
    i = rec.instance
    return ",".join(
        [
            i.gloss,
            i.variation,
            i.signer,
            i.condition,
            i.session,
            "" if rec.mention_index is None else str(rec.mention_index),
            rec.group.replace(" ", "_"),
            repr(rec.spatial_extent),
            repr(rec.path_length),
            repr(rec.avg_velocity),
            repr(rec.duration_s),
            repr(rec.mean_vertical),
        ]
    )


def parse_metric_table(stream, path=None) -> list[MetricRecord]:
    """Read back a metric table emitted with record_to_row.

    Intervals are not stored in the table; reconstructed instances carry a
    synthetic [0, duration] interval, which preserves duration_s.
    """
    if isinstance(stream, (str, bytes)) and "\n" not in str(stream):
        with open(stream, encoding="utf-8") as fh:
            return parse_metric_table(fh, path=stream)
    lines = (stream if isinstance(stream, str) else stream.read()).splitlines()
    records = []
    header_seen = False
    from .errors import ParseError

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != METRIC_TABLE_HEADER:
                raise ParseError(f"unexpected metric table header {line!r}", line=lineno, path=path)
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 12:
            raise ParseError(f"expected 12 columns, got {len(parts)}", line=lineno, path=path)
        (gloss, variation, signer, condition, session, mention, group,
         ext, pl, vel, dur, vert) = parts
        duration_s = float(dur)
        inst = SignInstance(gloss, variation, signer, 0.0, duration_s * 1000.0, condition, session)
        records.append(
            MetricRecord(
                instance=inst,
                group=group.replace("_", " "),
                spatial_extent=float(ext),
                path_length=float(pl),
                avg_velocity=float(vel),
                duration_s=duration_s,
                mean_vertical=float(vert),
                mention_index=int(mention) if mention else None,
            )
        )
    if not header_seen:
        raise ParseError("missing metric table header", path=path)
    return records
