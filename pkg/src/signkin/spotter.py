"""Continuous sign-spotting evaluation: sliding windows, cosine ranking,
temporal IoU gating, recall@k and MRR, plus a deterministic kinematic
window embedder for runs without neural encoders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, EmptyCorpusError, EmptyTrajectoryError
from .kinemetrics import _joint_trajectory
from .skeleton import JOINT_GROUPS, KeypointSequence

DEFAULT_WIDTH_MS = 500.0
DEFAULT_STRIDE_MS = 500.0
DEFAULT_IOU_THRESHOLD = 0.3
DEFAULT_KS = (10, 50)
DEFAULT_RESAMPLE = 16

# Both hands plus all finger joints: the primary articulators.
DEFAULT_EMBED_JOINTS = tuple(
    sorted(
        JOINT_GROUPS["Hand (L)"].members
        | JOINT_GROUPS["Hand (R)"].members
        | JOINT_GROUPS["Fingers (L)"].members
        | JOINT_GROUPS["Fingers (R)"].members
    )
)


@dataclass
class Window:
    start_ms: float
    end_ms: float
    embedding: np.ndarray | None = None  # None marks a stationary window

    @property
    def interval(self):
        return (self.start_ms, self.end_ms)


@dataclass(frozen=True)
class RankedWindow:
    rank: int
    start_ms: float
    end_ms: float
    similarity: float
    iou: float
    matched: bool


@dataclass(frozen=True)
class QueryReport:
    gloss: str
    ranked: tuple[RankedWindow, ...]
    mrr: float
    recall_at: dict[int, float]
    truth_recall_at: dict[int, float]
    n_truth: int


@dataclass(frozen=True)
class SpottingReport:
    queries: tuple[QueryReport, ...]
    mrr: float
    recall_at: dict[int, float]
    truth_recall_at: dict[int, float]
    pooled: bool = False


def make_windows(total_ms: float, width_ms: float = DEFAULT_WIDTH_MS,
                 stride_ms: float = DEFAULT_STRIDE_MS) -> list[Window]:
    """Windows at starts 0, stride, 2*stride, ... while start + width <= total."""
    if width_ms <= 0 or stride_ms <= 0:
        raise ArgumentError("width and stride must be positive")
    if total_ms < width_ms:
        raise EmptyCorpusError(
            f"sequence of {total_ms} ms is shorter than one {width_ms} ms window"
        )
    count = int(math.floor((total_ms - width_ms) / stride_ms)) + 1
    return [Window(i * stride_ms, i * stride_ms + width_ms) for i in range(count)]


def interval_iou(a, b) -> float:
    """Intersection over union of two time intervals; 0 when disjoint."""
    (a0, a1), (b0, b1) = a, b
    inter = min(a1, b1) - max(a0, b0)
    if inter <= 0:
        return 0.0
    union = max(a1, b1) - min(a0, b0)
    return inter / union


def kinematic_embed(
    seq: KeypointSequence,
    interval,
    *,
    resample: int = DEFAULT_RESAMPLE,
    joints=DEFAULT_EMBED_JOINTS,
    confidence_floor: float = 0.5,
) -> np.ndarray | None:
    """Deterministic window embedding: slice, resample each joint to a fixed
    frame count, center on the first frame per joint, flatten, L2-normalize.

    Returns None for a fully stationary window (zero vector after
    centering); such windows are excluded from ranking.
    """
    start_ms, end_ms = interval
    if start_ms >= end_ms:
        raise ArgumentError(f"inverted interval [{start_ms}, {end_ms}]")
    frames = [f for f in seq.frames if start_ms <= f.time_ms <= end_ms]
    if not frames:
        raise EmptyTrajectoryError(f"no frames in [{start_ms}, {end_ms}]")
    times = np.array([f.time_ms for f in frames])
    grid = np.linspace(times[0], times[-1], resample)
    parts = []
    for joint in joints:
        traj = _joint_trajectory(frames, joint, confidence_floor, gap_threshold=1.0)
        if traj is None:
            parts.append(np.zeros((resample, 3)))
            continue
        res = np.empty((resample, 3))
        for c in range(3):
            res[:, c] = np.interp(grid, times, traj[:, c])
        parts.append(res - res[0])
    flat = np.concatenate([p.ravel() for p in parts])
    norm = float(np.linalg.norm(flat))
    if norm < 1e-12:
        return None
    return flat / norm


def embed_windows(seq: KeypointSequence, windows, **kwargs) -> list[Window]:
    for w in windows:
        w.embedding = kinematic_embed(seq, w.interval, **kwargs)
    return windows


def rank_and_score(
    query_vector: np.ndarray,
    windows,
    truth_intervals,
    *,
    gloss: str = "",
    ks=DEFAULT_KS,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> QueryReport:
    """Rank windows by cosine similarity to the query and gate matches by
    temporal IoU against any truth interval.

    recall@k divides the number of matched top-k windows by k (the
    precision-shaped definition used by the evaluation protocol);
    truth_recall@k is the conventional matched-truths / total-truths.
    MRR averages 1/rank over all matched windows in the full ranking.
    """
    query_vector = np.asarray(query_vector, dtype=float)
    candidates = [w for w in windows if w.embedding is not None]
    if not candidates:
        raise EmptyCorpusError("no non-stationary windows to rank")
    for w in candidates:
        if len(w.embedding) != len(query_vector):
            raise ArgumentError(
                f"window embedding dim {len(w.embedding)} != query dim {len(query_vector)}"
            )
    qn = float(np.linalg.norm(query_vector))
    if qn == 0:
        raise ArgumentError("zero query vector")
    scored = []
    for w in candidates:
        sim = float(w.embedding @ query_vector / (np.linalg.norm(w.embedding) * qn))
        scored.append((sim, w))
    scored.sort(key=lambda t: (-t[0], t[1].start_ms))

    ranked = []
    truth = list(truth_intervals)
    for rank, (sim, w) in enumerate(scored, start=1):
        best_iou = max((interval_iou(w.interval, t) for t in truth), default=0.0)
        ranked.append(
            RankedWindow(rank, w.start_ms, w.end_ms, sim, best_iou, best_iou >= iou_threshold)
        )
    matched_ranks = [r.rank for r in ranked if r.matched]
    mrr = float(np.mean([1.0 / r for r in matched_ranks])) if matched_ranks else 0.0
    recall_at = {}
    truth_recall_at = {}
    for k in ks:
        top = [r for r in ranked if r.rank <= k]
        recall_at[k] = sum(r.matched for r in top) / k
        matched_truths = {
            i for i, t in enumerate(truth)
            for r in top
            if interval_iou((r.start_ms, r.end_ms), t) >= iou_threshold
        }
        truth_recall_at[k] = len(matched_truths) / len(truth) if truth else 0.0
    return QueryReport(
        gloss=gloss,
        ranked=tuple(ranked),
        mrr=mrr,
        recall_at=recall_at,
        truth_recall_at=truth_recall_at,
        n_truth=len(truth),
    )


def aggregate_reports(reports, *, pooled: bool = False) -> SpottingReport:
    """Mean per-query scores (default) or pooled MRR over all matched
    windows across queries."""
    reports = tuple(reports)
    if not reports:
        raise EmptyCorpusError("no queries")
    ks = sorted(reports[0].recall_at)
    if pooled:
        recips = [1.0 / r.rank for q in reports for r in q.ranked if r.matched]
        mrr = float(np.mean(recips)) if recips else 0.0
    else:
        mrr = float(np.mean([q.mrr for q in reports]))
    recall_at = {k: float(np.mean([q.recall_at[k] for q in reports])) for k in ks}
    truth_recall_at = {k: float(np.mean([q.truth_recall_at[k] for q in reports])) for k in ks}
    return SpottingReport(reports, mrr, recall_at, truth_recall_at, pooled=pooled)
