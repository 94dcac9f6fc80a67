"""Deterministic synthetic-session generator.

Produces keypoint sequences, annotations, and embedding tokens with known
ground truth: token k of every gloss is a sinusoidal arc scaled by
(1 - reduction_rate)^(k-1), the non-dominant side can be zeroed from a
given mention onward (weak drop), and the student's embedding vectors
interpolate toward the instructor's at a configurable coupling. A truth
table of expected per-token metrics is emitted alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .annotation import SignInstance, serialize_annotations
from .entrain import EmbeddingToken, serialize_embedding_file
from .errors import ArgumentError
from .skeleton import (
    CANONICAL_JOINTS,
    GROUP_ORDER,
    JOINT_GROUPS,
    Frame,
    KeypointSequence,
    LEFT_JOINTS,
)

INSTRUCTOR = "instructor"
STUDENT = "student"
SESSION_ID = "synth"


@dataclass(frozen=True)
class SynthSpec:
    glosses: int = 5
    mentions: int = 6
    reduction_rate: float = 0.1
    entrain_coupling: float = 0.0
    weak_drop_mention: int | None = None
    seed: int = 0
    frame_rate: float = 120.0
    token_ms: float = 500.0
    gap_ms: float = 250.0
    dialogue_duration_scale: float = 1.0
    embed_dim: int = 8
    # 0 makes every gloss's trajectory identical (bit-exact percent-change
    # ties across glosses); > 0 varies the arc shape so window embeddings
    # separate glosses.
    gloss_shape_variation: float = 0.0
    include_vocab: bool = True
    unit_label: str = "millimeters"

    def __post_init__(self):
        if not 0.0 <= self.reduction_rate < 1.0:
            raise ArgumentError("reduction_rate must be in [0, 1)")
        if not 0.0 <= self.entrain_coupling <= 1.0:
            raise ArgumentError("entrain_coupling must be in [0, 1]")
        if self.glosses < 1 or self.mentions < 1:
            raise ArgumentError("need at least one gloss and one mention")

    def gloss_names(self) -> list[str]:
        return [f"gloss{g:02d}" for g in range(self.glosses)]


@dataclass
class SynthSession:
    spec: SynthSpec
    sequences: dict[tuple[str, str], KeypointSequence]
    annotations: list[SignInstance]
    tokens: list[EmbeddingToken]
    truth_rows: list[dict] = field(default_factory=list)


def _rest_positions(rng) -> dict[str, np.ndarray]:
    rest = {}
    for j, joint in enumerate(CANONICAL_JOINTS):
        side = -1.0 if joint.startswith("Left") else 1.0
        rest[joint] = np.array(
            [side * (200.0 + 10.0 * (j % 23)), 1000.0 + 5.0 * (j % 23), 50.0 + rng.uniform(0, 20)]
        )
    return rest


def _displacement(u, amp, arc_amp, shape_amp, scale):
    """Arc displacement at phase u in [0, 1]: a vertical half-period sine
    plus an optional horizontal full-period component for shape identity."""
    dy = arc_amp * np.sin(np.pi * u)
    dx = shape_amp * np.sin(2.0 * np.pi * u)
    return np.stack([amp * scale * dx, amp * scale * dy, np.zeros_like(u)], axis=-1)


def _token_frames(n_frames, joints, rest, amps, arc_amp, shape_amp, scale, dropped):
    u = np.arange(n_frames) / max(1, n_frames - 1)
    out = {}
    for joint in joints:
        if joint in dropped:
            out[joint] = np.zeros((n_frames, 3))
        else:
            out[joint] = rest[joint] + _displacement(u, amps[joint], arc_amp, shape_amp, scale)
    return out


def _truth_from_arrays(positions: dict[str, np.ndarray], duration_s: float):
    """Direct per-group metric recomputation from raw arrays (the oracle)."""
    rows = {}
    for group in GROUP_ORDER:
        members = sorted(JOINT_GROUPS[group].members)
        exts, paths, verts = [], [], []
        for joint in members:
            arr = positions[joint]
            ranges = arr.max(axis=0) - arr.min(axis=0)
            exts.append(float(np.sqrt((ranges**2).sum())))
            paths.append(float(np.linalg.norm(np.diff(arr, axis=0), axis=1).sum()))
            verts.append(float(arr[:, 1].mean()))
        rows[group] = {
            "spatial_extent": float(np.mean(exts)),
            "path_length": float(np.mean(paths)),
            "avg_velocity": float(np.mean(paths)) / duration_s,
            "duration_s": duration_s,
            "mean_vertical": float(np.mean(verts)),
        }
    return rows


def generate_session(spec: SynthSpec) -> SynthSession:
    rng = np.random.default_rng(spec.seed)
    rest = _rest_positions(rng)
    amps = {joint: rng.uniform(0.5, 1.5) for joint in CANONICAL_JOINTS}
    frame_ms = 1000.0 / spec.frame_rate
    arc_amp = 100.0
    glosses = spec.gloss_names()
    shape_amp = {
        g: spec.gloss_shape_variation * arc_amp * (i + 1) / len(glosses)
        for i, g in enumerate(glosses)
    }

    dial_intervals = max(1, round((spec.token_ms / 1000.0) * spec.frame_rate
                                  * spec.dialogue_duration_scale))
    vocab_intervals = max(1, round((spec.token_ms / 1000.0) * spec.frame_rate))
    gap_frames = max(1, round((spec.gap_ms / 1000.0) * spec.frame_rate))

    annotations: list[SignInstance] = []
    sequences: dict[tuple[str, str], KeypointSequence] = {}
    truth_rows: list[dict] = []

    def build_track(signer, condition, plan):
        """plan: list of (gloss, mention_index, n_frames, scale, dropped)."""
        frames: list[Frame] = []
        cursor = 0  # global frame index
        for gloss, k, n_frames, scale, dropped in plan:
            pos = _token_frames(
                n_frames, CANONICAL_JOINTS, rest, amps, arc_amp, shape_amp[gloss], scale, dropped
            )
            start_ms = cursor * frame_ms
            end_ms = (cursor + n_frames - 1) * frame_ms
            inst = SignInstance(gloss, "v1", signer, start_ms, end_ms, condition, SESSION_ID)
            annotations.append(inst)
            duration_s = (end_ms - start_ms) / 1000.0
            token_truth = _truth_from_arrays(pos, duration_s)
            for group in GROUP_ORDER:
                truth_rows.append(
                    {
                        "signer": signer,
                        "condition": condition,
                        "gloss": gloss,
                        "mention_index": k,
                        "group": group,
                        **token_truth[group],
                        "expected_pct_reduction": 100.0 * (1.0 - scale),
                    }
                )
            for i in range(n_frames):
                t = (cursor + i) * frame_ms
                frames.append(
                    Frame(t, {j: tuple(map(float, pos[j][i])) for j in CANONICAL_JOINTS}, {})
                )
            cursor += n_frames
            for i in range(gap_frames):
                t = (cursor + i) * frame_ms
                frames.append(
                    Frame(t, {j: tuple(map(float, rest[j])) for j in CANONICAL_JOINTS}, {})
                )
            cursor += gap_frames
        sequences[(signer, condition)] = KeypointSequence(
            frames=tuple(frames),
            frame_rate=spec.frame_rate,
            source_kind="mocap3d",
            up_axis="+y",
            unit_label=spec.unit_label,
            signer=signer,
            meta={"condition": condition},
        )

    dropped_left = frozenset(LEFT_JOINTS)
    for signer in (INSTRUCTOR, STUDENT):
        plan = []
        for k in range(1, spec.mentions + 1):
            scale = (1.0 - spec.reduction_rate) ** (k - 1)
            dropped = (
                dropped_left
                if spec.weak_drop_mention is not None and k >= spec.weak_drop_mention
                else frozenset()
            )
            for gloss in glosses:
                plan.append((gloss, k, dial_intervals + 1, scale, dropped))
        build_track(signer, "dialogue", plan)

    if spec.include_vocab:
        plan = [(gloss, 1, vocab_intervals + 1, 1.0, frozenset()) for gloss in glosses]
        build_track(STUDENT, "vocabulary", plan)

    tokens = _embedding_tokens(spec, rng, annotations)
    return SynthSession(spec, sequences, annotations, tokens, truth_rows)


def _unit(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _embedding_tokens(spec, rng, annotations) -> list[EmbeddingToken]:
    glosses = spec.gloss_names()
    u = {g: _unit(rng, spec.embed_dim) for g in glosses}  # instructor anchors
    w = {g: _unit(rng, spec.embed_dim) for g in glosses}  # student starting points
    intervals = {
        (a.signer, a.gloss): sorted(
            [b.interval for b in annotations
             if b.signer == a.signer and b.gloss == a.gloss and b.condition == "dialogue"]
        )
        for a in annotations
        if a.condition == "dialogue"
    }
    tokens = []
    for g in glosses:
        for signer in (INSTRUCTOR, STUDENT):
            spans = intervals.get((signer, g), [])
            for k, (start_ms, end_ms) in enumerate(spans, start=1):
                if signer == INSTRUCTOR:
                    vec = u[g]
                else:
                    frac = 0.0 if len(spans) == 1 else (k - 1) / (len(spans) - 1)
                    step = min(1.0, spec.entrain_coupling * frac)
                    v = w[g] + step * (u[g] - w[g])
                    vec = v / np.linalg.norm(v)
                tokens.append(EmbeddingToken(g, signer, k, start_ms, end_ms, vec))
    return tokens


TRUTH_HEADER = (
    "signer,condition,gloss,mention_index,group,"
    "spatial_extent,path_length,avg_velocity,duration_s,mean_vertical,expected_pct_reduction"
)


def serialize_truth(rows) -> str:
    lines = [TRUTH_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r["signer"],
                    r["condition"],
                    r["gloss"],
                    str(r["mention_index"]),
                    r["group"].replace(" ", "_"),
                    repr(r["spatial_extent"]),
                    repr(r["path_length"]),
                    repr(r["avg_velocity"]),
                    repr(r["duration_s"]),
                    repr(r["mean_vertical"]),
                    repr(r["expected_pct_reduction"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def write_session(session: SynthSession, out_dir, *, header_comment: str | None = None) -> list[Path]:
    """Write the session's keypoint, annotation, embedding, and truth files."""
    from .skeleton import serialize_keypoint_sequence

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = (header_comment + "\n") if header_comment else ""
    written = []

    def emit(name, text):
        path = out_dir / name
        path.write_text(prefix + text, encoding="utf-8")
        written.append(path)

    for (signer, condition) in sorted(session.sequences):
        emit(
            f"keypoints_{signer}_{condition}.csv",
            serialize_keypoint_sequence(session.sequences[(signer, condition)]),
        )
    emit("annotations.csv", serialize_annotations(session.annotations))
    emit("embeddings.csv", serialize_embedding_file(session.tokens))
    emit("truth.csv", serialize_truth(session.truth_rows))
    return written
