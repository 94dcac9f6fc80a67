import math

import numpy as np
import pytest

from signkin.annotation import assign_mention_indices
from signkin.entrain import cosine, delta_cos
from signkin.errors import ArgumentError
from signkin.kinemetrics import compute_record
from signkin.skeleton import GROUP_ORDER, JOINT_GROUPS, parse_keypoint_file
from signkin.synth import (
    INSTRUCTOR,
    STUDENT,
    SynthSpec,
    generate_session,
    serialize_truth,
    write_session,
)


def _small_spec(**kw):
    defaults = dict(glosses=2, mentions=3, frame_rate=40.0, seed=1)
    defaults.update(kw)
    return SynthSpec(**defaults)


def test_spec_validation():
    with pytest.raises(ArgumentError):
        SynthSpec(reduction_rate=1.0)
    with pytest.raises(ArgumentError):
        SynthSpec(entrain_coupling=1.5)
    with pytest.raises(ArgumentError):
        SynthSpec(glosses=0)


def test_session_structure():
    spec = _small_spec()
    session = generate_session(spec)
    assert set(session.sequences) == {
        (INSTRUCTOR, "dialogue"),
        (STUDENT, "dialogue"),
        (STUDENT, "vocabulary"),
    }
    dialogue = [a for a in session.annotations if a.condition == "dialogue"]
    vocab = [a for a in session.annotations if a.condition == "vocabulary"]
    assert len(dialogue) == 2 * 2 * 3  # signers x glosses x mentions
    assert len(vocab) == 2
    # 8 groups per token in the truth table
    assert len(session.truth_rows) == (len(dialogue) + len(vocab)) * 8


def test_determinism():
    a = generate_session(_small_spec())
    b = generate_session(_small_spec())
    assert a.annotations == b.annotations
    assert a.truth_rows == b.truth_rows
    for key in a.sequences:
        assert a.sequences[key] == b.sequences[key]
    for ta, tb in zip(a.tokens, b.tokens):
        assert np.array_equal(ta.vector, tb.vector)


def test_pipeline_metrics_match_truth_exactly():
    spec = _small_spec()
    session = generate_session(spec)
    seq = session.sequences[(INSTRUCTOR, "dialogue")]
    insts = [a for a in session.annotations
             if a.signer == INSTRUCTOR and a.condition == "dialogue"]
    indices = assign_mention_indices(insts)
    truth = {
        (r["gloss"], r["mention_index"], r["group"]): r
        for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["condition"] == "dialogue"
    }
    for inst, k in zip(insts, indices):
        for group in GROUP_ORDER:
            rec = compute_record(seq, inst, JOINT_GROUPS[group], mention_index=k)
            row = truth[(inst.gloss, k, group)]
            for metric in ("spatial_extent", "path_length", "avg_velocity",
                           "duration_s", "mean_vertical"):
                assert rec.metric(metric) == pytest.approx(row[metric], rel=1e-12), (
                    inst.gloss, k, group, metric
                )


def test_identical_gloss_trajectories_by_default():
    session = generate_session(_small_spec())
    rows = {
        (r["gloss"], r["mention_index"]): r["path_length"]
        for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["condition"] == "dialogue"
        and r["group"] == "Hand (R)"
    }
    for k in (1, 2, 3):
        assert rows[("gloss00", k)] == rows[("gloss01", k)]  # bit-identical


def test_shape_variation_separates_glosses():
    session = generate_session(_small_spec(gloss_shape_variation=0.5))
    rows = {
        (r["gloss"], r["mention_index"]): r["path_length"]
        for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["condition"] == "dialogue"
        and r["group"] == "Hand (R)"
    }
    assert rows[("gloss00", 1)] != rows[("gloss01", 1)]


def test_reduction_follows_geometric_scaling():
    spec = _small_spec(reduction_rate=0.2)
    session = generate_session(spec)
    rows = [
        r for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["condition"] == "dialogue"
        and r["gloss"] == "gloss00" and r["group"] == "Hand (R)"
    ]
    rows.sort(key=lambda r: r["mention_index"])
    base = rows[0]["path_length"]
    for r in rows:
        expected = base * 0.8 ** (r["mention_index"] - 1)
        assert r["path_length"] == pytest.approx(expected, rel=1e-12)
        assert r["expected_pct_reduction"] == pytest.approx(
            100.0 * (1 - 0.8 ** (r["mention_index"] - 1))
        )


def test_weak_drop_zeroes_left_side_from_given_mention():
    session = generate_session(_small_spec(weak_drop_mention=2))
    left = {
        r["mention_index"]: r
        for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["condition"] == "dialogue"
        and r["gloss"] == "gloss00" and r["group"] == "Hand (L)"
    }
    assert left[1]["path_length"] > 0
    assert left[2]["path_length"] == 0.0
    assert left[3]["spatial_extent"] == 0.0
    assert left[2]["mean_vertical"] == 0.0
    right = [
        r for r in session.truth_rows
        if r["signer"] == INSTRUCTOR and r["gloss"] == "gloss00"
        and r["condition"] == "dialogue" and r["group"] == "Hand (R)"
    ]
    assert all(r["path_length"] > 0 for r in right)


def test_vocab_tokens_are_full_scale():
    session = generate_session(_small_spec(reduction_rate=0.3))
    vocab = {
        r["gloss"]: r for r in session.truth_rows
        if r["condition"] == "vocabulary" and r["group"] == "Hand (R)"
    }
    first_dialogue = {
        r["gloss"]: r for r in session.truth_rows
        if r["condition"] == "dialogue" and r["signer"] == STUDENT
        and r["mention_index"] == 1 and r["group"] == "Hand (R)"
    }
    for g, row in vocab.items():
        assert row["path_length"] == pytest.approx(first_dialogue[g]["path_length"], rel=1e-12)


def test_dialogue_duration_scale():
    session = generate_session(_small_spec(dialogue_duration_scale=0.75))
    dial = next(r for r in session.truth_rows if r["condition"] == "dialogue")
    voc = next(r for r in session.truth_rows if r["condition"] == "vocabulary")
    assert dial["duration_s"] == pytest.approx(0.75 * voc["duration_s"], rel=1e-9)


def test_embedding_coupling_identity():
    spec = _small_spec(entrain_coupling=1.0)
    session = generate_session(spec)
    for g in spec.gloss_names():
        instr = [t for t in session.tokens if t.signer == INSTRUCTOR and t.gloss == g]
        stud = [t for t in session.tokens if t.signer == STUDENT and t.gloss == g]
        # at full coupling the student's last token equals the instructor's
        assert cosine(stud[-1].vector, instr[0].vector) == pytest.approx(1.0, abs=1e-12)
        expected = 1.0 - cosine(stud[0].vector, instr[0].vector)
        assert delta_cos(instr, stud) == pytest.approx(expected, abs=1e-12)


def test_zero_coupling_keeps_student_fixed():
    session = generate_session(_small_spec(entrain_coupling=0.0))
    stud = [t for t in session.tokens if t.signer == STUDENT and t.gloss == "gloss00"]
    for t in stud[1:]:
        assert np.allclose(t.vector, stud[0].vector)


def test_embedding_unit_norm():
    session = generate_session(_small_spec(entrain_coupling=0.5))
    for t in session.tokens:
        assert np.linalg.norm(t.vector) == pytest.approx(1.0, abs=1e-12)


def test_write_session_files_parse_back(tmp_path):
    session = generate_session(_small_spec())
    written = write_session(session, tmp_path)
    names = {p.name for p in written}
    assert names == {
        "keypoints_instructor_dialogue.csv",
        "keypoints_student_dialogue.csv",
        "keypoints_student_vocabulary.csv",
        "annotations.csv",
        "embeddings.csv",
        "truth.csv",
    }
    seq = parse_keypoint_file(tmp_path / "keypoints_instructor_dialogue.csv")
    assert seq == session.sequences[(INSTRUCTOR, "dialogue")]
    truth_text = (tmp_path / "truth.csv").read_text()
    assert truth_text == serialize_truth(session.truth_rows)


def test_write_session_header_comment(tmp_path):
    session = generate_session(_small_spec())
    write_session(session, tmp_path, header_comment="#config_digest=abc")
    for name in ("annotations.csv", "truth.csv"):
        assert (tmp_path / name).read_text().startswith("#config_digest=abc\n")
