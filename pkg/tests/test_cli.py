import json

import pytest

from signkin.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def synth_dir(tmp_path, capsys):
    out = tmp_path / "session"
    code, _, _ = run(
        capsys, "synth", "--out-dir", str(out),
        "--glosses", "2", "--mentions", "3", "--seed", "1",
    )
    assert code == 0
    return out


def test_synth_writes_expected_files(synth_dir):
    names = sorted(p.name for p in synth_dir.iterdir())
    assert names == [
        "annotations.csv",
        "embeddings.csv",
        "keypoints_instructor_dialogue.csv",
        "keypoints_student_dialogue.csv",
        "keypoints_student_vocabulary.csv",
        "truth.csv",
    ]
    for p in synth_dir.iterdir():
        assert p.read_text().startswith("#config_digest=")


def test_synth_rerun_byte_identical(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        code, _, _ = run(capsys, "synth", "--out-dir", str(out), "--glosses", "2",
                         "--mentions", "2", "--seed", "3")
        assert code == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_digest_changes_with_options(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run(capsys, "synth", "--out-dir", str(a), "--glosses", "2", "--mentions", "2")
    run(capsys, "synth", "--out-dir", str(b), "--glosses", "2", "--mentions", "2",
        "--seed", "9")
    da = (a / "truth.csv").read_text().splitlines()[0]
    db = (b / "truth.csv").read_text().splitlines()[0]
    assert da != db
    # output path is excluded from the digest
    c = tmp_path / "c"
    run(capsys, "synth", "--out-dir", str(c), "--glosses", "2", "--mentions", "2")
    assert (c / "truth.csv").read_text().splitlines()[0] == da


def test_config_file_defaults_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("glosses=2\nmentions=2\nseed=7\n")
    a = tmp_path / "a"
    b = tmp_path / "b"
    run(capsys, "synth", "--config", str(cfg), "--out-dir", str(a))
    run(capsys, "synth", "--config", str(cfg), "--out-dir", str(b), "--seed", "8")
    ta = (a / "annotations.csv").read_text()
    tb = (b / "annotations.csv").read_text()
    assert ta.splitlines()[0] != tb.splitlines()[0]  # flag overrode seed
    c = tmp_path / "c"
    run(capsys, "synth", "--out-dir", str(c), "--glosses", "2", "--mentions", "2",
        "--seed", "7")
    assert (c / "annotations.csv").read_text() == ta


def test_error_reports_json_on_stderr(tmp_path, capsys):
    code, out, err = run(
        capsys, "metrics",
        "--keypoints", str(tmp_path / "missing.csv"),
        "--annotations", str(tmp_path / "missing2.csv"),
        "--out", str(tmp_path / "out.csv"),
    )
    assert code == 1
    record = json.loads(err.strip().splitlines()[-1])
    assert "error" in record and "message" in record


def test_invalid_spec_is_a_clean_error(tmp_path, capsys):
    code, _, err = run(capsys, "synth", "--out-dir", str(tmp_path / "x"),
                       "--reduction-rate", "1.5")
    assert code == 1
    record = json.loads(err.strip())
    assert record["error"] == "ArgumentError"


def test_ingest_roundtrip(synth_dir, tmp_path, capsys):
    out = tmp_path / "normalized.csv"
    code, stdout, _ = run(
        capsys, "ingest",
        "--keypoints", str(synth_dir / "keypoints_student_dialogue.csv"),
        "--out", str(out),
    )
    assert code == 0
    assert str(out) in stdout
    lines = out.read_text().splitlines()
    assert lines[0].startswith("#config_digest=")
    original = (synth_dir / "keypoints_student_dialogue.csv").read_text().splitlines()
    # body identical once both digest lines are dropped
    assert lines[1:] == original[1:]


def test_ingest_raw_landmarks(tmp_path, capsys):
    raw = tmp_path / "landmarks.csv"
    raw.write_text(
        "#frame_rate=30\n#signer=cam\n"
        "0,pose_12,0.5,0.5,0.9\n"
        "0,right_hand_9,0.1,0.2,0.8\n"
        "33.3,pose_12,0.6,0.5,0.9\n"
    )
    out = tmp_path / "mapped.csv"
    code, _, _ = run(capsys, "ingest", "--landmarks", str(raw), "--out", str(out))
    assert code == 0
    text = out.read_text()
    assert "#source_kind=pose2d" in text
    assert "RightArm" in text and "RightHandMiddle1" in text


def _metrics(synth_dir, tmp_path, capsys):
    out = tmp_path / "metrics.csv"
    code, _, err = run(
        capsys, "metrics",
        "--keypoints",
        str(synth_dir / "keypoints_instructor_dialogue.csv"),
        str(synth_dir / "keypoints_student_dialogue.csv"),
        str(synth_dir / "keypoints_student_vocabulary.csv"),
        "--annotations", str(synth_dir / "annotations.csv"),
        "--out", str(out),
    )
    assert code == 0, err
    return out


def test_metrics_row_count(synth_dir, tmp_path, capsys):
    out = _metrics(synth_dir, tmp_path, capsys)
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    # header + (2 signers x 2 glosses x 3 mentions + 2 vocab) x 8 groups
    assert len(lines) == 1 + (2 * 2 * 3 + 2) * 8
    assert lines[0].startswith("gloss,variation,signer,condition,session,mention_index,group")


def test_reduce_outputs(synth_dir, tmp_path, capsys):
    metrics = _metrics(synth_dir, tmp_path, capsys)
    out_dir = tmp_path / "reduce"
    code, _, _ = run(capsys, "reduce", "--metrics", str(metrics),
                     "--out-dir", str(out_dir))
    assert code == 0
    table = (out_dir / "reduction_table.csv").read_text().splitlines()
    assert table[1] == "condition,group,column,rho,p_value,n_pairs,method,mean_pct,status"
    body = table[2:]
    # 8 groups x 3 columns + 1 duration row, one condition
    assert len(body) == 8 * 3 + 1
    ok_rows = [r for r in body if r.endswith(",ok")]
    assert ok_rows
    for r in ok_rows:
        parts = r.split(",")
        if parts[1] == "Duration":
            continue
        # amplitude shrinks while durations stay fixed, so spatial extent and
        # path shrink perfectly (+1) and velocity decreases perfectly (-1)
        expected = -1.0 if parts[2] == "VelocityIncrease" else 1.0
        assert float(parts[3]) == expected, r
    for name in ("delta_points.csv", "delta_aggregate.csv", "duration_summary.csv"):
        assert (out_dir / name).exists()


def test_entrain_outputs(synth_dir, tmp_path, capsys):
    out = tmp_path / "entrainment.csv"
    code, stdout, _ = run(
        capsys, "entrain", "--embeddings", str(synth_dir / "embeddings.csv"),
        "--signer-a", "instructor", "--signer-b", "student",
        "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "gloss,delta_cos,slope_a_to_b,slope_b_to_a,selfsim_a,selfsim_b"
    assert len(lines) == 2 + 2  # one row per gloss
    proj = tmp_path / "entrainment_projections.csv"
    assert proj.exists()
    assert str(proj) in stdout


def test_spot_kinematic_mode(tmp_path, capsys):
    session = tmp_path / "session"
    code, _, _ = run(
        capsys, "synth", "--out-dir", str(session),
        "--glosses", "3", "--mentions", "2", "--seed", "2",
        "--shape-variation", "0.6",
    )
    assert code == 0
    out = tmp_path / "spot.csv"
    code, stdout, err = run(
        capsys, "spot",
        "--search-keypoints", str(session / "keypoints_student_dialogue.csv"),
        "--query-keypoints", str(session / "keypoints_student_vocabulary.csv"),
        "--annotations", str(session / "annotations.csv"),
        "--out", str(out), "--ks", "1,5",
    )
    assert code == 0, err
    lines = out.read_text().splitlines()
    assert lines[1] == "input,model,mrr,r@1,r@5"
    row = lines[2].split(",")
    assert row[1] == "kinematic"
    assert float(row[2]) > 0.0
    queries = (tmp_path / "spot_queries.csv").read_text().splitlines()
    assert len(queries) == 2 + 3  # digest + header + one row per query gloss


def test_spot_embedding_mode(synth_dir, tmp_path, capsys):
    out = tmp_path / "spot.csv"
    code, _, err = run(
        capsys, "spot",
        "--query-embeddings", str(synth_dir / "embeddings.csv"),
        "--window-embeddings", str(synth_dir / "embeddings.csv"),
        "--annotations", str(synth_dir / "annotations.csv"),
        "--out", str(out), "--ks", "1,5",
    )
    assert code == 0, err
    line = out.read_text().splitlines()[2]
    assert line.split(",")[1] == "external"


def test_report_renders_sections(synth_dir, tmp_path, capsys):
    metrics = _metrics(synth_dir, tmp_path, capsys)
    out_dir = tmp_path / "reduce"
    run(capsys, "reduce", "--metrics", str(metrics), "--out-dir", str(out_dir))
    code, stdout, _ = run(
        capsys, "report",
        "--table", str(out_dir / "reduction_table.csv"),
        "--duration", str(out_dir / "duration_summary.csv"),
    )
    assert code == 0
    assert "Relative Change Analysis" in stdout
    assert "Stars: * p<.05" in stdout
    assert "Duration vs vocabulary baseline" in stdout
    assert "Fingers (L)" in stdout and "Arm (R)" in stdout


def test_report_requires_an_input(capsys):
    code, _, err = run(capsys, "report")
    assert code == 1
    assert json.loads(err.strip())["error"] == "ArgumentError"


def test_report_to_file_rerun_identical(synth_dir, tmp_path, capsys):
    metrics = _metrics(synth_dir, tmp_path, capsys)
    out_dir = tmp_path / "reduce"
    run(capsys, "reduce", "--metrics", str(metrics), "--out-dir", str(out_dir))
    r1 = tmp_path / "r1.txt"
    r2 = tmp_path / "r2.txt"
    for r in (r1, r2):
        code, _, _ = run(capsys, "report", "--table",
                         str(out_dir / "reduction_table.csv"), "--out", str(r))
        assert code == 0
    assert r1.read_bytes() == r2.read_bytes()
