#!/usr/bin/env python3
"""Run the full analysis pipeline on a synthetic session.

Generates a session with known articulatory reduction, entrainment
coupling, and a weak-side drop, then runs metrics -> reduce -> entrain ->
spot -> report and prints the rendered report. Useful as a smoke test and
as a worked example of the command-line workflow.

Usage:
    python scripts/run_synthetic_pipeline.py [--out-dir OUT] [--seed N]
"""

import argparse
import sys
import tempfile
from pathlib import Path

from signkin.cli import main as signkin_main


def run(*argv):
    code = signkin_main([str(a) for a in argv])
    if code != 0:
        raise SystemExit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", help="working directory (default: temp dir)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--glosses", type=int, default=5)
    ap.add_argument("--mentions", type=int, default=6)
    args = ap.parse_args()

    base = Path(args.out_dir) if args.out_dir else Path(tempfile.mkdtemp(prefix="signkin_"))
    session = base / "session"

    run("synth", "--out-dir", session, "--glosses", args.glosses,
        "--mentions", args.mentions, "--seed", args.seed,
        "--reduction-rate", 0.1, "--entrain-coupling", 0.8,
        "--weak-drop-mention", 4, "--shape-variation", 0.5)

    metrics = base / "metrics.csv"
    run("metrics",
        "--keypoints",
        session / "keypoints_instructor_dialogue.csv",
        session / "keypoints_student_dialogue.csv",
        session / "keypoints_student_vocabulary.csv",
        "--annotations", session / "annotations.csv",
        "--out", metrics)

    reduce_dir = base / "reduce"
    run("reduce", "--metrics", metrics, "--out-dir", reduce_dir)

    entrain_out = base / "entrainment.csv"
    run("entrain", "--embeddings", session / "embeddings.csv",
        "--signer-a", "instructor", "--signer-b", "student",
        "--out", entrain_out)

    spot_out = base / "spot.csv"
    run("spot",
        "--search-keypoints", session / "keypoints_student_dialogue.csv",
        "--query-keypoints", session / "keypoints_student_vocabulary.csv",
        "--annotations", session / "annotations.csv",
        "--out", spot_out)

    print(f"\nworking directory: {base}\n", file=sys.stderr)
    run("report",
        "--table", reduce_dir / "reduction_table.csv",
        "--duration", reduce_dir / "duration_summary.csv",
        "--entrainment", entrain_out,
        "--spotting", spot_out)


if __name__ == "__main__":
    main()
