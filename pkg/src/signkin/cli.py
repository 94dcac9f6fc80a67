"""Batch command-line front end.

Subcommands: synth, ingest, metrics, reduce, entrain, spot, report.
Options may come from a plain ``key=value`` config file (--config);
explicit flags win. Every output file starts with a ``#config_digest=``
line identifying the effective configuration, so re-runs on unchanged
inputs are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import annotation, entrain, kinemetrics, reduction, skeleton, spotter, synth
from .errors import (
    ArgumentError,
    EmptyCorpusError,
    GapRatioExceededError,
    IntervalNotCoveredError,
    MissingJointsError,
    ToolkitError,
)
from .stats import significance_stars


def _load_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ArgumentError(f"{path}:line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _effective_options(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Merge defaults < config file < explicit flags; return the effective dict."""
    config = {}
    if getattr(args, "config", None):
        config = _load_config_file(args.config)
    effective = {}
    for action in parser._actions:
        dest = action.dest
        if dest in ("help", "config", "command"):
            continue
        value = getattr(args, dest, None)
        if value is None and dest in config:
            raw = config[dest]
            if action.type is not None:
                value = action.type(raw)
            elif isinstance(action.const, bool) or isinstance(action.default, bool):
                value = raw.lower() in ("1", "true", "yes")
            else:
                value = raw
        if value is None:
            value = action.default
        effective[dest] = value
    return effective


def _digest(command: str, options: dict) -> str:
    payload = "\n".join(
        f"{k}={options[k]}" for k in sorted(options) if not k.startswith("out")
    )
    h = hashlib.sha256(f"{command}\n{payload}".encode("utf-8")).hexdigest()[:12]
    return f"#config_digest={h}"


def _write(path, digest_line: str, body: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(digest_line + "\n" + body, encoding="utf-8")


def _parse_ks(text: str):
    return tuple(int(k) for k in str(text).split(",") if k)


# ---------------------------------------------------------------- synth


def cmd_synth(opts) -> int:
    spec = synth.SynthSpec(
        glosses=opts["glosses"],
        mentions=opts["mentions"],
        reduction_rate=opts["reduction_rate"],
        entrain_coupling=opts["entrain_coupling"],
        weak_drop_mention=opts["weak_drop_mention"],
        seed=opts["seed"],
        token_ms=opts["token_ms"],
        gap_ms=opts["gap_ms"],
        dialogue_duration_scale=opts["duration_scale"],
        embed_dim=opts["embed_dim"],
        gloss_shape_variation=opts["shape_variation"],
        include_vocab=not opts["no_vocab"],
    )
    session = synth.generate_session(spec)
    written = synth.write_session(
        session, opts["out_dir"], header_comment=_digest("synth", opts)
    )
    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------- ingest


def cmd_ingest(opts) -> int:
    if opts["landmarks"]:
        mapping = (
            skeleton.load_mapping_file(opts["mapping"])
            if opts["mapping"]
            else skeleton.default_mapping()
        )
        raw_frames, frame_rate, signer = _read_raw_landmarks(opts["landmarks"])
        seq = skeleton.map_pose_landmarks(
            raw_frames, mapping, frame_rate=frame_rate, signer=signer
        )
    else:
        if not opts["keypoints"]:
            raise ArgumentError("ingest needs --keypoints or --landmarks")
        seq = skeleton.parse_keypoint_file(opts["keypoints"][0])
    _write(opts["out"], _digest("ingest", opts), skeleton.serialize_keypoint_sequence(seq))
    print(opts["out"])
    return 0


def _read_raw_landmarks(path):
    """Raw landmark file: '#key=value' headers, then time_ms,key,x,y,confidence."""
    from .errors import MalformedHeaderError, ParseError

    headers = {}
    frames: dict[float, dict] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "=" not in line:
                raise MalformedHeaderError(f"expected '#key=value', got {line!r}", line=lineno, path=path)
            key, _, value = line[1:].partition("=")
            headers[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"expected 5 columns, got {len(parts)}", line=lineno, path=path)
        t, key, x, y, conf = parts
        frames.setdefault(float(t), {})[key] = (
            float(x), float(y), float(conf) if conf else None
        )
    if "frame_rate" not in headers:
        raise MalformedHeaderError("missing required header #frame_rate=", path=path)
    ordered = [(t, frames[t]) for t in sorted(frames)]
    return ordered, float(headers["frame_rate"]), headers.get("signer")


# ---------------------------------------------------------------- metrics


def _load_sequences(paths):
    sequences = []
    for path in paths:
        sequences.append(skeleton.parse_keypoint_file(path))
    return sequences


def _sequence_for(instance, sequences):
    candidates = [
        s for s in sequences
        if s.signer == instance.signer
        and s.meta.get("condition", instance.condition) == instance.condition
    ]
    if not candidates:
        raise ArgumentError(
            f"no keypoint sequence for signer {instance.signer!r} "
            f"condition {instance.condition!r}"
        )
    if len(candidates) > 1:
        raise ArgumentError(
            f"ambiguous keypoint sequences for signer {instance.signer!r} "
            f"condition {instance.condition!r}"
        )
    return candidates[0]


def cmd_metrics(opts) -> int:
    sequences = _load_sequences(opts["keypoints"])
    instances, warnings = annotation.parse_annotations(opts["annotations"])
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)

    by_condition: dict[str, list] = {}
    for inst in instances:
        by_condition.setdefault(inst.condition, []).append(inst)
    mention_of: dict[int, int] = {}
    for cond_insts in by_condition.values():
        indices = annotation.assign_mention_indices(
            cond_insts, strict_variation=opts["strict_variation"]
        )
        for inst, idx in zip(cond_insts, indices):
            mention_of[id(inst)] = idx

    rows = []
    skipped = []
    for inst in sorted(
        instances, key=lambda i: (i.signer, i.condition, i.session, i.gloss, i.start_ms)
    ):
        seq = _sequence_for(inst, sequences)
        for group in skeleton.GROUP_ORDER:
            try:
                rec = kinemetrics.compute_record(
                    seq,
                    inst,
                    skeleton.JOINT_GROUPS[group],
                    confidence_floor=opts["confidence_floor"],
                    gap_threshold=opts["gap_threshold"],
                    mention_index=mention_of[id(inst)],
                )
            except (GapRatioExceededError, MissingJointsError, IntervalNotCoveredError) as exc:
                skipped.append(f"{inst.gloss}/{inst.signer}/{group}: {exc}")
                continue
            rows.append(kinemetrics.record_to_row(rec))
    for s in skipped:
        print(f"warning: skipped {s}", file=sys.stderr)
    body = kinemetrics.METRIC_TABLE_HEADER + "\n" + "\n".join(rows) + "\n"
    _write(opts["out"], _digest("metrics", opts), body)
    print(opts["out"])
    return 0


# ---------------------------------------------------------------- reduce


def cmd_reduce(opts) -> int:
    records = kinemetrics.parse_metric_table(opts["metrics"])
    digest_line = _digest("reduce", opts)
    out_dir = Path(opts["out_dir"])

    tables = reduction.repeated_mention_correlations(
        records,
        min_tokens=opts["min_tokens"],
        include_first_mention=opts["include_first_mention"],
        per_gloss=opts["per_gloss"],
    )
    lines = ["condition,group,column,rho,p_value,n_pairs,method,mean_pct,status"]
    for table in tables:
        for group in table.group_order:
            for column in table.columns:
                cell = table.cells[(group, column)]
                lines.append(_cell_row(table.condition, group, column, cell))
        lines.append(_cell_row(table.condition, "Duration", "DurationReduction", table.duration))
    _write(out_dir / "reduction_table.csv", digest_line, "\n".join(lines) + "\n")

    series, aggregates, warnings = reduction.vocab_delta_series_from_records(records)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    s_lines = ["signer,gloss,group,metric,mention_index,delta"]
    for s in series:
        for p in s.points:
            s_lines.append(
                f"{s.signer},{s.gloss},{s.group.replace(' ', '_')},{s.metric},"
                f"{p.mention_index},{p.delta!r}"
            )
    _write(out_dir / "delta_points.csv", digest_line, "\n".join(s_lines) + "\n")
    a_lines = ["signer,group,metric,mention_index,mean,std_error,n"]
    for a in aggregates:
        for p in a.points:
            a_lines.append(
                f"{a.signer},{a.group.replace(' ', '_')},{a.metric},"
                f"{p.mention_index},{p.mean!r},{p.std_error!r},{p.n}"
            )
    _write(out_dir / "delta_aggregate.csv", digest_line, "\n".join(a_lines) + "\n")

    d_lines = ["signer,mean_pct_reduction,p_value,n_pairs"]
    for summary in reduction.duration_reduction_summary_from_records(records):
        p = "" if summary.p_value is None else repr(summary.p_value)
        d_lines.append(
            f"{summary.signer},{summary.mean_pct_reduction!r},{p},{summary.n_pairs}"
        )
    _write(out_dir / "duration_summary.csv", digest_line, "\n".join(d_lines) + "\n")
    for name in ("reduction_table.csv", "delta_points.csv", "delta_aggregate.csv", "duration_summary.csv"):
        print(out_dir / name)
    return 0


def _cell_row(condition, group, column, cell) -> str:
    group = group.replace(" ", "_")
    mean_pct = "" if cell.mean_pct is None else repr(cell.mean_pct)
    if cell.available:
        r = cell.result
        return (
            f"{condition},{group},{column},{r.rho!r},{r.p_value!r},"
            f"{cell.n_pairs},{r.method},{mean_pct},ok"
        )
    return f"{condition},{group},{column},,,{cell.n_pairs},,{mean_pct},{cell.reason}"


# ---------------------------------------------------------------- entrain


def cmd_entrain(opts) -> int:
    tokens = entrain.parse_embedding_file(opts["embeddings"])
    report = entrain.entrainment_report(
        tokens,
        opts["signer_a"],
        opts["signer_b"],
        min_tokens=opts["min_tokens"],
        literal_delta_cos=opts["literal_delta_cos"],
        global_means=opts["global_means"],
    )
    digest_line = _digest("entrain", opts)
    lines = ["gloss,delta_cos,slope_a_to_b,slope_b_to_a,selfsim_a,selfsim_b"]
    for g in report.per_gloss:
        lines.append(
            f"{g.gloss},{g.delta_cos!r},{g.slope_a_to_b!r},{g.slope_b_to_a!r},"
            f"{g.selfsim_a!r},{g.selfsim_b!r}"
        )
    _write(opts["out"], digest_line, "\n".join(lines) + "\n")
    proj_lines = ["gloss,signer,mention_index,projection_sim"]
    for g in report.per_gloss:
        for signer, k, sim in g.projection:
            proj_lines.append(f"{g.gloss},{signer},{k},{sim!r}")
    _write(opts["out_projections"], digest_line, "\n".join(proj_lines) + "\n")
    print(opts["out"])
    print(opts["out_projections"])
    return 0


# ---------------------------------------------------------------- spot


def cmd_spot(opts) -> int:
    ks = _parse_ks(opts["ks"])
    digest_line = _digest("spot", opts)
    if opts["query_embeddings"]:
        reports, label = _spot_from_embeddings(opts, ks)
        model = opts["model_label"] or "external"
    else:
        reports, label = _spot_kinematic(opts, ks)
        model = opts["model_label"] or "kinematic"
    if not reports:
        raise EmptyCorpusError("no queries")
    agg = spotter.aggregate_reports(reports, pooled=opts["pooled_mrr"])
    header = "input,model,mrr," + ",".join(f"r@{k}" for k in ks)
    line = f"{label},{model},{agg.mrr!r}," + ",".join(repr(agg.recall_at[k]) for k in ks)
    _write(opts["out"], digest_line, header + "\n" + line + "\n")
    q_lines = [
        "gloss,mrr,n_truth,"
        + ",".join(f"r@{k}" for k in ks)
        + ","
        + ",".join(f"truth_r@{k}" for k in ks)
    ]
    for q in agg.queries:
        q_lines.append(
            f"{q.gloss},{q.mrr!r},{q.n_truth},"
            + ",".join(repr(q.recall_at[k]) for k in ks)
            + ","
            + ",".join(repr(q.truth_recall_at[k]) for k in ks)
        )
    _write(opts["out_queries"], digest_line, "\n".join(q_lines) + "\n")
    print(opts["out"])
    print(opts["out_queries"])
    return 0


def _spot_kinematic(opts, ks):
    search_seq = skeleton.parse_keypoint_file(opts["search_keypoints"])
    query_seq = skeleton.parse_keypoint_file(opts["query_keypoints"])
    instances, _ = annotation.parse_annotations(opts["annotations"])
    queries = [i for i in instances if i.condition == "vocabulary"]
    if not queries:
        raise EmptyCorpusError("no queries")
    total_ms = search_seq.frames[-1].time_ms if search_seq.frames else 0.0
    windows = spotter.make_windows(total_ms, opts["width_ms"], opts["stride_ms"])
    spotter.embed_windows(
        search_seq, windows, resample=opts["resample"],
        confidence_floor=opts["confidence_floor"],
    )
    reports = []
    for q in sorted(queries, key=lambda i: (i.gloss, i.start_ms)):
        qvec = spotter.kinematic_embed(
            query_seq, q.interval, resample=opts["resample"],
            confidence_floor=opts["confidence_floor"],
        )
        if qvec is None:
            print(f"warning: stationary query {q.gloss}; skipped", file=sys.stderr)
            continue
        truth = [
            i.interval for i in instances
            if i.gloss == q.gloss and i.condition != "vocabulary"
            and i.signer == search_seq.signer
        ]
        reports.append(
            spotter.rank_and_score(
                qvec, windows, truth, gloss=q.gloss, ks=ks,
                iou_threshold=opts["iou_threshold"],
            )
        )
    return reports, Path(opts["search_keypoints"]).stem


def _spot_from_embeddings(opts, ks):
    query_tokens = entrain.parse_embedding_file(opts["query_embeddings"])
    window_tokens = entrain.parse_embedding_file(opts["window_embeddings"])
    instances, _ = annotation.parse_annotations(opts["annotations"])
    windows = [
        spotter.Window(t.start_ms, t.end_ms, t.vector) for t in window_tokens
    ]
    reports = []
    for q in sorted(query_tokens, key=lambda t: (t.gloss, t.start_ms)):
        truth = [
            i.interval for i in instances
            if i.gloss == q.gloss and i.condition != "vocabulary"
        ]
        reports.append(
            spotter.rank_and_score(
                q.vector, windows, truth, gloss=q.gloss, ks=ks,
                iou_threshold=opts["iou_threshold"],
            )
        )
    return reports, Path(opts["query_embeddings"]).stem


# ---------------------------------------------------------------- report


def _read_csv(path):
    rows = []
    header = None
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append(dict(zip(header, line.split(","))))
    return rows


def cmd_report(opts) -> int:
    sections = []
    if opts["table"]:
        sections.append(_render_reduction_grid(_read_csv(opts["table"])))
    if opts["duration"]:
        sections.append(_render_duration(_read_csv(opts["duration"])))
    if opts["entrainment"]:
        sections.append(_render_entrainment(_read_csv(opts["entrainment"])))
    if opts["spotting"]:
        sections.append(_render_spotting(_read_csv(opts["spotting"])))
    if not sections:
        raise ArgumentError("nothing to report; pass --table/--duration/--entrainment/--spotting")
    body = "\n\n".join(sections) + "\n"
    if opts["out"]:
        _write(opts["out"], _digest("report", opts), body)
        print(opts["out"])
    else:
        print(body, end="")
    return 0


def _fmt_cell(row) -> str:
    if row["status"] != "ok":
        return "(-)"
    rho = float(row["rho"])
    p = row["p_value"]
    stars = significance_stars(float(p)) if p not in ("", "nan") else ""
    return f"{rho:+.2f}{stars}"


def _render_reduction_grid(rows) -> str:
    conditions = []
    for r in rows:
        if r["condition"] not in conditions:
            conditions.append(r["condition"])
    columns = ["SpatialReduction", "PathReduction", "VelocityIncrease"]
    cells = {(r["condition"], r["group"], r["column"]): r for r in rows}
    header = ["Joint"] + [f"{c[:7]}|{cond[:4]}" for c in columns for cond in conditions]
    groups = []
    for r in rows:
        g = r["group"].replace("_", " ")
        if g not in groups and g != "Duration":
            groups.append(g)
    lines = ["Relative Change Analysis (Spearman correlation)",
             "Stars: * p<.05, ** p<.01, *** p<.001"]
    widths = [max(12, len(h)) for h in header]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for g in groups:
        cols = [g]
        for c in columns:
            for cond in conditions:
                row = cells.get((cond, g.replace(" ", "_"), c))
                cols.append(_fmt_cell(row) if row else "(-)")
        lines.append("  ".join(v.ljust(w) for v, w in zip(cols, widths)))
    dur = [r for r in rows if r["group"] == "Duration"]
    for r in dur:
        lines.append(f"Duration reduction [{r['condition']}]: {_fmt_cell(r)} (n={r['n_pairs']})")
    return "\n".join(lines)


def _render_duration(rows) -> str:
    lines = ["Duration vs vocabulary baseline"]
    for r in rows:
        p = r["p_value"]
        stars = significance_stars(float(p)) if p else ""
        lines.append(
            f"  {r['signer']}: {float(r['mean_pct_reduction']):.1f}% shorter"
            f" (n={r['n_pairs']}{', p=' + p + stars if p else ''})"
        )
    return "\n".join(lines)


def _render_entrainment(rows) -> str:
    lines = ["Embedding entrainment (per gloss)",
             "gloss  delta_cos  slope_a->b  slope_b->a  selfsim_a  selfsim_b"]
    for r in rows:
        lines.append(
            f"  {r['gloss']}: {float(r['delta_cos']):+.4f}  {float(r['slope_a_to_b']):+.4f}"
            f"  {float(r['slope_b_to_a']):+.4f}  {float(r['selfsim_a']):.4f}  {float(r['selfsim_b']):.4f}"
        )
    return "\n".join(lines)


def _render_spotting(rows) -> str:
    if not rows:
        return "Retrieval: no results"
    keys = list(rows[0].keys())
    lines = ["Retrieval performance", "  ".join(k.ljust(12) for k in keys)]
    for r in rows:
        lines.append("  ".join(str(r[k])[:12].ljust(12) for k in keys))
    return "\n".join(lines)


# ---------------------------------------------------------------- parser


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="signkin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value config file; flags override")
        parsers[name] = p
        return p

    p = add("synth", "generate a synthetic session with known ground truth")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--glosses", type=int)
    p.add_argument("--mentions", type=int)
    p.add_argument("--reduction-rate", type=float)
    p.add_argument("--entrain-coupling", type=float)
    p.add_argument("--weak-drop-mention", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--token-ms", type=float)
    p.add_argument("--gap-ms", type=float)
    p.add_argument("--duration-scale", type=float)
    p.add_argument("--embed-dim", type=int)
    p.add_argument("--shape-variation", type=float)
    p.add_argument("--no-vocab", action="store_true", default=None)

    p = add("ingest", "validate/normalize keypoint files; map raw landmarks")
    p.add_argument("--keypoints", nargs="*")
    p.add_argument("--landmarks")
    p.add_argument("--mapping")
    p.add_argument("--out", required=True)

    p = add("metrics", "compute per-token articulatory metric tables")
    p.add_argument("--keypoints", nargs="+", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--confidence-floor", type=float)
    p.add_argument("--gap-threshold", type=float)
    p.add_argument("--strict-variation", action="store_true", default=None)

    p = add("reduce", "delta series and repeated-mention correlation tables")
    p.add_argument("--metrics", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--min-tokens", type=int)
    p.add_argument("--include-first-mention", action="store_true", default=None)
    p.add_argument("--per-gloss", action="store_true", default=None)

    p = add("entrain", "embedding-based entrainment metrics")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--signer-a", required=True)
    p.add_argument("--signer-b", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--out-projections")
    p.add_argument("--min-tokens", type=int)
    p.add_argument("--literal-delta-cos", action="store_true", default=None)
    p.add_argument("--global-means", action="store_true", default=None)

    p = add("spot", "continuous sign-spotting evaluation")
    p.add_argument("--search-keypoints")
    p.add_argument("--query-keypoints")
    p.add_argument("--annotations", required=True)
    p.add_argument("--query-embeddings")
    p.add_argument("--window-embeddings")
    p.add_argument("--out", required=True)
    p.add_argument("--out-queries")
    p.add_argument("--width-ms", type=float)
    p.add_argument("--stride-ms", type=float)
    p.add_argument("--iou-threshold", type=float)
    p.add_argument("--ks", type=str)
    p.add_argument("--resample", type=int)
    p.add_argument("--confidence-floor", type=float)
    p.add_argument("--pooled-mrr", action="store_true", default=None)
    p.add_argument("--model-label")

    p = add("report", "render human-readable grids with significance stars")
    p.add_argument("--table")
    p.add_argument("--duration")
    p.add_argument("--entrainment")
    p.add_argument("--spotting")
    p.add_argument("--out")

    return parser, parsers


_DEFAULTS = {
    "synth": dict(
        glosses=5, mentions=6, reduction_rate=0.1, entrain_coupling=0.0,
        weak_drop_mention=None, seed=0, token_ms=500.0, gap_ms=250.0,
        duration_scale=1.0, embed_dim=8, shape_variation=0.0, no_vocab=False,
    ),
    "ingest": dict(keypoints=None, landmarks=None, mapping=None),
    "metrics": dict(confidence_floor=0.5, gap_threshold=0.25, strict_variation=False),
    "reduce": dict(min_tokens=2, include_first_mention=False, per_gloss=False),
    "entrain": dict(min_tokens=2, literal_delta_cos=False, global_means=False),
    "spot": dict(
        width_ms=500.0, stride_ms=500.0, iou_threshold=0.3, ks="10,50",
        resample=16, confidence_floor=0.5, pooled_mrr=False, model_label=None,
        search_keypoints=None, query_keypoints=None, query_embeddings=None,
        window_embeddings=None, out_queries=None,
    ),
    "report": dict(table=None, duration=None, entrainment=None, spotting=None, out=None),
}

_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "metrics": cmd_metrics,
    "reduce": cmd_reduce,
    "entrain": cmd_entrain,
    "spot": cmd_spot,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser, parsers = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    try:
        opts = _effective_options(args, parsers[command])
        for key, value in _DEFAULTS.get(command, {}).items():
            if opts.get(key) is None:
                opts[key] = value
        if command == "spot" and opts.get("out_queries") is None:
            opts["out_queries"] = str(Path(opts["out"]).with_suffix("")) + "_queries.csv"
        if command == "entrain" and opts.get("out_projections") is None:
            opts["out_projections"] = str(Path(opts["out"]).with_suffix("")) + "_projections.csv"
        return _COMMANDS[command](opts)
    except (ToolkitError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
