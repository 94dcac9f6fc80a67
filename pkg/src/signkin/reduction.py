"""Vocabulary-baseline delta series and repeated-mention reduction tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InsufficientDataError
from .kinemetrics import MetricRecord
from .skeleton import GROUP_ORDER
from .stats import CorrelationResult, percent_change, signed_rank_test, spearman

# Table columns: metric measured and the direction in which positive
# percent change is reported.
TABLE_COLUMNS = (
    ("SpatialReduction", "spatial_extent", "reduction"),
    ("PathReduction", "path_length", "reduction"),
    ("VelocityIncrease", "avg_velocity", "increase"),
)

DELTA_METRICS = ("spatial_extent", "path_length", "avg_velocity", "duration_s", "mean_vertical")


@dataclass(frozen=True)
class DeltaPoint:
    mention_index: int
    delta: float


@dataclass(frozen=True)
class DeltaSeries:
    signer: str
    gloss: str
    group: str
    metric: str
    points: tuple[DeltaPoint, ...]


@dataclass(frozen=True)
class AggregatePoint:
    mention_index: int
    mean: float
    std_error: float
    n: int


@dataclass(frozen=True)
class AggregateDeltaSeries:
    signer: str
    group: str
    metric: str
    points: tuple[AggregatePoint, ...]


@dataclass(frozen=True)
class TableCell:
    """One reduction-table cell; ``result`` is None when unavailable."""

    result: CorrelationResult | None
    n_pairs: int
    mean_pct: float | None
    reason: str | None = None

    @property
    def available(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class ReductionTable:
    condition: str
    cells: dict[tuple[str, str], TableCell]
    duration: TableCell
    group_order: tuple[str, ...] = GROUP_ORDER
    columns: tuple[str, ...] = tuple(c[0] for c in TABLE_COLUMNS)


def _record_token_key(rec: MetricRecord):
    i = rec.instance
    return (i.signer, i.gloss, i.session, rec.mention_index)


def vocab_delta_series(records, pairs, metrics=DELTA_METRICS):
    """Per-mention deltas of dialogue metrics against vocabulary baselines.

    Returns ``(series, aggregates, warnings)``. Negative deltas mean more
    compact articulation than the vocabulary form. Aggregates mirror the
    per-(signer, group, metric) mean-with-standard-error trend line.
    """
    warnings: list[str] = []
    if not pairs:
        warnings.append("no overlapping glosses between dialogue and vocabulary")
        return [], [], warnings

    by_token: dict[tuple, dict[str, MetricRecord]] = {}
    for rec in records:
        i = rec.instance
        by_token.setdefault(
            (i.signer, i.gloss, i.condition, i.start_ms, i.end_ms), {}
        )[rec.group] = rec

    raw: dict[tuple, list[DeltaPoint]] = {}
    for pair in pairs:
        d, v = pair.dialogue_token, pair.vocab_token
        d_groups = by_token.get((d.signer, d.gloss, d.condition, d.start_ms, d.end_ms))
        v_groups = by_token.get((v.signer, v.gloss, v.condition, v.start_ms, v.end_ms))
        if not d_groups or not v_groups:
            warnings.append(f"no metric records for pair gloss {d.gloss!r}; skipped")
            continue
        for group, d_rec in sorted(d_groups.items()):
            v_rec = v_groups.get(group)
            if v_rec is None or d_rec.mention_index is None:
                continue
            for metric in metrics:
                delta = d_rec.metric(metric) - v_rec.metric(metric)
                raw.setdefault((d.signer, d.gloss, group, metric), []).append(
                    DeltaPoint(d_rec.mention_index, delta)
                )

    series = []
    for key in sorted(raw):
        points = tuple(sorted(raw[key], key=lambda p: p.mention_index))
        series.append(DeltaSeries(key[0], key[1], key[2], key[3], points))

    return series, _aggregate_series(series), warnings


def vocab_delta_series_from_records(records, metrics=DELTA_METRICS):
    """Delta series built from metric records alone (no annotation objects).

    The vocabulary baseline for a (gloss, group) is the vocabulary record
    with the lowest mention index. Useful when records come from a metric
    table on disk, where original intervals are not available.
    """
    warnings: list[str] = []
    vocab_baseline: dict[tuple[str, str], MetricRecord] = {}
    for rec in sorted(
        (r for r in records if r.instance.condition == "vocabulary"),
        key=lambda r: (r.mention_index or 1, r.instance.signer),
    ):
        vocab_baseline.setdefault((rec.instance.gloss, rec.group), rec)

    raw: dict[tuple, list[DeltaPoint]] = {}
    matched_any = False
    for rec in records:
        i = rec.instance
        if i.condition != "dialogue" or rec.mention_index is None:
            continue
        base = vocab_baseline.get((i.gloss, rec.group))
        if base is None:
            continue
        matched_any = True
        for metric in metrics:
            raw.setdefault((i.signer, i.gloss, rec.group, metric), []).append(
                DeltaPoint(rec.mention_index, rec.metric(metric) - base.metric(metric))
            )
    if not matched_any:
        warnings.append("no overlapping glosses between dialogue and vocabulary")

    series = []
    for key in sorted(raw):
        points = tuple(sorted(raw[key], key=lambda p: p.mention_index))
        series.append(DeltaSeries(key[0], key[1], key[2], key[3], points))
    aggregates = _aggregate_series(series)
    return series, aggregates, warnings


def _aggregate_series(series):
    agg_raw: dict[tuple, dict[int, list[float]]] = {}
    for s in series:
        bucket = agg_raw.setdefault((s.signer, s.group, s.metric), {})
        for p in s.points:
            bucket.setdefault(p.mention_index, []).append(p.delta)
    aggregates = []
    for key in sorted(agg_raw):
        points = []
        for k in sorted(agg_raw[key]):
            vals = np.asarray(agg_raw[key][k])
            se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            points.append(AggregatePoint(k, float(vals.mean()), se, len(vals)))
        aggregates.append(AggregateDeltaSeries(key[0], key[1], key[2], tuple(points)))
    return aggregates


def _pooled_pairs(records, metric, direction, min_tokens, include_first_mention):
    """(mention_index, percent_change) pairs pooled across (signer, gloss, session)."""
    groups: dict[tuple, list[MetricRecord]] = {}
    for rec in records:
        if rec.mention_index is None:
            continue
        i = rec.instance
        groups.setdefault((i.signer, i.gloss, i.session), []).append(rec)
    pooled: list[tuple[int, float]] = []
    per_gloss: dict[tuple, list[tuple[int, float]]] = {}
    for key in sorted(groups):
        tokens = sorted(groups[key], key=lambda r: r.mention_index)
        if len(tokens) < min_tokens:
            continue
        first = next((t for t in tokens if t.mention_index == 1), None)
        if first is None or first.metric(metric) == 0:
            continue
        pts = []
        for tok in tokens:
            if tok.mention_index == 1:
                if include_first_mention:
                    pts.append((1, 0.0))
                continue
            pct = percent_change(first.metric(metric), tok.metric(metric), direction)
            pts.append((tok.mention_index, pct))
        pooled.extend(pts)
        per_gloss[key] = pts
    return pooled, per_gloss


def _cell_from_pairs(pairs) -> TableCell:
    n = len(pairs)
    mean_pct = float(np.mean([p[1] for p in pairs])) if n else None
    if n < 3:
        return TableCell(None, n, mean_pct, reason="fewer than 3 pooled pairs")
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    try:
        return TableCell(spearman(xs, ys), n, mean_pct)
    except DegenerateInputError:
        return TableCell(None, n, mean_pct, reason="zero variance")


def repeated_mention_correlations(
    records,
    min_tokens: int = 2,
    *,
    include_first_mention: bool = False,
    per_gloss: bool = False,
) -> list[ReductionTable]:
    """Spearman correlations between mention index and percent change.

    Returns one table per condition present in the records (vocabulary
    excluded; its tokens are single productions by construction). Pairs
    are pooled across glosses within each joint-group cell; ``per_gloss``
    instead averages per-gloss correlations (sensitivity mode).
    """
    by_condition: dict[str, list[MetricRecord]] = {}
    for rec in records:
        cond = rec.instance.condition
        if cond == "vocabulary":
            continue
        by_condition.setdefault(cond, []).append(rec)

    tables = []
    for condition in ("dialogue", "monologue", "interpreter"):
        recs = by_condition.get(condition)
        if not recs:
            continue
        cells: dict[tuple[str, str], TableCell] = {}
        for group in GROUP_ORDER:
            group_recs = [r for r in recs if r.group == group]
            for column, metric, direction in TABLE_COLUMNS:
                pooled, gloss_pairs = _pooled_pairs(
                    group_recs, metric, direction, min_tokens, include_first_mention
                )
                if per_gloss:
                    cells[(group, column)] = _per_gloss_cell(gloss_pairs)
                else:
                    cells[(group, column)] = _cell_from_pairs(pooled)
        # Durations are group-independent; use each token once.
        seen = set()
        unique_recs = []
        for rec in sorted(recs, key=lambda r: (_record_token_key(r), r.group)):
            key = _record_token_key(rec)
            if key not in seen:
                seen.add(key)
                unique_recs.append(rec)
        dur_pairs, _ = _pooled_pairs(
            unique_recs, "duration_s", "reduction", min_tokens, include_first_mention
        )
        tables.append(
            ReductionTable(
                condition=condition,
                cells=cells,
                duration=_cell_from_pairs(dur_pairs),
            )
        )
    return tables


def _per_gloss_cell(gloss_pairs) -> TableCell:
    rhos = []
    n_total = 0
    pcts = []
    for key in sorted(gloss_pairs):
        pts = gloss_pairs[key]
        n_total += len(pts)
        pcts.extend(p[1] for p in pts)
        if len(pts) < 3:
            continue
        try:
            rhos.append(spearman([p[0] for p in pts], [p[1] for p in pts]).rho)
        except DegenerateInputError:
            continue
    mean_pct = float(np.mean(pcts)) if pcts else None
    if not rhos:
        return TableCell(None, n_total, mean_pct, reason="no per-gloss correlation computable")
    rho = float(np.mean(rhos))
    return TableCell(
        CorrelationResult(rho=rho, p_value=float("nan"), n=n_total, method="per_gloss_mean"),
        n_total,
        mean_pct,
    )


def per_gloss_correlations(records, metric, direction, min_tokens=2, *, include_first_mention=False):
    """Per-(signer, gloss, session) Spearman results for one metric."""
    _, gloss_pairs = _pooled_pairs(records, metric, direction, min_tokens, include_first_mention)
    out = {}
    for key in sorted(gloss_pairs):
        pts = gloss_pairs[key]
        if len(pts) < 3:
            continue
        try:
            out[key] = spearman([p[0] for p in pts], [p[1] for p in pts])
        except DegenerateInputError:
            continue
    return out


@dataclass(frozen=True)
class DurationSummary:
    signer: str
    mean_pct_reduction: float
    p_value: float | None
    n_pairs: int


def duration_reduction_summary(pairs) -> list[DurationSummary]:
    """Mean percent duration reduction of dialogue tokens against their
    vocabulary baselines, per signer, with a signed-rank p-value."""
    by_signer: dict[str, list] = {}
    for pair in pairs:
        by_signer.setdefault(pair.dialogue_token.signer, []).append(pair)
    out = []
    for signer in sorted(by_signer):
        ps = by_signer[signer]
        pcts = [
            percent_change(p.vocab_token.duration_s, p.dialogue_token.duration_s, "reduction")
            for p in ps
        ]
        durations = [(p.vocab_token.duration_s, p.dialogue_token.duration_s) for p in ps]
        try:
            p_value = signed_rank_test(durations)
        except InsufficientDataError:
            p_value = None
        out.append(DurationSummary(signer, float(np.mean(pcts)), p_value, len(ps)))
    return out


def duration_reduction_summary_from_records(records) -> list[DurationSummary]:
    """Duration summary computed from metric records alone."""
    vocab_dur: dict[str, float] = {}
    for rec in sorted(
        (r for r in records if r.instance.condition == "vocabulary"),
        key=lambda r: (r.mention_index or 1, r.instance.signer),
    ):
        vocab_dur.setdefault(rec.instance.gloss, rec.duration_s)
    seen = set()
    by_signer: dict[str, list[tuple[float, float]]] = {}
    for rec in records:
        i = rec.instance
        if i.condition != "dialogue" or i.gloss not in vocab_dur:
            continue
        key = (i.signer, i.gloss, i.session, rec.mention_index)
        if key in seen:
            continue
        seen.add(key)
        by_signer.setdefault(i.signer, []).append((vocab_dur[i.gloss], rec.duration_s))
    out = []
    for signer in sorted(by_signer):
        durations = by_signer[signer]
        pcts = [percent_change(v, d, "reduction") for v, d in durations]
        try:
            p_value = signed_rank_test(durations)
        except InsufficientDataError:
            p_value = None
        out.append(DurationSummary(signer, float(np.mean(pcts)), p_value, len(durations)))
    return out
