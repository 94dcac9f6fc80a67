"""Rank and regression statistics: Spearman correlation with exact
small-sample p-values, percent change, least-squares slope, and the
Wilcoxon signed-rank test."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import ArgumentError, DegenerateInputError, InsufficientDataError

EXACT_PERMUTATION_CUTOFF = 8  # 8! = 40,320 permutations
EXACT_SIGNED_RANK_CUTOFF = 12  # 2^12 = 4,096 sign assignments


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int
    method: str


def percent_change(first: float, current: float, direction: str) -> float:
    """Signed percent change where positive always means the named direction."""
    if first == 0:
        raise ArgumentError("percent change undefined for a zero baseline")
    if direction == "reduction":
        return 100.0 * (first - current) / first
    if direction == "increase":
        return 100.0 * (current - first) / first
    raise ArgumentError(f"unknown direction {direction!r}")


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(a @ a) * float(b @ b))
    return float(a @ b) / denom


def spearman(x, y) -> CorrelationResult:
    """Spearman rank correlation with a two-tailed p-value.

    Ties get average ranks. The p-value is exact (full permutation
    enumeration) for n <= 8 and a t-approximation above.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ArgumentError(f"length mismatch: {x.shape} vs {y.shape}")
    n = len(x)
    if n < 3:
        raise ArgumentError(f"need at least 3 samples, got {n}")
    rx = sps.rankdata(x)
    ry = sps.rankdata(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        raise DegenerateInputError("zero variance in a rank vector")
    rho = _pearson(rx, ry)
    rho = max(-1.0, min(1.0, rho))
    if n <= EXACT_PERMUTATION_CUTOFF:
        p = _exact_permutation_p(rx, ry, rho)
        method = "exact_permutation"
    else:
        if abs(rho) >= 1.0:
            p = 0.0
        else:
            t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
            p = 2.0 * float(sps.t.sf(abs(t), df=n - 2))
        method = "t_approx"
    return CorrelationResult(rho=rho, p_value=min(1.0, p), n=n, method=method)


def _exact_permutation_p(rx: np.ndarray, ry: np.ndarray, observed_rho: float) -> float:
    cx = rx - rx.mean()
    ry = np.asarray(ry)
    cy0 = ry - ry.mean()
    denom = math.sqrt(float(cx @ cx) * float(cy0 @ cy0))
    threshold = abs(observed_rho) - 1e-12
    count = 0
    total = 0
    for perm in itertools.permutations(ry):
        cy = np.asarray(perm) - ry.mean()
        rho = float(cx @ cy) / denom
        if abs(rho) >= threshold:
            count += 1
        total += 1
    return count / total


def ls_slope(xs, ys) -> float:
    """Ordinary least-squares slope of ys on xs."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise ArgumentError("need two equal-length vectors of at least 2 samples")
    dx = xs - xs.mean()
    sxx = float(dx @ dx)
    if sxx == 0:
        raise DegenerateInputError("all x values equal; slope undefined")
    return float(dx @ (ys - ys.mean())) / sxx


def signed_rank_test(pairs) -> float:
    """Two-tailed Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped. Exact enumeration of all sign
    assignments for <= 12 informative pairs; normal approximation with
    continuity and tie correction above.
    """
    diffs = np.array([a - b for a, b in pairs], dtype=float)
    diffs = diffs[diffs != 0]
    n = len(diffs)
    if n < 5:
        raise InsufficientDataError(
            f"need at least 5 non-zero differences, got {n}"
        )
    ranks = sps.rankdata(np.abs(diffs))
    w_pos = float(ranks[diffs > 0].sum())
    if n <= EXACT_SIGNED_RANK_CUTOFF:
        total = 1 << n
        le = 0
        ge = 0
        for mask in range(total):
            w = 0.0
            for i in range(n):
                if mask & (1 << i):
                    w += ranks[i]
            if w <= w_pos + 1e-12:
                le += 1
            if w >= w_pos - 1e-12:
                ge += 1
        p = 2.0 * min(le, ge) / total
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        _, counts = np.unique(ranks, return_counts=True)
        var -= float(np.sum(counts**3 - counts)) / 48.0
        d = w_pos - mu
        corr = 0.5 * np.sign(d)
        z = (d - corr) / math.sqrt(var)
        p = 2.0 * float(sps.norm.sf(abs(z)))
    return min(1.0, p)


def paired_t_test(pairs) -> float:
    """Two-tailed paired t-test, offered alongside the signed-rank test."""
    a = np.array([p[0] for p in pairs], dtype=float)
    b = np.array([p[1] for p in pairs], dtype=float)
    if len(a) < 2:
        raise InsufficientDataError("need at least 2 pairs")
    res = sps.ttest_rel(a, b)
    return float(res.pvalue)


def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
