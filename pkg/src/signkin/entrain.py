"""Embedding-based entrainment metrics over externally supplied sign
embeddings: cross-signer cosine change, convergence slopes, self-similarity,
and projection onto the inter-signer axis."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateInputError,
    InsufficientDataError,
    NormalizationError,
    ParseError,
)
from .stats import ls_slope


@dataclass(frozen=True)
class EmbeddingToken:
    gloss: str
    signer: str
    mention_index: int
    start_ms: float
    end_ms: float
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))


@dataclass(frozen=True)
class GlossEntrainment:
    gloss: str
    delta_cos: float
    slope_a_to_b: float | None
    slope_b_to_a: float | None
    selfsim_a: float
    selfsim_b: float
    projection: tuple[tuple[str, int, float], ...]  # (signer, mention_index, sim)


@dataclass(frozen=True)
class EntrainmentReport:
    signer_a: str
    signer_b: str
    per_gloss: tuple[GlossEntrainment, ...]


def pool_normalize(frames) -> np.ndarray:
    """Mean over frame vectors, scaled to unit L2 norm."""
    arr = np.asarray(frames, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ArgumentError("need a non-empty 2D stack of frame vectors")
    mean = arr.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise NormalizationError("mean of frame vectors is the zero vector")
    return mean / norm


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ArgumentError("cosine undefined for a zero vector")
    return float(a @ b / (na * nb))


def _ordered(tokens):
    return sorted(tokens, key=lambda t: (t.mention_index, t.start_ms))


def delta_cos(tokens_a, tokens_b, *, literal: bool = False) -> float:
    """Change in cross-signer similarity from first to last repetitions:
    cos(last_a, last_b) - cos(first_a, first_b).

    ``literal`` switches to the audit variant cos(x_1, x_T) - 1 over the
    chronologically merged token stream, which is non-positive by
    construction.
    """
    ta, tb = _ordered(tokens_a), _ordered(tokens_b)
    if len(ta) < 2 or len(tb) < 2:
        raise InsufficientDataError("each signer needs at least 2 tokens")
    if literal:
        merged = sorted(ta + tb, key=lambda t: (t.start_ms, t.signer))
        return cosine(merged[0].vector, merged[-1].vector) - 1.0
    return cosine(ta[-1].vector, tb[-1].vector) - cosine(ta[0].vector, tb[0].vector)


def cross_slope(tokens_a, tokens_b) -> float:
    """Slope of cos(x_i^A, x_1^B) over i: does A drift toward B's initial token?"""
    ta, tb = _ordered(tokens_a), _ordered(tokens_b)
    if len(ta) < 2 or len(tb) < 1:
        raise InsufficientDataError("need >= 2 tokens for A and >= 1 for B")
    b_first = tb[0].vector
    sims = [cosine(t.vector, b_first) for t in ta]
    return ls_slope(list(range(1, len(ta) + 1)), sims)


def self_similarity(tokens) -> float:
    """cos(first, last) within one signer's token sequence."""
    ts = _ordered(tokens)
    if len(ts) < 2:
        raise InsufficientDataError("need at least 2 tokens")
    return cosine(ts[0].vector, ts[-1].vector)


def projection_similarity(x, mu_a, mu_b) -> float:
    """Position of x along the mu_a -> mu_b axis, scaled to -1 at mu_a and
    +1 at mu_b (values outside the segment exceed [-1, 1])."""
    x = np.asarray(x, dtype=float)
    mu_a = np.asarray(mu_a, dtype=float)
    mu_b = np.asarray(mu_b, dtype=float)
    axis = mu_b - mu_a
    denom = float(axis @ axis)
    if denom == 0.0:
        raise DegenerateInputError("signer means coincide; projection axis undefined")
    return 2.0 * float((x - mu_a) @ axis) / denom - 1.0


def entrainment_report(
    tokens,
    signer_a: str,
    signer_b: str,
    *,
    min_tokens: int = 2,
    literal_delta_cos: bool = False,
    global_means: bool = False,
) -> EntrainmentReport:
    """Per-gloss entrainment metrics for glosses where both signers have
    at least ``min_tokens`` productions.

    Signer means for the projection axis are per-gloss by default;
    ``global_means`` pools all of a signer's tokens instead.
    """
    by_gloss: dict[str, dict[str, list[EmbeddingToken]]] = {}
    for tok in tokens:
        by_gloss.setdefault(tok.gloss, {}).setdefault(tok.signer, []).append(tok)

    global_mu = {}
    if global_means:
        for signer in (signer_a, signer_b):
            vecs = [t.vector for t in tokens if t.signer == signer]
            if vecs:
                global_mu[signer] = np.mean(vecs, axis=0)

    entries = []
    for gloss in sorted(by_gloss):
        signers = by_gloss[gloss]
        ta = _ordered(signers.get(signer_a, []))
        tb = _ordered(signers.get(signer_b, []))
        if len(ta) < min_tokens or len(tb) < min_tokens:
            continue
        mu_a = global_mu.get(signer_a) if global_means else np.mean([t.vector for t in ta], axis=0)
        mu_b = global_mu.get(signer_b) if global_means else np.mean([t.vector for t in tb], axis=0)
        projection = []
        try:
            for tok in sorted(ta + tb, key=lambda t: (t.start_ms, t.signer)):
                projection.append(
                    (tok.signer, tok.mention_index, projection_similarity(tok.vector, mu_a, mu_b))
                )
        except DegenerateInputError:
            projection = []
        entries.append(
            GlossEntrainment(
                gloss=gloss,
                delta_cos=delta_cos(ta, tb, literal=literal_delta_cos),
                slope_a_to_b=cross_slope(ta, tb),
                slope_b_to_a=cross_slope(tb, ta),
                selfsim_a=self_similarity(ta),
                selfsim_b=self_similarity(tb),
                projection=tuple(projection),
            )
        )
    return EntrainmentReport(signer_a=signer_a, signer_b=signer_b, per_gloss=tuple(entries))


def parse_embedding_file(stream, path=None) -> list[EmbeddingToken]:
    """Token file: ``#dim=<d>`` header then
    ``gloss,signer,mention_index,start_ms,end_ms,v1,...,vd`` rows."""
    if isinstance(stream, os.PathLike) or (
        isinstance(stream, (str, bytes)) and "\n" not in str(stream)
    ):
        with open(stream, encoding="utf-8") as fh:
            return parse_embedding_file(fh, path=str(stream))
    lines = (stream if isinstance(stream, str) else stream.read()).splitlines()
    dim = None
    tokens = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key.strip() == "dim":
                dim = int(value)
            continue
        if dim is None:
            raise ParseError("missing #dim= header before body rows", line=lineno, path=path)
        parts = line.split(",")
        if len(parts) != 5 + dim:
            raise ParseError(
                f"expected {5 + dim} columns for dim={dim}, got {len(parts)}",
                line=lineno, path=path,
            )
        gloss, signer, mention, start, end = parts[:5]
        vec = np.array([float(v) for v in parts[5:]], dtype=float)
        tokens.append(
            EmbeddingToken(gloss, signer, int(mention), float(start), float(end), vec)
        )
    if dim is None:
        raise ParseError("missing #dim= header", path=path)
    return tokens


def serialize_embedding_file(tokens) -> str:
    if not tokens:
        raise ArgumentError("cannot serialize an empty token list")
    dim = len(tokens[0].vector)
    for t in tokens:
        if len(t.vector) != dim:
            raise ArgumentError("inconsistent embedding dimensions")
    lines = [f"#dim={dim}"]
    for t in tokens:
        vals = ",".join(repr(float(v)) for v in t.vector)
        lines.append(
            f"{t.gloss},{t.signer},{t.mention_index},{t.start_ms!r},{t.end_ms!r},{vals}"
        )
    return "\n".join(lines) + "\n"
