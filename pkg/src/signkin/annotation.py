"""Gloss-interval annotations: parsing, mention ordering, vocabulary pairing.

Annotation files are CSV with a required header row:
``gloss,variation,signer,start_ms,end_ms,condition,session``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import AnnotationRowError, ParseError

CONDITIONS = ("dialogue", "vocabulary", "monologue", "interpreter")

_HEADER = ["gloss", "variation", "signer", "start_ms", "end_ms", "condition", "session"]


@dataclass(frozen=True)
class SignInstance:
    gloss: str
    variation: str
    signer: str
    start_ms: float
    end_ms: float
    condition: str
    session: str

    def __post_init__(self):
        if not self.start_ms < self.end_ms:
            raise AnnotationRowError(
                f"interval end {self.end_ms} must exceed start {self.start_ms}"
            )
        if self.condition not in CONDITIONS:
            raise AnnotationRowError(f"unknown condition {self.condition!r}")

    @property
    def interval(self) -> tuple[float, float]:
        return (self.start_ms, self.end_ms)

    @property
    def duration_s(self) -> float:
        return (self.end_ms - self.start_ms) / 1000.0


@dataclass(frozen=True)
class MentionSequence:
    signer: str
    gloss: str
    session: str
    tokens: tuple[SignInstance, ...]

    @property
    def key(self):
        return (self.signer, self.gloss, self.session)

    def mention_index(self, token: SignInstance) -> int:
        return self.tokens.index(token) + 1


@dataclass(frozen=True)
class BaselinePair:
    dialogue_token: SignInstance
    vocab_token: SignInstance

    def __post_init__(self):
        if self.dialogue_token.gloss != self.vocab_token.gloss:
            raise AnnotationRowError("baseline pair glosses differ")
        if self.vocab_token.condition != "vocabulary":
            raise AnnotationRowError("baseline token must be from the vocabulary condition")


def parse_annotations(stream, path=None):
    """Parse an annotation table.

    Returns ``(instances, warnings)``. Overlapping same-signer intervals are
    legal (coarticulation) but reported in the warning list.
    """
    if isinstance(stream, os.PathLike) or (
        isinstance(stream, (str, bytes)) and "\n" not in str(stream)
    ):
        with open(stream, encoding="utf-8") as fh:
            return parse_annotations(fh, path=str(stream))
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    lines = stream.splitlines() if isinstance(stream, str) else stream.read().splitlines()

    instances: list[SignInstance] = []
    warnings: list[str] = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if not header_seen:
            if parts != _HEADER:
                raise ParseError(
                    f"expected header row {','.join(_HEADER)!r}, got {line!r}",
                    line=lineno, path=path,
                )
            header_seen = True
            continue
        if len(parts) != len(_HEADER):
            raise AnnotationRowError(
                f"expected {len(_HEADER)} columns, got {len(parts)}", line=lineno, path=path
            )
        gloss, variation, signer, start_str, end_str, condition, session = parts
        try:
            start_ms = float(start_str)
            end_ms = float(end_str)
        except ValueError:
            raise AnnotationRowError(f"non-numeric interval bound in {line!r}", line=lineno, path=path) from None
        try:
            inst = SignInstance(gloss, variation, signer, start_ms, end_ms, condition, session)
        except AnnotationRowError as exc:
            raise AnnotationRowError(str(exc), line=lineno, path=path) from None
        instances.append(inst)
    if not header_seen:
        raise ParseError("missing header row", path=path)

    by_signer: dict[str, list[SignInstance]] = {}
    for inst in instances:
        by_signer.setdefault(inst.signer, []).append(inst)
    for signer, items in by_signer.items():
        items = sorted(items, key=lambda i: (i.start_ms, i.end_ms))
        for prev, cur in zip(items, items[1:]):
            if cur.start_ms < prev.end_ms and cur.condition == prev.condition and cur.session == prev.session:
                warnings.append(
                    f"overlapping intervals for signer {signer!r}: "
                    f"{prev.gloss} [{prev.start_ms},{prev.end_ms}] and {cur.gloss} [{cur.start_ms},{cur.end_ms}]"
                )
    return instances, warnings


def serialize_annotations(instances) -> str:
    lines = [",".join(_HEADER)]
    for inst in instances:
        lines.append(
            f"{inst.gloss},{inst.variation},{inst.signer},"
            f"{inst.start_ms!r},{inst.end_ms!r},{inst.condition},{inst.session}"
        )
    return "\n".join(lines) + "\n"


def _group_key(inst: SignInstance, strict_variation: bool):
    if strict_variation:
        return (inst.signer, inst.gloss, inst.variation, inst.session)
    return (inst.signer, inst.gloss, inst.session)


def mention_sequences(instances, min_tokens: int = 2, *, strict_variation: bool = False):
    """One ordered sequence per (signer, gloss, session) with >= min_tokens tokens.

    Ties in start time break by end time, then input order, so indices are
    deterministic. Variation labels do not split a sequence unless
    ``strict_variation`` is set.
    """
    groups: dict[tuple, list[tuple]] = {}
    for order, inst in enumerate(instances):
        groups.setdefault(_group_key(inst, strict_variation), []).append(
            (inst.start_ms, inst.end_ms, order, inst)
        )
    sequences = []
    for key in sorted(groups):
        items = sorted(groups[key], key=lambda t: t[:3])
        if len(items) < min_tokens:
            continue
        signer, gloss = key[0], key[1]
        session = key[-1]
        sequences.append(MentionSequence(signer, gloss, session, tuple(t[3] for t in items)))
    return sequences


def assign_mention_indices(instances, *, strict_variation: bool = False):
    """1-based mention index per instance, as a list parallel to the input."""
    instances = list(instances)
    index: dict[int, int] = {}
    for seq in mention_sequences(instances, min_tokens=1, strict_variation=strict_variation):
        for k, token in enumerate(seq.tokens, start=1):
            index[id(token)] = k
    return [index[id(inst)] for inst in instances]


def match_vocab_baseline(dialogue, vocab):
    """Pair each dialogue token with its gloss's earliest vocabulary production.

    Returns ``(pairs, unmatched_glosses)``.
    """
    for v in vocab:
        if v.condition != "vocabulary":
            raise AnnotationRowError(
                f"baseline instance for gloss {v.gloss!r} has condition {v.condition!r}"
            )
    baseline: dict[str, SignInstance] = {}
    for v in sorted(vocab, key=lambda i: (i.start_ms, i.end_ms)):
        baseline.setdefault(v.gloss, v)
    pairs = []
    unmatched = []
    for d in sorted(dialogue, key=lambda i: (i.signer, i.start_ms, i.end_ms, i.gloss)):
        if d.gloss in baseline:
            pairs.append(BaselinePair(d, baseline[d.gloss]))
        elif d.gloss not in unmatched:
            unmatched.append(d.gloss)
    return pairs, sorted(unmatched)
