"""Diversity metrics over labeled documents.

The core quantity is the mean pairwise distance of a document list:

    div(D) = (1 / (|D| * (|D| - 1))) * sum over ordered pairs of dist(d_i, d_j)

which equals the mean over unordered pairs since dist is symmetric. Document
distance blends per-aspect label distances with the schema's weights:

    dist(d_i, d_j) = sum over aspects a of w_a * dist_a(label_i, label_j)

Both live in [0, 1]. Lists with fewer than two documents score 0. Pair sums
accumulate in fixed index order so repeated runs are bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .aspect_model import AspectSchema
from .errors import ContractError, UnknownEntityError, ValidationError

# Two diversity values within this tolerance count as tied.
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Keyword:
    """A content keyword with its own aspect-label map."""

    term: str
    labels: Mapping[str, str]


@dataclass(frozen=True)
class DocumentProfile:
    """A document reduced to its aspect labels plus optional extras.

    `labels` must hold exactly one label per schema aspect (validated by the
    corpus loader). `relevance` is an optional score in [0, 1], `timestamp`
    an optional epoch-seconds integer, `keywords` optional labeled terms for
    content-level diversity.
    """

    id: str
    labels: Mapping[str, str]
    relevance: float | None = None
    timestamp: int | None = None
    keywords: tuple[Keyword, ...] = ()


@dataclass(frozen=True)
class InteractionRecord:
    user: str
    doc: str
    type: str
    ts: int


@dataclass(frozen=True)
class InteractionLog:
    """Time-stamped interaction records plus per-type blend weights."""

    records: tuple[InteractionRecord, ...]
    type_weights: Mapping[str, float]

    def __post_init__(self):
        for t, w in self.type_weights.items():
            if w < 0.0:
                raise ValidationError(
                    f"interaction type weight for {t!r} is negative ({w!r})"
                )
        total = sum(self.type_weights.values())
        if abs(total - 1.0) > TIE_TOLERANCE:
            raise ValidationError(
                f"interaction type weights must sum to 1 (got {total!r})"
            )


@dataclass(frozen=True)
class DiversityReport:
    """Overall diversity, its per-aspect decomposition, and the pair count.

    overall == sum of weight_a * per_aspect[a] up to float error, because the
    blended pair distance is linear in the per-aspect distances.
    """

    overall: float
    per_aspect: Mapping[str, float]
    pair_count: int

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "per_aspect": dict(self.per_aspect),
            "pair_count": self.pair_count,
        }


@dataclass(frozen=True)
class Window:
    """Recency window over a time-ordered sequence.

    kind "last" keeps the final `value` items; kind "cutoff" keeps items
    with timestamp >= `value`.
    """

    kind: str
    value: int

    def __post_init__(self):
        if self.kind not in ("last", "cutoff"):
            raise ValidationError(f"unknown window kind {self.kind!r}")
        if self.kind == "last" and self.value < 0:
            raise ValidationError("last-k window size must be >= 0")


def parse_window(text: str) -> Window:
    """Parse 'last:K', 'cutoff:TS', or a bare integer (meaning last:K)."""
    raw = text.strip()
    if ":" in raw:
        kind, _, num = raw.partition(":")
        kind = kind.strip()
    else:
        kind, num = "last", raw
    try:
        value = int(num)
    except ValueError:
        raise ValidationError(f"window value in {text!r} is not an integer") from None
    return Window(kind=kind, value=value)


def _aspect_distance(schema: AspectSchema, aspect_name: str, d1: DocumentProfile, d2: DocumentProfile) -> float:
    aspect = schema.aspect(aspect_name)
    for d in (d1, d2):
        if aspect_name not in d.labels:
            raise ContractError(
                f"document {d.id!r} is missing a label for aspect {aspect_name!r}"
            )
        if d.labels[aspect_name] not in aspect.label_set:
            raise UnknownEntityError(
                f"document {d.id!r} uses unknown label "
                f"{d.labels[aspect_name]!r} for aspect {aspect_name!r}"
            )
    return aspect.distances.lookup(d1.labels[aspect_name], d2.labels[aspect_name])


def doc_distance(schema: AspectSchema, d1: DocumentProfile, d2: DocumentProfile) -> float:
    """Blended distance between two documents (convex in the aspect weights)."""
    total = 0.0
    for aspect in schema.aspects:
        total += schema.weights[aspect.name] * _aspect_distance(schema, aspect.name, d1, d2)
    return total


def collection_diversity(schema: AspectSchema, docs: Sequence[DocumentProfile]) -> DiversityReport:
    """Mean pairwise blended distance, with the per-aspect decomposition.

    Fewer than two documents yields 0 everywhere (no pairs to average).
    """
    n = len(docs)
    names = schema.aspect_names()
    if n < 2:
        return DiversityReport(
            overall=0.0, per_aspect={a: 0.0 for a in names}, pair_count=0
        )
    overall_sum = 0.0
    aspect_sums = {a: 0.0 for a in names}
    for i in range(n):
        for j in range(i + 1, n):
            pair_total = 0.0
            for a in names:
                dist = _aspect_distance(schema, a, docs[i], docs[j])
                aspect_sums[a] += dist
                pair_total += schema.weights[a] * dist
            overall_sum += pair_total
    pairs = n * (n - 1) // 2
    return DiversityReport(
        overall=overall_sum / pairs,
        per_aspect={a: aspect_sums[a] / pairs for a in names},
        pair_count=pairs,
    )


def per_aspect_diversity(schema: AspectSchema, docs: Sequence[DocumentProfile], aspect_name: str) -> float:
    """Mean pairwise distance along a single aspect (weight 1 on it)."""
    schema.aspect(aspect_name)  # raises UnknownEntityError for bad names
    n = len(docs)
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += _aspect_distance(schema, aspect_name, docs[i], docs[j])
    return total / (n * (n - 1) // 2)


def _check_sorted(docs: Sequence[DocumentProfile]) -> bool:
    """True when timestamps are present; ContractError on mixed/unsorted input."""
    stamps = [d.timestamp for d in docs]
    have = [s for s in stamps if s is not None]
    if not have:
        return False
    if len(have) != len(stamps):
        raise ContractError(
            "sequence mixes documents with and without timestamps"
        )
    for earlier, later in zip(stamps, stamps[1:]):
        if later < earlier:
            raise ContractError(
                "sequence is not sorted by timestamp (non-decreasing required)"
            )
    return True


def window_slice(docs: Sequence[DocumentProfile], window: Window) -> list[DocumentProfile]:
    """Apply a recency window to a time-ordered sequence."""
    timestamped = _check_sorted(docs)
    if window.kind == "last":
        if window.value == 0:
            return []
        return list(docs[-window.value:])
    if not timestamped:
        raise ContractError("cutoff window requires timestamped documents")
    return [d for d in docs if d.timestamp >= window.value]


def window_diversity(schema: AspectSchema, docs: Sequence[DocumentProfile], window: Window) -> DiversityReport:
    """Diversity of the windowed tail of a consumption sequence.

    Order inside the window does not matter; the metric is permutation
    invariant. Unsorted input is a contract violation, not a silent re-sort.
    """
    return collection_diversity(schema, window_slice(docs, window))


def docs_per_type(corpus_docs: Mapping[str, DocumentProfile], log: InteractionLog) -> dict[str, list[DocumentProfile]]:
    """Unique documents per interaction type, in first-appearance order.

    Raises UnknownEntityError listing every record document id that does not
    resolve against the corpus.
    """
    unresolved = sorted({r.doc for r in log.records if r.doc not in corpus_docs})
    if unresolved:
        raise UnknownEntityError(
            f"interaction records reference unknown documents: {unresolved}"
        )
    grouped: dict[str, list[DocumentProfile]] = {t: [] for t in log.type_weights}
    seen: dict[str, set[str]] = {t: set() for t in log.type_weights}
    for r in log.records:
        if r.type not in grouped:
            continue  # unweighted type contributes nothing
        if r.doc in seen[r.type]:
            continue
        seen[r.type].add(r.doc)
        grouped[r.type].append(corpus_docs[r.doc])
    return grouped


def interaction_diversity(schema: AspectSchema, corpus_docs: Mapping[str, DocumentProfile], log: InteractionLog) -> float:
    """Type-weighted diversity across a user's interaction history.

    Each interaction type contributes the diversity of the distinct
    documents touched via that type; types with fewer than two documents
    contribute 0. The result is the weight-blended sum over types.
    """
    grouped = docs_per_type(corpus_docs, log)
    total = 0.0
    for t in log.type_weights:
        group = grouped[t]
        if len(group) < 2:
            continue
        total += log.type_weights[t] * collection_diversity(schema, group).overall
    return total


def keyword_diversity(schema: AspectSchema, keywords: Sequence[Keyword]) -> float:
    """Diversity of labeled keywords, treated as pseudo-documents."""
    if not keywords:
        raise ContractError("keyword diversity needs at least one keyword")
    pseudo = [
        DocumentProfile(id=f"kw{i}:{kw.term}", labels=kw.labels)
        for i, kw in enumerate(keywords)
    ]
    return collection_diversity(schema, pseudo).overall


def entropy_diversity(docs: Sequence[DocumentProfile], aspect_name: str) -> float:
    """Normalized Shannon entropy of the label distribution along one aspect.

    Normalizer is log of the number of distinct labels present (at least 2),
    so a single distinct label scores 0 and a uniform spread scores 1. This
    is the entropy-style alternative to the pairwise-mean metric; it ignores
    label distances entirely.
    """
    if not docs:
        raise ContractError("entropy diversity needs at least one document")
    counts: dict[str, int] = {}
    for d in docs:
        if aspect_name not in d.labels:
            raise UnknownEntityError(
                f"document {d.id!r} has no label for aspect {aspect_name!r}"
            )
        label = d.labels[aspect_name]
        counts[label] = counts.get(label, 0) + 1
    distinct = len(counts)
    if distinct < 2:
        return 0.0
    n = len(docs)
    entropy = 0.0
    for label in sorted(counts):
        p = counts[label] / n
        entropy -= p * math.log2(p)
    return entropy / math.log2(max(distinct, 2))
