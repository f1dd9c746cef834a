"""Diversification procedures: the four recommendation-surface modes.

Lists are improved by swapping items against a pool, or built greedily from
scratch; sequences pick the next item against a recency window; summaries
pick maximally distant sources; interaction suggestions extend a user's
interaction history in the direction that raises type-weighted diversity.

Every procedure is deterministic: float ties resolve through documented
secondary criteria and finally through id order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .aspect_model import AspectSchema
from .errors import ContractError, UnknownEntityError
from .metrics import (
    DiversityReport,
    DocumentProfile,
    InteractionLog,
    InteractionRecord,
    TIE_TOLERANCE,
    Window,
    collection_diversity,
    doc_distance,
    docs_per_type,
    interaction_diversity,
    keyword_diversity,
    window_slice,
)

# A swap must improve overall diversity by more than this to be accepted.
SWAP_EPSILON = 1e-12

# Default decay for the recency tie-break in sequence mode.
DEFAULT_GAMMA = 0.5


@dataclass(frozen=True)
class RerankRequest:
    """Bundle of knobs for a diversification call."""

    mode: str = "list"
    k: int = 5
    weights: Mapping[str, float] | None = None  # blend override
    lam: float | None = None
    window: Window | None = None
    gamma: float = DEFAULT_GAMMA
    swap_budget: int | None = None


@dataclass(frozen=True)
class RerankResult:
    """Outcome of a diversification procedure.

    `trace` is a tuple of decision records (dicts with a 'kind' and a
    human-readable 'detail') covering seeds, additions, swaps, rule effects,
    and warnings. `keyword_diversity` is only set by summary mode when the
    selected sources carry keywords.
    """

    selected: tuple[str, ...]
    diversity: DiversityReport
    objective: float
    trace: tuple[dict, ...] = ()
    keyword_diversity: float | None = None

    def as_dict(self) -> dict:
        out = {
            "selected": list(self.selected),
            "diversity": self.diversity.as_dict(),
            "objective": self.objective,
            "trace": [dict(t) for t in self.trace],
        }
        if self.keyword_diversity is not None:
            out["keyword_diversity"] = self.keyword_diversity
        return out


def exclude_history(
    candidates: Sequence[DocumentProfile], history_ids: set[str]
) -> list[DocumentProfile]:
    """Novelty pre-filter: drop candidates the user has already consumed."""
    return [c for c in candidates if c.id not in history_ids]


def _check_unique_ids(docs: Sequence[DocumentProfile], what: str) -> None:
    ids = [d.id for d in docs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ContractError(f"{what} contains duplicate document ids: {dupes}")


def swap_diversify(
    schema: AspectSchema,
    items: Sequence[DocumentProfile],
    pool: Sequence[DocumentProfile],
    budget: int,
) -> RerankResult:
    """Improve an existing list by swapping members against the pool.

    Each round prefers to remove the list item whose removal hurts diversity
    least (the overrepresented one; ties to the smaller id) and insert the
    pool item whose substitution helps most (ties to the smaller id). When
    the preferred removal admits no improving insertion, the next removal
    candidate in preference order is tried, so the loop only stops when no
    single exchange improves diversity by more than SWAP_EPSILON. The
    trajectory is therefore strictly increasing and ends at the budget or at
    a swap-neighborhood local optimum. Swapped-out items return to the pool
    and may be reconsidered later.
    """
    if not items:
        raise ContractError("swap_diversify needs a non-empty starting list")
    if budget < 0:
        raise ContractError(f"swap budget must be >= 0 (got {budget})")
    _check_unique_ids(list(items) + list(pool), "list plus pool")

    current = list(items)
    available = list(pool)
    trace: list[dict] = []
    for _ in range(budget):
        if not available:
            break
        before = collection_diversity(schema, current).overall

        # Removal preference: highest remainder diversity, then smaller id.
        def remainder_value(idx: int) -> float:
            rest = current[:idx] + current[idx + 1:]
            return collection_diversity(schema, rest).overall

        removal_order = sorted(
            range(len(current)), key=lambda i: (-remainder_value(i), current[i].id)
        )

        chosen_idx = None
        best_sub = None
        best_after = -1.0
        for idx in removal_order:
            remainder = current[:idx] + current[idx + 1:]
            # Insertion choice: highest resulting diversity, then smaller id.
            for cand in sorted(available, key=lambda d: d.id):
                value = collection_diversity(schema, remainder + [cand]).overall
                if value > best_after:
                    best_after = value
                    best_sub = cand
                    chosen_idx = idx
            if best_after > before + SWAP_EPSILON:
                break
        if best_after <= before + SWAP_EPSILON:
            break
        removed = current[chosen_idx]
        current[chosen_idx] = best_sub
        available = [d for d in available if d.id != best_sub.id] + [removed]
        trace.append(
            {
                "kind": "swap",
                "out": removed.id,
                "in": best_sub.id,
                "before": before,
                "after": best_after,
                "detail": (
                    f"swapped out {removed.id} for {best_sub.id}: "
                    f"diversity {before:.12g} -> {best_after:.12g}"
                ),
            }
        )

    report = collection_diversity(schema, current)
    return RerankResult(
        selected=tuple(d.id for d in current),
        diversity=report,
        objective=report.overall,
        trace=tuple(trace),
    )


def greedy_select(schema: AspectSchema, pool: Sequence[DocumentProfile], k: int) -> RerankResult:
    """Build a k-list greedily, maximizing diversity at each step.

    Seeding is deterministic: take the most distant pair (ties to the
    lexicographically smallest sorted id pair) and start from its smaller
    id. Each later step adds the candidate that maximizes the diversity of
    the grown selection, ties to the smaller id.
    """
    n = len(pool)
    if k < 1 or k > n:
        raise ContractError(f"k must satisfy 1 <= k <= |pool| (got k={k}, |pool|={n})")
    _check_unique_ids(pool, "pool")
    docs = sorted(pool, key=lambda d: d.id)
    trace: list[dict] = []

    if n == 1:
        seed = docs[0]
        trace.append(
            {
                "kind": "seed",
                "doc": seed.id,
                "detail": f"seeded with {seed.id} (only candidate)",
            }
        )
    else:
        best_pair = None
        best_dist = -1.0
        for i in range(n):
            for j in range(i + 1, n):
                d = doc_distance(schema, docs[i], docs[j])
                if d > best_dist:
                    best_dist = d
                    best_pair = (docs[i], docs[j])
        seed = best_pair[0]
        trace.append(
            {
                "kind": "seed",
                "doc": seed.id,
                "detail": (
                    f"seeded with {seed.id}, smaller id of most distant pair "
                    f"({best_pair[0].id}, {best_pair[1].id}) at distance {best_dist:.12g}"
                ),
            }
        )

    selected = [seed]
    remaining = [d for d in docs if d.id != seed.id]
    while len(selected) < k:
        before = collection_diversity(schema, selected).overall
        best_cand = None
        best_value = -1.0
        for cand in remaining:  # already id-sorted
            value = collection_diversity(schema, selected + [cand]).overall
            if value > best_value:
                best_value = value
                best_cand = cand
        selected.append(best_cand)
        remaining = [d for d in remaining if d.id != best_cand.id]
        trace.append(
            {
                "kind": "add",
                "doc": best_cand.id,
                "before": before,
                "after": best_value,
                "gain": best_value - before,
                "detail": (
                    f"added {best_cand.id}: diversity {before:.12g} -> {best_value:.12g}"
                ),
            }
        )

    report = collection_diversity(schema, selected)
    return RerankResult(
        selected=tuple(d.id for d in selected),
        diversity=report,
        objective=report.overall,
        trace=tuple(trace),
    )


def next_in_sequence(
    schema: AspectSchema,
    history: Sequence[DocumentProfile],
    candidates: Sequence[DocumentProfile],
    window: Window,
    gamma: float = DEFAULT_GAMMA,
) -> str:
    """Pick the candidate that most diversifies the recent window.

    Primary criterion: diversity of the windowed history with the candidate
    appended. Within TIE_TOLERANCE, prefer the candidate with the larger
    gamma-decayed distance to the window (age 0 = most recent item). Final
    ties go to the smaller id via the id-sorted scan.
    """
    if not candidates:
        raise ContractError("candidate set must be non-empty")
    if not 0.0 < gamma <= 1.0:
        raise ContractError(f"gamma must lie in (0, 1] (got {gamma!r})")
    recent = window_slice(history, window)

    best_id = None
    best_primary = -1.0
    best_secondary = -1.0
    for cand in sorted(candidates, key=lambda d: d.id):
        primary = collection_diversity(schema, list(recent) + [cand]).overall
        secondary = 0.0
        for age, doc in enumerate(reversed(recent)):
            secondary += (gamma**age) * doc_distance(schema, cand, doc)
        if primary > best_primary + TIE_TOLERANCE:
            best_id, best_primary, best_secondary = cand.id, primary, secondary
        elif primary >= best_primary - TIE_TOLERANCE and secondary > best_secondary:
            best_id, best_primary, best_secondary = cand.id, primary, secondary
    return best_id


def select_summary_sources(schema: AspectSchema, pool: Sequence[DocumentProfile], k: int) -> RerankResult:
    """Pick k maximally diverse source articles for a summary.

    Selection delegates to greedy_select. When the chosen sources carry
    keywords, the pooled keyword diversity rides along in the result; a
    zero-diversity selection of two or more sources gets a warning record.
    """
    result = greedy_select(schema, pool, k)
    by_id = {d.id: d for d in pool}
    trace = list(result.trace)
    kd = None
    pooled = [kw for doc_id in result.selected for kw in by_id[doc_id].keywords]
    if pooled:
        kd = keyword_diversity(schema, pooled)
        trace.append(
            {
                "kind": "keyword_diversity",
                "value": kd,
                "detail": f"pooled keyword diversity of selected sources: {kd:.12g}",
            }
        )
    if len(result.selected) >= 2 and result.diversity.overall == 0.0:
        trace.append(
            {
                "kind": "warning",
                "detail": "selected sources are indistinguishable under the schema "
                "(zero diversity)",
            }
        )
    return replace(result, trace=tuple(trace), keyword_diversity=kd)


def suggest_interaction(
    schema: AspectSchema,
    corpus_docs: Mapping[str, DocumentProfile],
    log: InteractionLog,
    options: Sequence[tuple[str, str]],
) -> tuple[str, str]:
    """Choose the (document, interaction type) that most diversifies the log.

    Options are (doc id, type) pairs. Primary criterion: type-weighted
    overall diversity of the log extended by that interaction. Within
    TIE_TOLERANCE, prefer the higher per-type diversity of the option's own
    type; remaining ties go to the lexicographically smaller (type, id).
    Returns (doc id, type).
    """
    if not options:
        raise ContractError("options must be non-empty")
    unresolved = sorted({doc_id for doc_id, _ in options if doc_id not in corpus_docs})
    if unresolved:
        raise UnknownEntityError(
            f"options reference unknown documents: {unresolved}"
        )
    last_ts = max((r.ts for r in log.records), default=0)

    def extended(doc_id: str, itype: str) -> InteractionLog:
        record = InteractionRecord(user="suggestion", doc=doc_id, type=itype, ts=last_ts + 1)
        return InteractionLog(
            records=log.records + (record,), type_weights=log.type_weights
        )

    best = None
    best_overall = -1.0
    best_own = -1.0
    for doc_id, itype in sorted(options, key=lambda o: (o[1], o[0])):
        ext = extended(doc_id, itype)
        overall = interaction_diversity(schema, corpus_docs, ext)
        group = docs_per_type(corpus_docs, ext).get(itype, [])
        own = collection_diversity(schema, group).overall if len(group) >= 2 else 0.0
        if overall > best_overall + TIE_TOLERANCE:
            best, best_overall, best_own = (doc_id, itype), overall, own
        elif overall >= best_overall - TIE_TOLERANCE and own > best_own:
            best, best_overall, best_own = (doc_id, itype), overall, own
    return best


def rerank_combined(
    schema: AspectSchema,
    pool: Sequence[DocumentProfile],
    k: int,
    lam: float,
) -> RerankResult:
    """Greedy relevance/diversity blend.

    Step score for candidate c given selection S:

        lam * relevance(c) + (1 - lam) * diversity(S + [c])

    lam = 1 degenerates to top-k by relevance (id tie-break); lam = 0
    delegates to greedy_select so the pure-diversity path keeps its
    farthest-pair seeding. The reported objective is
    lam * mean_relevance(selected) + (1 - lam) * diversity(selected).
    """
    n = len(pool)
    if k < 1 or k > n:
        raise ContractError(f"k must satisfy 1 <= k <= |pool| (got k={k}, |pool|={n})")
    if not 0.0 <= lam <= 1.0:
        raise ContractError(f"lambda must lie in [0, 1] (got {lam!r})")
    missing = sorted(d.id for d in pool if d.relevance is None)
    if missing:
        raise ContractError(f"documents missing relevance scores: {missing}")
    _check_unique_ids(pool, "pool")

    if lam == 0.0:
        base = greedy_select(schema, pool, k)
        trace = list(base.trace)
        trace.append(
            {
                "kind": "note",
                "detail": "lambda = 0: selection delegated to pure diversity greedy",
            }
        )
        return replace(base, trace=tuple(trace), objective=base.diversity.overall)

    docs = sorted(pool, key=lambda d: d.id)
    selected: list[DocumentProfile] = []
    remaining = list(docs)
    trace: list[dict] = []
    while len(selected) < k:
        best_cand = None
        best_score = None
        best_div = 0.0
        for cand in remaining:  # id-sorted
            div_after = collection_diversity(schema, selected + [cand]).overall
            score = lam * cand.relevance + (1.0 - lam) * div_after
            if best_score is None or score > best_score:
                best_score = score
                best_cand = cand
                best_div = div_after
        selected.append(best_cand)
        remaining = [d for d in remaining if d.id != best_cand.id]
        trace.append(
            {
                "kind": "add",
                "doc": best_cand.id,
                "relevance": best_cand.relevance,
                "diversity_after": best_div,
                "score": best_score,
                "detail": (
                    f"added {best_cand.id}: score {best_score:.12g} "
                    f"(relevance {best_cand.relevance:.12g}, "
                    f"diversity {best_div:.12g}, lambda {lam:.12g})"
                ),
            }
        )

    report = collection_diversity(schema, selected)
    mean_rel = sum(d.relevance for d in selected) / len(selected)
    objective = lam * mean_rel + (1.0 - lam) * report.overall
    return RerankResult(
        selected=tuple(d.id for d in selected),
        diversity=report,
        objective=objective,
        trace=tuple(trace),
    )


def combined_objective(schema: AspectSchema, docs: Sequence[DocumentProfile], lam: float) -> float:
    """Set-level objective rerank_combined reports: blend of mean relevance
    and diversity."""
    if not docs:
        return 0.0
    mean_rel = sum(d.relevance for d in docs) / len(docs)
    return lam * mean_rel + (1.0 - lam) * collection_diversity(schema, docs).overall
