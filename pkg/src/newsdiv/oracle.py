"""Exhaustive reference maximizers for small candidate pools.

These exist to pin down ground truth in tests and experiments. They refuse
pools whose enumeration would be too large instead of silently grinding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .aspect_model import AspectSchema
from .errors import ContractError, GuardExceededError
from .metrics import (
    DocumentProfile,
    TIE_TOLERANCE,
    Window,
    collection_diversity,
    doc_distance,
    window_slice,
)

# Refuse exhaustive subset enumeration beyond this many combinations.
ENUMERATION_GUARD = 10**7


@dataclass(frozen=True)
class OracleResult:
    best_subset: tuple[str, ...]
    best_value: float
    evaluated: int

    def as_dict(self) -> dict:
        return {
            "best_subset": list(self.best_subset),
            "best_value": self.best_value,
            "evaluated": self.evaluated,
        }


def max_diversity_oracle(schema: AspectSchema, pool: Sequence[DocumentProfile], k: int) -> OracleResult:
    """Exact maximum-diversity k-subset by exhaustive enumeration.

    Pool is sorted by document id and subsets are visited in lexicographic
    index order with a strictly-greater comparison, so ties resolve to the
    lexicographically smallest id tuple. Guarded: C(|pool|, k) above
    ENUMERATION_GUARD raises GuardExceededError instead of running.
    """
    n = len(pool)
    if k < 1 or k > n:
        raise ContractError(f"k must satisfy 1 <= k <= |pool| (got k={k}, |pool|={n})")
    total = math.comb(n, k)
    if total > ENUMERATION_GUARD:
        raise GuardExceededError(
            f"C({n}, {k}) = {total} exceeds the enumeration guard "
            f"({ENUMERATION_GUARD}); use greedy_select for pools this large"
        )
    docs = sorted(pool, key=lambda d: d.id)
    matrix = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = doc_distance(schema, docs[i], docs[j])
            matrix[i][j] = d
            matrix[j][i] = d

    pairs = k * (k - 1) // 2
    best_combo = None
    best_sum = -1.0
    for combo in combinations(range(n), k):
        s = 0.0
        for a in range(k):
            row = matrix[combo[a]]
            for b in range(a + 1, k):
                s += row[combo[b]]
        if s > best_sum:
            best_sum = s
            best_combo = combo
    chosen = [docs[i] for i in best_combo]
    # Recompute through the metric itself so the reported value is exactly
    # what collection_diversity(best_subset) returns.
    value = collection_diversity(schema, chosen).overall if pairs else 0.0
    return OracleResult(
        best_subset=tuple(d.id for d in chosen),
        best_value=value,
        evaluated=total,
    )


def max_sequence_oracle(
    schema: AspectSchema,
    history: Sequence[DocumentProfile],
    candidates: Sequence[DocumentProfile],
    window: Window,
    gamma: float = 0.5,
) -> str:
    """Reference next-item choice: exhaustively score every candidate.

    Primary score is the diversity of the windowed history plus the
    candidate. Candidates within TIE_TOLERANCE of the best compare on the
    gamma-weighted distance to window items (most recent item has age 0);
    remaining ties go to the smaller id via the id-sorted scan order.
    """
    if not candidates:
        raise ContractError("candidate set must be non-empty")
    if not 0.0 < gamma <= 1.0:
        raise ContractError(f"gamma must lie in (0, 1] (got {gamma!r})")
    recent = window_slice(history, window)

    def recency_affinity(cand: DocumentProfile) -> float:
        score = 0.0
        for age, doc in enumerate(reversed(recent)):
            score += (gamma**age) * doc_distance(schema, cand, doc)
        return score

    best_id = None
    best_primary = -1.0
    best_secondary = -1.0
    for cand in sorted(candidates, key=lambda d: d.id):
        primary = collection_diversity(schema, list(recent) + [cand]).overall
        if primary > best_primary + TIE_TOLERANCE:
            best_id = cand.id
            best_primary = primary
            best_secondary = recency_affinity(cand)
        elif primary >= best_primary - TIE_TOLERANCE:
            secondary = recency_affinity(cand)
            if secondary > best_secondary:
                best_id = cand.id
                best_primary = primary
                best_secondary = secondary
    return best_id
