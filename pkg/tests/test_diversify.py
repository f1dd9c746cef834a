"""Greedy, swap, sequence, summary, interaction, and blended re-ranking."""

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from newsdiv.aspect_model import AspectSchema, make_aspect
from newsdiv.diversify import (
    combined_objective,
    exclude_history,
    greedy_select,
    next_in_sequence,
    rerank_combined,
    select_summary_sources,
    suggest_interaction,
    swap_diversify,
)
from newsdiv.errors import ContractError, UnknownEntityError
from newsdiv.metrics import (
    DocumentProfile,
    InteractionLog,
    InteractionRecord,
    Window,
    collection_diversity,
)
from newsdiv.oracle import max_diversity_oracle, max_sequence_oracle

from helpers import random_docs, random_schema


def doc(doc_id, topic, frame, **kw):
    return DocumentProfile(id=doc_id, labels={"topic": topic, "frame": frame}, **kw)


def one_aspect_schema():
    aspect = make_aspect("topic", ["C", "I"], distances={("C", "I"): 1.0})
    return AspectSchema(aspects=(aspect,), weights={"topic": 1.0})


# --- greedy selection ---


def test_greedy_reaches_oracle_value_on_example_pool(schema, pool):
    for k in range(1, 9):
        greedy = greedy_select(schema, pool, k)
        oracle = max_diversity_oracle(schema, pool, k)
        assert greedy.diversity.overall == pytest.approx(oracle.best_value, abs=1e-9), k


def test_greedy_selection_order_is_frozen(schema, pool):
    result = greedy_select(schema, pool, 8)
    assert result.selected == ("a1", "a7", "a2", "a8", "a3", "a5", "a4", "a6")


def test_greedy_k4(schema, pool):
    result = greedy_select(schema, pool, 4)
    assert result.selected == ("a1", "a7", "a2", "a8")
    assert result.diversity.overall == pytest.approx(3 / 4, abs=1e-9)
    assert result.objective == result.diversity.overall
    kinds = [t["kind"] for t in result.trace]
    assert kinds == ["seed", "add", "add", "add"]
    # growing past the perfect pair necessarily dilutes the mean
    afters = [t["after"] for t in result.trace[1:]]
    assert afters == pytest.approx([1.0, 3 / 4, 3 / 4], abs=1e-9)


def test_greedy_k1_takes_smaller_id_of_most_distant_pair(schema, pool):
    assert greedy_select(schema, pool, 1).selected == ("a1",)


def test_greedy_seed_tie_breaks_to_smallest_id_pair():
    aspect = make_aspect(
        "topic", ["A", "B", "C"],
        distances={("A", "B"): 1.0, ("A", "C"): 1.0, ("B", "C"): 1.0},
    )
    schema = AspectSchema(aspects=(aspect,), weights={"topic": 1.0})
    docs = [
        DocumentProfile(id="z", labels={"topic": "A"}),
        DocumentProfile(id="m", labels={"topic": "B"}),
        DocumentProfile(id="k", labels={"topic": "C"}),
    ]
    # every pair is at distance 1; (k, m) is the lexicographically smallest
    assert greedy_select(schema, docs, 2).selected == ("k", "m")


def test_greedy_rejects_bad_k_and_duplicate_ids(schema, pool):
    with pytest.raises(ContractError, match="k must satisfy"):
        greedy_select(schema, pool, 0)
    with pytest.raises(ContractError, match="k must satisfy"):
        greedy_select(schema, pool, 9)
    with pytest.raises(ContractError, match="duplicate"):
        greedy_select(schema, pool + [pool[0]], 2)


@given(st.integers(min_value=0, max_value=3_000))
def test_greedy_never_beats_the_oracle(seed):
    rng = random.Random(seed)
    schema = random_schema(rng, max_aspects=3, max_labels=5)
    docs = random_docs(rng, schema, rng.randint(1, 8))
    k = rng.randint(1, len(docs))
    greedy = greedy_select(schema, docs, k)
    oracle = max_diversity_oracle(schema, docs, k)
    assert greedy.diversity.overall <= oracle.best_value + 1e-9


# --- swap-based improvement ---


def swap_fixture(schema):
    items = [doc(f"s{i}", "Climate", "Health") for i in range(1, 5)]
    pool = [
        doc("p1", "Immigration", "Security"),
        doc("p2", "Climate", "Cultural"),
        doc("p3", "Immigration", "Economy"),
    ]
    return items, pool


def test_swap_worked_example(schema):
    items, pool = swap_fixture(schema)
    result = swap_diversify(schema, items, pool, budget=3)
    swaps = [t for t in result.trace if t["kind"] == "swap"]
    assert len(swaps) == 3
    assert result.diversity.overall == pytest.approx(3 / 4, abs=1e-9)
    # matches the exhaustive optimum over the 7-doc union
    union = items + pool
    oracle = max_diversity_oracle(schema, union, 4)
    assert result.diversity.overall == pytest.approx(oracle.best_value, abs=1e-9)
    for record in swaps:
        assert record["after"] > record["before"]


def test_swap_keeps_list_length_and_position(schema):
    items, pool = swap_fixture(schema)
    result = swap_diversify(schema, items, pool, budget=3)
    assert len(result.selected) == 4
    assert len(set(result.selected)) == 4


def test_swap_leaves_optimal_list_unchanged(schema, pool, by_id):
    items = [by_id[i] for i in ("a1", "a2", "a7", "a8")]
    rest = [d for d in pool if d.id not in {"a1", "a2", "a7", "a8"}]
    result = swap_diversify(schema, items, rest, budget=5)
    assert result.selected == ("a1", "a2", "a7", "a8")
    assert not [t for t in result.trace if t["kind"] == "swap"]


def test_swap_budget_zero_is_identity(schema):
    items, pool = swap_fixture(schema)
    result = swap_diversify(schema, items, pool, budget=0)
    assert result.selected == tuple(d.id for d in items)


def test_swap_validation(schema):
    items, pool = swap_fixture(schema)
    with pytest.raises(ContractError):
        swap_diversify(schema, [], pool, budget=1)
    with pytest.raises(ContractError):
        swap_diversify(schema, items, pool, budget=-1)
    with pytest.raises(ContractError, match="duplicate"):
        swap_diversify(schema, items + [items[0]], pool, budget=1)


@given(st.integers(min_value=0, max_value=3_000))
def test_swap_trajectory_is_strictly_increasing(seed):
    rng = random.Random(seed)
    schema = random_schema(rng, max_aspects=3, max_labels=5)
    docs = random_docs(rng, schema, rng.randint(3, 12))
    split = rng.randint(1, len(docs) - 1)
    items, pool = docs[:split], docs[split:]
    budget = rng.randint(0, 6)
    start = collection_diversity(schema, items).overall
    result = swap_diversify(schema, items, pool, budget)
    swaps = [t for t in result.trace if t["kind"] == "swap"]
    assert len(swaps) <= budget
    last = start
    for record in swaps:
        assert record["before"] == pytest.approx(last, abs=1e-12)
        assert record["after"] > record["before"]
        last = record["after"]
    assert result.diversity.overall >= start - 1e-12


# --- sequence mode ---


def test_next_prefers_the_window_diversifier(schema):
    history = [doc("h1", "Climate", "Health"), doc("h2", "Immigration", "Security")]
    candidates = [doc("c1", "Climate", "Health"), doc("c2", "Immigration", "Economy")]
    assert next_in_sequence(schema, history, candidates, Window("last", 2)) == "c2"


def test_next_breaks_primary_ties_by_recency_affinity(schema):
    # both candidates lift the window to 3/4; the Cultural/Climate one sits
    # farther from the most recent item under gamma decay
    history = [doc("h1", "Climate", "Health"), doc("h2", "Immigration", "Security")]
    candidates = [doc("n1", "Immigration", "Cultural"), doc("n2", "Climate", "Cultural")]
    assert next_in_sequence(schema, history, candidates, Window("last", 2)) == "n2"


def test_next_breaks_full_ties_by_id(schema):
    history = [doc("h1", "Climate", "Health"), doc("h2", "Immigration", "Security")]
    # fully symmetric pair: same primary diversity and same decayed affinity
    candidates = [doc("n2", "Climate", "Security"), doc("n1", "Immigration", "Health")]
    assert next_in_sequence(schema, history, candidates, Window("last", 2)) == "n1"


def test_next_on_empty_window_falls_back_to_smallest_id(schema):
    history = [doc("h1", "Climate", "Health", timestamp=1)]
    candidates = [doc("c2", "Immigration", "Security"), doc("c1", "Climate", "Economy")]
    assert next_in_sequence(schema, history, candidates, Window("last", 0)) == "c1"


def test_next_validation(schema):
    history = [doc("h1", "Climate", "Health")]
    cands = [doc("c1", "Immigration", "Security")]
    with pytest.raises(ContractError):
        next_in_sequence(schema, history, [], Window("last", 1))
    with pytest.raises(ContractError, match="gamma"):
        next_in_sequence(schema, history, cands, Window("last", 1), gamma=2.0)


@given(st.integers(min_value=0, max_value=3_000))
def test_next_matches_the_sequence_oracle(seed):
    rng = random.Random(seed)
    schema = random_schema(rng, max_aspects=3, max_labels=5)
    import dataclasses

    history = random_docs(rng, schema, rng.randint(0, 8))
    candidates = [
        dataclasses.replace(c, id="c" + c.id)  # keep ids disjoint from history
        for c in random_docs(rng, schema, rng.randint(1, 8))
    ]
    window = Window("last", rng.randint(0, len(history)))
    gamma = rng.choice([0.25, 0.5, 1.0])
    assert next_in_sequence(schema, history, candidates, window, gamma) == (
        max_sequence_oracle(schema, history, candidates, window, gamma)
    )


# --- summary mode ---


def test_summary_sources_carry_keyword_diversity(schema, pool):
    result = select_summary_sources(schema, pool, 4)
    assert result.selected == ("a1", "a7", "a2", "a8")
    assert result.diversity.overall == pytest.approx(3 / 4, abs=1e-9)
    assert result.keyword_diversity == pytest.approx(3 / 4, abs=1e-9)
    assert any(t["kind"] == "keyword_diversity" for t in result.trace)


def test_summary_without_keywords_omits_the_field(schema):
    bare = [doc("b1", "Climate", "Health"), doc("b2", "Immigration", "Security")]
    result = select_summary_sources(schema, bare, 2)
    assert result.keyword_diversity is None
    assert "keyword_diversity" not in result.as_dict()


def test_summary_warns_on_indistinguishable_sources(schema):
    clones = [doc(f"c{i}", "Climate", "Health") for i in range(3)]
    result = select_summary_sources(schema, clones, 2)
    assert result.diversity.overall == 0.0
    assert any(t["kind"] == "warning" for t in result.trace)


# --- interaction mode ---


def test_suggest_interaction_worked_example(schema):
    corpus_docs = {
        "d1": doc("d1", "Climate", "Health"),
        "d2": doc("d2", "Immigration", "Security"),
        "d3": doc("d3", "Climate", "Cultural"),
    }
    log = InteractionLog(
        records=(
            InteractionRecord(user="u", doc="d1", type="like", ts=1),
            InteractionRecord(user="u", doc="d1", type="share", ts=2),
        ),
        type_weights={"like": 0.5, "share": 0.5},
    )
    options = [("d3", "like"), ("d2", "share")]
    # sharing the cross-topic doc scores 0.5 vs 0.125 for the like option
    assert suggest_interaction(schema, corpus_docs, log, options) == ("d2", "share")


def test_suggest_interaction_validation(schema):
    corpus_docs = {"d1": doc("d1", "Climate", "Health")}
    log = InteractionLog(
        records=(InteractionRecord(user="u", doc="d1", type="like", ts=1),),
        type_weights={"like": 1.0},
    )
    with pytest.raises(ContractError):
        suggest_interaction(schema, corpus_docs, log, [])
    with pytest.raises(UnknownEntityError, match="zz"):
        suggest_interaction(schema, corpus_docs, log, [("zz", "like")])


# --- relevance/diversity blending ---


def test_lambda_zero_delegates_to_greedy(schema, pool):
    blended = rerank_combined(schema, pool, 4, 0.0)
    greedy = greedy_select(schema, pool, 4)
    assert blended.selected == greedy.selected
    assert any(t["kind"] == "note" for t in blended.trace)


def test_lambda_one_is_pure_relevance_ranking(schema, pool):
    result = rerank_combined(schema, pool, 4, 1.0)
    assert result.selected == ("a1", "a5", "a2", "a3")
    assert result.objective == pytest.approx(0.775, abs=1e-9)


def test_balanced_lambda_worked_values(schema, pool):
    result = rerank_combined(schema, pool, 4, 0.5)
    assert result.selected == ("a1", "a7", "a5", "a2")
    assert result.diversity.overall == pytest.approx(2 / 3, abs=1e-9)
    assert result.objective == pytest.approx(0.5 * (2.95 / 4) + 0.5 * (2 / 3), abs=1e-9)


def test_balanced_lambda_objective_versus_exhaustive(schema, pool, by_id):
    """Greedy stepping can land below the exhaustive objective optimum."""
    result = rerank_combined(schema, pool, 4, 0.5)
    best = max(
        combined_objective(schema, [by_id[i] for i in combo], 0.5)
        for combo in itertools.combinations(sorted(by_id), 4)
    )
    assert result.objective <= best + 1e-9
    assert best == pytest.approx(0.5 * 0.7 + 0.5 * (17 / 24), abs=1e-9)


def test_objective_recombines_relevance_and_diversity(schema, pool):
    result = rerank_combined(schema, pool, 3, 0.25)
    chosen = [d for d in pool if d.id in result.selected]
    mean_rel = sum(d.relevance for d in chosen) / 3
    div = collection_diversity(schema, chosen).overall
    assert result.objective == pytest.approx(0.25 * mean_rel + 0.75 * div, abs=1e-12)


def test_combined_rerank_validation(schema, pool):
    with pytest.raises(ContractError, match="lambda"):
        rerank_combined(schema, pool, 2, 1.5)
    with pytest.raises(ContractError, match="k must satisfy"):
        rerank_combined(schema, pool, 0, 0.5)
    unscored = [doc("u1", "Climate", "Health"), doc("u2", "Immigration", "Security")]
    with pytest.raises(ContractError, match="missing relevance.*u1.*u2"):
        rerank_combined(schema, unscored, 2, 0.5)


def test_exclude_history_filters_by_id(pool):
    kept = exclude_history(pool, {"a1", "a5"})
    assert [d.id for d in kept] == ["a2", "a3", "a4", "a6", "a7", "a8"]


# --- duplicate-member behavior ---


def test_duplicating_a_central_member_can_raise_diversity():
    """Mean pairwise distance is not duplicate-insensitive.

    With members {C, I, I, I} the mean is 0.5; appending another C raises
    it to 0.6 because new C<->I pairs outnumber the new zero pair.
    """
    schema = one_aspect_schema()
    docs = [
        DocumentProfile(id="c1", labels={"topic": "C"}),
        DocumentProfile(id="i1", labels={"topic": "I"}),
        DocumentProfile(id="i2", labels={"topic": "I"}),
        DocumentProfile(id="i3", labels={"topic": "I"}),
    ]
    assert collection_diversity(schema, docs).overall == pytest.approx(0.5, abs=1e-12)
    dup = DocumentProfile(id="c2", labels={"topic": "C"})
    assert collection_diversity(schema, docs + [dup]).overall == pytest.approx(0.6, abs=1e-12)


@given(st.integers(min_value=0, max_value=5_000))
def test_duplicating_a_min_mean_distance_member_never_raises(seed):
    rng = random.Random(seed)
    schema = random_schema(rng, max_aspects=3, max_labels=5)
    docs = random_docs(rng, schema, rng.randint(2, 10))
    from newsdiv.metrics import doc_distance

    def mean_dist(d):
        return sum(doc_distance(schema, d, o) for o in docs if o is not d) / (len(docs) - 1)

    center = min(docs, key=mean_dist)
    dup = DocumentProfile(id="dup", labels=dict(center.labels))
    before = collection_diversity(schema, docs).overall
    after = collection_diversity(schema, docs + [dup]).overall
    assert after <= before + 1e-9
