"""Retrieval rank, tie policies, mean rank, accuracy, and entropy."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_instance
from qsearch.constraints import ConstraintSet, Query
from qsearch.errors import ConfigurationError, UnknownEntityError, ValidationError
from qsearch.gallery import Facet, FacetSchema, Gallery, PersonRecord, Question
from qsearch.metrics import (
    Ranking,
    entropy,
    identity_entropy,
    max_entropy,
    mean_rank,
    performance,
    rank_images,
    rank_of,
    retrieve_topk,
    topk_accuracy,
)
from qsearch.scorer import ScorerSpec, score_gallery


def test_retrieve_topk_unique_argmax():
    assert retrieve_topk([0.2, 0.9, 0.5], 1) == [2]


def test_retrieve_topk_ties_break_by_id(tiny_gallery):
    scores = score_gallery(ScorerSpec("ideal"), ConstraintSet.of({1: "a"}), tiny_gallery)
    assert retrieve_topk(scores, 3) == [1, 2, 5]


def test_retrieve_topk_k_out_of_range():
    with pytest.raises(ConfigurationError):
        retrieve_topk([0.1, 0.2], 0)
    with pytest.raises(ConfigurationError):
        retrieve_topk([0.1, 0.2], 3)


def test_retrieve_topk_scale_invariance():
    rng = np.random.default_rng(2)
    for _ in range(20):
        scores = rng.random(12)
        assert retrieve_topk(scores, 5) == retrieve_topk(scores * 7.3, 5)


def test_rank_of_unique_candidate(tiny_gallery):
    scores = score_gallery(
        ScorerSpec("ideal"), ConstraintSet.of({1: "a", 2: "x", 3: "p"}), tiny_gallery
    )
    assert rank_of(scores, tiny_gallery, 1).rank == 1.0


def test_rank_of_tie_policies(tiny_gallery):
    scores = [1, 1, 0, 0, 1]  # target identity 1 tied in a 3-way block
    assert rank_of(scores, tiny_gallery, 1, "expected").rank == pytest.approx(2.0)
    assert rank_of(scores, tiny_gallery, 1, "optimistic").rank == 1.0
    assert rank_of(scores, tiny_gallery, 1, "pessimistic").rank == 3.0
    assert rank_of(scores, tiny_gallery, 1).tied_block_size == 3


def test_rank_of_unknown_target(tiny_gallery):
    with pytest.raises(UnknownEntityError):
        rank_of([1, 0, 0, 0, 0], tiny_gallery, 42)


def test_rank_of_multi_record_target_expected():
    # two records of the target inside a 3-way tie: expected min position 4/3
    schema = FacetSchema(
        facets=(Facet(1, "f", ("a", "b")),),
        questions=(Question(1, "?", (1,)),),
    )
    records = [
        PersonRecord(1, 1, {1: "a"}),
        PersonRecord(2, 1, {1: "a"}),
        PersonRecord(3, 2, {1: "a"}),
        PersonRecord(4, 3, {1: "b"}),
    ]
    gallery = Gallery(schema=schema, records=records, seed=0)
    report = rank_of([1, 1, 1, 0], gallery, 1, "expected")
    assert report.rank == pytest.approx(4 / 3)
    assert rank_of([1, 1, 1, 0], gallery, 1, "pessimistic").rank == 2.0
    assert rank_of([1, 1, 1, 0], gallery, 1, "optimistic").rank == 1.0


def test_expected_rank_matches_monte_carlo_shuffles():
    rng = np.random.default_rng(7)
    gallery, _ = random_instance(rng, max_n=20, n_queries=1)
    scores = np.round(rng.random(gallery.n) * 3) / 3  # force ties
    target = int(rng.integers(1, gallery.n_identities + 1))
    expected = rank_of(scores, gallery, target, "expected").rank

    identities = np.array([r.identity for r in gallery.records])
    target_mask = identities == target
    best = scores[target_mask].max()
    above = int((scores > best).sum())
    block = np.flatnonzero(scores == best)
    is_target = target_mask[block]
    draws = []
    for _ in range(4000):
        order = rng.permutation(len(block))
        draws.append(above + 1 + int(np.flatnonzero(is_target[order]).min()))
    assert expected == pytest.approx(np.mean(draws), abs=0.05 * gallery.n)


def test_mean_rank_examples(tiny_gallery, tiny_query):
    # candidate sets of size 1, 3, 5 -> expected ranks 1, 2, 3
    assert (1 + 2 + 3) / 3 == 2.0
    # vacuous prefix: full-gallery tie
    assert mean_rank([], [tiny_query], tiny_gallery, ScorerSpec("ideal")) == pytest.approx(3.0)
    # single query, one question asked
    assert mean_rank([1], [tiny_query], tiny_gallery, ScorerSpec("ideal")) == pytest.approx(2.0)


def test_mean_rank_candidate_set_sizes_example():
    # build one gallery where three queries see candidate sets of sizes 1, 3, 5
    schema = FacetSchema(
        facets=(Facet(1, "f", ("a", "b", "c", "d")),),
        questions=(Question(1, "?", (1,)),),
    )
    values = ["a", "b", "b", "b", "c", "c", "c", "c", "c"]
    records = [PersonRecord(i + 1, i + 1, {1: v}) for i, v in enumerate(values)]
    gallery = Gallery(schema=schema, records=records, seed=0)
    queries = [
        Query(target_identity=1, answers={1: ConstraintSet.of({1: "a"})}),
        Query(target_identity=2, answers={1: ConstraintSet.of({1: "b"})}),
        Query(target_identity=5, answers={1: ConstraintSet.of({1: "c"})}),
    ]
    assert mean_rank([1], queries, gallery, ScorerSpec("ideal")) == pytest.approx(2.0)


def test_mean_rank_requires_queries(tiny_gallery):
    with pytest.raises(ValidationError):
        mean_rank([1], [], tiny_gallery, ScorerSpec("ideal"))


def test_performance_definition():
    assert performance(2.0, 10) == 8.0
    assert performance((5 + 1) / 2, 5) == 2.0
    assert performance(1.0, 5) == 4.0
    with pytest.raises(ValidationError):
        performance(0.5, 5)


def test_topk_accuracy(tiny_gallery):
    ranking = Ranking(order=(3, 4, 1, 2, 5))
    assert topk_accuracy([(ranking, 1)], tiny_gallery, 1) == 0.0
    assert topk_accuracy([(ranking, 1)], tiny_gallery, 5) == 1.0
    top = Ranking(order=(1, 2, 3, 4, 5))
    assert topk_accuracy([(top, 1), (top, 1)], tiny_gallery, 1) == 1.0


def test_topk_accuracy_after_full_session(tiny_gallery, tiny_query):
    description = tiny_query.fused([1, 2, 3])
    scores = score_gallery(ScorerSpec("ideal"), description, tiny_gallery)
    ranking = rank_images(scores)
    assert topk_accuracy([(ranking, 1)], tiny_gallery, 1) == 1.0


def test_entropy_values(tiny_gallery):
    assert entropy([1, 0, 0, 0]) == 0.0
    assert entropy([0.25, 0.25, 0.25, 0.25]) == pytest.approx(math.log(4), abs=1e-9)
    assert entropy([3, 3, 3, 3]) == pytest.approx(math.log(4), abs=1e-9)
    assert entropy([1, 1, 0, 0, 1]) == pytest.approx(math.log(3), abs=1e-9)
    assert entropy([0, 0, 0]) == pytest.approx(math.log(3), abs=1e-9)
    with pytest.raises(ValidationError):
        entropy([0.5, -0.1])


def test_entropy_bounds_and_scale_invariance():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        scores = rng.random(n) * rng.choice([0.01, 1.0, 100.0])
        value = entropy(scores)
        assert -1e-12 <= value <= math.log(n) + 1e-12
        assert entropy(scores * 5.0) == pytest.approx(value, abs=1e-9)


def test_identity_entropy_groups_images():
    schema = FacetSchema(
        facets=(Facet(1, "f", ("a", "b")),),
        questions=(Question(1, "?", (1,)),),
    )
    records = [
        PersonRecord(1, 1, {1: "a"}),
        PersonRecord(2, 1, {1: "a"}),
        PersonRecord(3, 2, {1: "b"}),
    ]
    gallery = Gallery(schema=schema, records=records, seed=0)
    # image-level entropy sees three outcomes; identity-level sees two
    assert entropy([1, 1, 2]) == pytest.approx(-0.25 * math.log(0.25) * 2 - 0.5 * math.log(0.5))
    assert identity_entropy([1, 1, 2], gallery) == pytest.approx(math.log(2), abs=1e-9)


def test_max_entropy():
    assert max_entropy(5) == pytest.approx(math.log(5))
    with pytest.raises(ConfigurationError):
        max_entropy(0)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_tie_policy_ordering_property(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    gallery, _ = random_instance(rng, max_n=15, n_queries=1)
    scores = np.round(rng.random(gallery.n) * 2) / 2
    target = int(rng.integers(1, gallery.n_identities + 1))
    optimistic = rank_of(scores, gallery, target, "optimistic").rank
    expected = rank_of(scores, gallery, target, "expected").rank
    pessimistic = rank_of(scores, gallery, target, "pessimistic").rank
    assert optimistic <= expected <= pessimistic
    report = rank_of(scores, gallery, target, "expected")
    if report.tied_block_size == 1:
        assert optimistic == expected == pessimistic
    assert 1.0 <= expected <= gallery.n


def test_mean_rank_weakly_decreases_with_prefix_growth():
    rng = np.random.default_rng(17)
    for _ in range(10):
        gallery, queries = random_instance(rng, max_n=25, n_queries=4)
        order = gallery.schema.question_ids
        previous = float("inf")
        for size in range(1, len(order) + 1):
            m = mean_rank(order[:size], queries, gallery, ScorerSpec("ideal"))
            assert m <= previous + 1e-9
            previous = m
