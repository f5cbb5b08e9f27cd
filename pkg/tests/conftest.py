"""Shared fixtures: the 5-record reference gallery and random instance factories."""

from __future__ import annotations

import numpy as np
import pytest

from qsearch.constraints import Query
from qsearch.gallery import (
    Facet,
    FacetSchema,
    Gallery,
    GalleryConfig,
    PersonRecord,
    Question,
    generate_gallery,
    true_constraints,
    truthful_queries,
)

# Reference instance: five single-image identities over three binary facets.
#   img1=(a,x,p) img2=(a,y,p) img3=(b,x,p) img4=(b,y,q) img5=(a,x,q)
# One question per facet. Expected values in tests are hand-enumerated from
# this table.
TINY_VALUES = [("a", "x", "p"), ("a", "y", "p"), ("b", "x", "p"), ("b", "y", "q"), ("a", "x", "q")]


def make_tiny_gallery() -> Gallery:
    schema = FacetSchema(
        facets=(
            Facet(1, "f1", ("a", "b")),
            Facet(2, "f2", ("x", "y")),
            Facet(3, "f3", ("p", "q")),
        ),
        questions=(
            Question(1, "Describe the first attribute.", (1,)),
            Question(2, "Describe the second attribute.", (2,)),
            Question(3, "Describe the third attribute.", (3,)),
        ),
    )
    records = [
        PersonRecord(image_id=i + 1, identity=i + 1, facet_values={1: v[0], 2: v[1], 3: v[2]})
        for i, v in enumerate(TINY_VALUES)
    ]
    return Gallery(schema=schema, records=records, seed=0)


@pytest.fixture
def tiny_gallery() -> Gallery:
    return make_tiny_gallery()


@pytest.fixture
def tiny_query(tiny_gallery) -> Query:
    return truthful_queries(tiny_gallery, [1])[0]


def random_schema(rng: np.random.Generator, n_questions: int | None = None) -> FacetSchema:
    """A schema with 1-2 facets per question and domain sizes 2-5."""
    if n_questions is None:
        n_questions = int(rng.integers(2, 7))
    facets = []
    questions = []
    facet_id = 0
    for qid in range(1, n_questions + 1):
        covered = []
        for _ in range(int(rng.integers(1, 3))):
            facet_id += 1
            size = int(rng.integers(2, 6))
            domain = tuple(f"v{facet_id}_{j}" for j in range(size))
            facets.append(Facet(facet_id, f"facet{facet_id}", domain))
            covered.append(facet_id)
        questions.append(Question(qid, f"Describe attribute group {qid}.", tuple(covered)))
    return FacetSchema(facets=tuple(facets), questions=tuple(questions))


def random_instance(
    rng: np.random.Generator,
    max_n: int = 40,
    max_questions: int = 6,
    n_queries: int = 5,
    skewed: bool = False,
) -> tuple[Gallery, list[Query]]:
    """A random gallery plus truthful queries for sampled identities.

    With ``skewed`` some facets draw from a heavily lopsided distribution,
    which makes their questions much less informative than the rest.
    """
    n_questions = int(rng.integers(2, max_questions + 1))
    schema = random_schema(rng, n_questions)
    n = int(rng.integers(4, max_n + 1))
    k = int(rng.integers(2, n + 1))
    distributions = None
    if skewed:
        distributions = {}
        for facet in schema.facets:
            if rng.random() < 0.5:
                weights = np.full(len(facet.domain), 0.05)
                weights[0] = 1.0
                distributions[facet.id] = list(weights)
    config = GalleryConfig(
        n=n, n_identities=k, schema=schema, value_distributions=distributions
    )
    gallery = generate_gallery(config, seed=int(rng.integers(2**31)))
    identities = rng.choice(k, size=min(n_queries, k), replace=False) + 1
    queries = truthful_queries(gallery, [int(i) for i in identities])
    return gallery, queries


def noisy_queries(
    gallery: Gallery, identities, rng: np.random.Generator, flip_probability: float = 0.3
) -> list[Query]:
    """Truthful queries with some answers flipped to wrong in-domain values."""
    from qsearch.constraints import ConstraintSet

    out = []
    for identity in identities:
        answers = {}
        for question in gallery.schema.questions:
            truth = true_constraints(gallery, identity, question.id)
            mapping = {}
            for fid, admissible in truth.constraints.items():
                token = next(iter(admissible))
                if rng.random() < flip_probability:
                    domain = gallery.schema.facet(fid).domain
                    wrong = [t for t in domain if t != token]
                    token = wrong[int(rng.integers(len(wrong)))]
                mapping[fid] = token
            answers[question.id] = ConstraintSet.of(mapping)
        out.append(Query(target_identity=identity, answers=answers))
    return out
