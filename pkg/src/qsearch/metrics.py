"""Retrieval and uncertainty metrics.

Rank of a target is the position of its best-scoring record in the gallery
sorted by decreasing affinity. Ties are resolved by policy:

* ``optimistic``  -- the target's tied record is placed first in its block,
* ``pessimistic`` -- every non-target tied record is placed ahead of it,
* ``expected``    -- the expected minimum position of the target's records
  under a uniformly random shuffle of the tied block, which for a block of
  size t containing m target records is b + (t + 1) / (m + 1) with b records
  strictly above. With binary ideal scores and a single target record this
  reduces to (|candidates| + 1) / 2.

Entropy is Shannon entropy (natural log, nats) of the affinity vector
normalised to a distribution; an all-zero vector reads as "no information"
and is assigned the uniform maximum ln n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constraints import Query
from .errors import ConfigurationError, UnknownEntityError, ValidationError
from .gallery import Gallery
from .scorer import ScorerSpec, gallery_codes, score_gallery

__all__ = [
    "TIE_POLICIES",
    "Ranking",
    "RankReport",
    "rank_images",
    "retrieve_topk",
    "rank_of",
    "mean_rank",
    "performance",
    "topk_accuracy",
    "entropy",
    "identity_entropy",
    "max_entropy",
]

TIE_POLICIES = ("expected", "optimistic", "pessimistic")


@dataclass(frozen=True)
class Ranking:
    """Gallery image ids in decreasing-affinity order (ties by ascending id)."""

    order: tuple[int, ...]
    tie_policy: str = "expected"


@dataclass(frozen=True)
class RankReport:
    rank: float
    tied_block_size: int


def _check_policy(tie_policy: str) -> None:
    if tie_policy not in TIE_POLICIES:
        raise ConfigurationError(f"tie policy must be one of {TIE_POLICIES}, got {tie_policy!r}")


def _as_scores(affinities) -> np.ndarray:
    scores = np.asarray(affinities, dtype=float)
    if scores.ndim != 1 or scores.size == 0:
        raise ValidationError("affinities must be a nonempty 1-d vector")
    return scores


def retrieve_topk(affinities, k: int) -> list[int]:
    """The k highest-scoring image ids, descending score, ties by ascending id."""
    scores = _as_scores(affinities)
    n = scores.size
    if not 1 <= k <= n:
        raise ConfigurationError(f"k must satisfy 1 <= k <= {n}, got {k}")
    # stable sort on ascending id, then stable sort on descending score
    order = np.argsort(-scores, kind="stable")
    return [int(i) + 1 for i in order[:k]]


def rank_images(affinities, tie_policy: str = "expected") -> Ranking:
    """Full ranking of the gallery for display; the policy tags how ties read."""
    _check_policy(tie_policy)
    scores = _as_scores(affinities)
    return Ranking(order=tuple(retrieve_topk(scores, scores.size)), tie_policy=tie_policy)


def _rank_from_stats(above: int, tied: int, tied_targets: int, tie_policy: str) -> float:
    if tie_policy == "optimistic":
        return float(above + 1)
    if tie_policy == "pessimistic":
        return float(above + (tied - tied_targets) + 1)
    return above + (tied + 1) / (tied_targets + 1)


def rank_of(
    affinities, gallery: Gallery, target_identity: int, tie_policy: str = "expected"
) -> RankReport:
    """Rank of the target's best record under the given tie policy."""
    _check_policy(tie_policy)
    scores = _as_scores(affinities)
    codes = gallery_codes(gallery)
    if scores.size != codes.n:
        raise ValidationError(f"affinity length {scores.size} != gallery size {codes.n}")
    target_mask = codes.identities == target_identity
    if not target_mask.any():
        raise UnknownEntityError(f"unknown identity {target_identity}")
    best = scores[target_mask].max()
    above = int((scores > best).sum())
    tied = int((scores == best).sum())
    tied_targets = int((target_mask & (scores == best)).sum())
    return RankReport(
        rank=_rank_from_stats(above, tied, tied_targets, tie_policy),
        tied_block_size=tied,
    )


def mean_rank(
    sequence_prefix: Sequence[int],
    queries: Sequence[Query],
    gallery: Gallery,
    scorer: ScorerSpec,
    tie_policy: str = "expected",
) -> float:
    """Mean over queries of the target rank after fusing the prefix's answers."""
    if not queries:
        raise ValidationError("mean_rank needs at least one query")
    total = 0.0
    for query in queries:
        description = query.fused(sequence_prefix)
        scores = score_gallery(scorer, description, gallery)
        total += rank_of(scores, gallery, query.target_identity, tie_policy).rank
    return total / len(queries)


def performance(mean_rank_value: float, n: int) -> float:
    """Gallery size minus mean rank; larger is better, 0 <= value <= n - 1."""
    if not 1 <= mean_rank_value <= n:
        raise ValidationError(f"mean rank must lie in [1, {n}], got {mean_rank_value}")
    return n - mean_rank_value


def topk_accuracy(
    rankings: Sequence[tuple[Ranking, int]], gallery: Gallery, k: int
) -> float:
    """Fraction of queries whose target identity owns an image among the first k."""
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    if not rankings:
        raise ValidationError("topk_accuracy needs at least one ranking")
    hits = 0
    for ranking, target_identity in rankings:
        head = ranking.order[:k]
        if any(gallery.record(image_id).identity == target_identity for image_id in head):
            hits += 1
    return hits / len(rankings)


def entropy(affinities) -> float:
    """Shannon entropy (nats) of the normalised affinity vector; all-zero -> ln n."""
    scores = _as_scores(affinities)
    if (scores < 0).any():
        raise ValidationError("affinities must be nonnegative")
    total = scores.sum()
    if total == 0.0:
        return math.log(scores.size)
    p = scores / total
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum()) + 0.0  # normalise -0.0


def identity_entropy(affinities, gallery: Gallery) -> float:
    """Entropy over identities instead of images: affinity mass summed per identity.

    A variant for galleries whose identities repeat; the per-image entropy
    above is the default everywhere else in the package.
    """
    scores = _as_scores(affinities)
    codes = gallery_codes(gallery)
    if scores.size != codes.n:
        raise ValidationError(f"affinity length {scores.size} != gallery size {codes.n}")
    per_identity = np.bincount(codes.identities, weights=scores)[1:]
    return entropy(per_identity)


def max_entropy(n: int) -> float:
    """Entropy of the uniform distribution over n items, ln n."""
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    return math.log(n)
