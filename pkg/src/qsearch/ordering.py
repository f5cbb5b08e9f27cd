"""Question-sequence optimisation.

The greedy strategy appends, at every step, the question whose answers most
reduce the mean rank over a set of training queries. For the ideal scorer
the improvement of a question has diminishing returns as the asked set grows
(adding constraints can only intersect candidate sets), so the greedy prefix
of size k is within a factor (1 - 1/e) of the best k-subset. Brute-force
oracles and a numerical checker for the diminishing-returns and
monotonicity properties back these claims in tests.

All operations share one cached evaluator so that a greedy run touches each
(query, question) pair once; the contract is that cached evaluations equal
recomputing the mean rank from scratch for every prefix.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .constraints import Query
from .errors import ConfigurationError, FormatError, ValidationError
from .gallery import Gallery
from .metrics import _check_policy, _rank_from_stats
from .scorer import ScorerSpec, gallery_codes, scores_from_counts

__all__ = [
    "QuestionSequence",
    "GainReport",
    "Violation",
    "MeanRankEvaluator",
    "greedy_order",
    "evaluate_order",
    "baseline_order",
    "marginal_gain",
    "brute_force_oracle",
    "check_submodularity",
    "save_sequence",
    "load_sequence",
]

BRUTE_FORCE_MAX_QUESTIONS = 8
GAIN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class QuestionSequence:
    """An ordering of question ids with the mean rank realised after each prefix."""

    order: tuple[int, ...]
    mean_rank_curve: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(set(self.order)) != len(self.order):
            raise ValidationError(f"question order has duplicates: {list(self.order)}")
        if self.mean_rank_curve is not None and len(self.mean_rank_curve) != len(self.order):
            raise ValidationError(
                f"curve length {len(self.mean_rank_curve)} != order length {len(self.order)}"
            )


@dataclass(frozen=True)
class GainReport:
    """Mean-rank improvement from asking one more question."""

    question_id: int
    delta: float


@dataclass(frozen=True)
class Violation:
    """A sampled counterexample from the diminishing-returns checker."""

    kind: str  # "submodularity" | "monotonicity"
    small_set: tuple[int, ...]
    large_set: tuple[int, ...]
    question_id: int | None
    lhs: float
    rhs: float


class MeanRankEvaluator:
    """Evaluates the mean rank of any question subset without rescanning answers.

    Per (query, question) the per-record count of satisfied constraints is
    precomputed once; a subset's affinities follow from summed counts, which
    reproduces scoring the fused description because each facet is covered
    by exactly one question.
    """

    def __init__(
        self,
        queries: Sequence[Query],
        gallery: Gallery,
        scorer: ScorerSpec = ScorerSpec("ideal"),
        tie_policy: str = "expected",
    ) -> None:
        if not queries:
            raise ValidationError("need at least one query")
        _check_policy(tie_policy)
        self.gallery = gallery
        self.scorer = scorer
        self.tie_policy = tie_policy
        self.question_ids = list(gallery.schema.question_ids)
        codes = gallery_codes(gallery)
        self.n = codes.n
        self._satisfied: list[dict[int, np.ndarray]] = []
        self._totals: list[dict[int, int]] = []
        self._target_masks: list[np.ndarray] = []
        for query in queries:
            per_question_sat: dict[int, np.ndarray] = {}
            per_question_tot: dict[int, int] = {}
            for question_id, answer in query.answers.items():
                allowed = set(gallery.schema.facets_of(question_id))
                foreign = answer.facet_ids() - allowed
                if foreign:
                    raise ValidationError(
                        f"query for identity {query.target_identity}: answer to question "
                        f"{question_id} constrains foreign facets {sorted(foreign)}"
                    )
                sat, tot = codes.satisfaction_counts(answer)
                per_question_sat[question_id] = sat
                per_question_tot[question_id] = tot
            mask = codes.identities == query.target_identity
            if not mask.any():
                raise ValidationError(f"query target identity {query.target_identity} not in gallery")
            self._satisfied.append(per_question_sat)
            self._totals.append(per_question_tot)
            self._target_masks.append(mask)
        self._cache: dict[frozenset[int], float] = {}

    @property
    def n_queries(self) -> int:
        return len(self._target_masks)

    def mean_rank(self, question_ids: Iterable[int]) -> float:
        key = frozenset(question_ids)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        total_rank = 0.0
        for sat_by_q, tot_by_q, target_mask in zip(
            self._satisfied, self._totals, self._target_masks
        ):
            satisfied = np.zeros(self.n, dtype=np.int32)
            total = 0
            for question_id in key:
                if question_id in sat_by_q:
                    satisfied = satisfied + sat_by_q[question_id]
                    total += tot_by_q[question_id]
            scores = scores_from_counts(self.scorer, satisfied, total)
            best = scores[target_mask].max()
            above = int((scores > best).sum())
            tied = int((scores == best).sum())
            tied_targets = int((target_mask & (scores == best)).sum())
            total_rank += _rank_from_stats(above, tied, tied_targets, self.tie_policy)
        value = total_rank / self.n_queries
        self._cache[key] = value
        return value

    def curve(self, order: Sequence[int]) -> list[float]:
        return [self.mean_rank(order[: i + 1]) for i in range(len(order))]

    def baseline(self) -> float:
        """Mean rank with no questions asked (full-gallery tie)."""
        return self.mean_rank(())


def greedy_order(
    queries: Sequence[Query],
    gallery: Gallery,
    scorer: ScorerSpec = ScorerSpec("ideal"),
    tie_policy: str = "expected",
) -> QuestionSequence:
    """Repeatedly append the unchosen question minimising the prefix mean rank.

    Ties break toward the lowest question id for reproducibility.
    """
    ev = MeanRankEvaluator(queries, gallery, scorer, tie_policy)
    chosen: list[int] = []
    curve: list[float] = []
    remaining = sorted(ev.question_ids)
    while remaining:
        best_id, best_m = None, None
        for question_id in remaining:
            m = ev.mean_rank(chosen + [question_id])
            if best_m is None or m < best_m:
                best_id, best_m = question_id, m
        chosen.append(best_id)
        curve.append(best_m)
        remaining.remove(best_id)
    return QuestionSequence(order=tuple(chosen), mean_rank_curve=tuple(curve))


def evaluate_order(
    order: Sequence[int],
    queries: Sequence[Query],
    gallery: Gallery,
    scorer: ScorerSpec = ScorerSpec("ideal"),
    tie_policy: str = "expected",
) -> QuestionSequence:
    """Attach the realised mean-rank curve to a given question order."""
    ev = MeanRankEvaluator(queries, gallery, scorer, tie_policy)
    return QuestionSequence(order=tuple(order), mean_rank_curve=tuple(ev.curve(order)))


def baseline_order(n_questions: int, mode: str = "random", seed: int = 0) -> QuestionSequence:
    """A reference ordering: uniform random permutation, or the identity order."""
    if n_questions < 1:
        raise ConfigurationError(f"need n_questions >= 1, got {n_questions}")
    if mode == "fixed":
        return QuestionSequence(order=tuple(range(1, n_questions + 1)))
    if mode == "random":
        rng = np.random.default_rng(seed)
        return QuestionSequence(order=tuple(int(q) for q in rng.permutation(n_questions) + 1))
    raise ConfigurationError(f"mode must be 'random' or 'fixed', got {mode!r}")


def marginal_gain(
    asked: Iterable[int],
    candidate: int,
    queries: Sequence[Query],
    gallery: Gallery,
    scorer: ScorerSpec = ScorerSpec("ideal"),
    tie_policy: str = "expected",
) -> GainReport:
    """Mean-rank drop from adding ``candidate`` to the already-asked set."""
    asked = frozenset(asked)
    if candidate in asked:
        raise ValidationError(f"candidate question {candidate} already asked")
    ev = MeanRankEvaluator(queries, gallery, scorer, tie_policy)
    delta = ev.mean_rank(asked) - ev.mean_rank(asked | {candidate})
    return GainReport(question_id=candidate, delta=delta)


def brute_force_oracle(
    queries: Sequence[Query],
    gallery: Gallery,
    scorer: ScorerSpec = ScorerSpec("ideal"),
    tie_policy: str = "expected",
    mode: str = "best_sequence",
    k: int | None = None,
):
    """Exhaustively maximise final performance over sequences or k-subsets.

    ``best_sequence`` returns the permutation with the lowest final mean
    rank (lexicographically smallest among ties) as a QuestionSequence;
    ``best_subset`` returns the k-subset whose fused answers minimise the
    mean rank. Guarded to at most 8 questions.
    """
    ev = MeanRankEvaluator(queries, gallery, scorer, tie_policy)
    question_ids = sorted(ev.question_ids)
    n_q = len(question_ids)
    if n_q > BRUTE_FORCE_MAX_QUESTIONS:
        raise ConfigurationError(
            f"brute force is limited to {BRUTE_FORCE_MAX_QUESTIONS} questions, got {n_q}"
        )
    if mode == "best_sequence":
        best_order, best_m = None, None
        for perm in itertools.permutations(question_ids):
            m = ev.mean_rank(perm)
            if best_m is None or m < best_m - GAIN_TOLERANCE:
                best_order, best_m = perm, m
        return QuestionSequence(order=best_order, mean_rank_curve=tuple(ev.curve(best_order)))
    if mode == "best_subset":
        if k is None or not 1 <= k <= n_q:
            raise ConfigurationError(f"best_subset needs 1 <= k <= {n_q}, got {k!r}")
        best_subset, best_m = None, None
        for combo in itertools.combinations(question_ids, k):
            m = ev.mean_rank(combo)
            if best_m is None or m < best_m - GAIN_TOLERANCE:
                best_subset, best_m = combo, m
        return set(best_subset)
    raise ConfigurationError(f"mode must be 'best_sequence' or 'best_subset', got {mode!r}")


def check_submodularity(
    gallery: Gallery,
    queries: Sequence[Query],
    trials: int,
    seed: int = 0,
    scorer: ScorerSpec = ScorerSpec("ideal"),
    tie_policy: str = "expected",
    tolerance: float = GAIN_TOLERANCE,
) -> list[Violation]:
    """Sample nested question sets and record every diminishing-returns breach.

    Each trial draws a chain small_set <= large_set and an extra question
    outside it, then compares the extra question's gain on both sets and the
    mean ranks along every sampled containment. Under the ideal scorer the
    returned list must be empty; under a noisy scorer counterexamples are
    reported rather than raised.
    """
    if trials < 1:
        raise ConfigurationError(f"need trials >= 1, got {trials}")
    ev = MeanRankEvaluator(queries, gallery, scorer, tie_policy)
    question_ids = sorted(ev.question_ids)
    rng = np.random.default_rng(seed)
    violations: list[Violation] = []

    def check_monotone(small: frozenset[int], large: frozenset[int]) -> None:
        m_small, m_large = ev.mean_rank(small), ev.mean_rank(large)
        if m_large > m_small + tolerance:
            violations.append(
                Violation(
                    kind="monotonicity",
                    small_set=tuple(sorted(small)),
                    large_set=tuple(sorted(large)),
                    question_id=None,
                    lhs=m_large,
                    rhs=m_small,
                )
            )

    for _ in range(trials):
        extra = int(rng.choice(question_ids))
        rest = [q for q in question_ids if q != extra]
        b_size = int(rng.integers(0, len(rest) + 1))
        large = frozenset(
            int(q) for q in (rng.choice(rest, size=b_size, replace=False) if b_size else ())
        )
        a_size = int(rng.integers(0, b_size + 1))
        small = frozenset(
            int(q)
            for q in (rng.choice(sorted(large), size=a_size, replace=False) if a_size else ())
        )

        gain_small = ev.mean_rank(small) - ev.mean_rank(small | {extra})
        gain_large = ev.mean_rank(large) - ev.mean_rank(large | {extra})
        if gain_large > gain_small + tolerance:
            violations.append(
                Violation(
                    kind="submodularity",
                    small_set=tuple(sorted(small)),
                    large_set=tuple(sorted(large)),
                    question_id=extra,
                    lhs=gain_large,
                    rhs=gain_small,
                )
            )
        check_monotone(small, large)
        check_monotone(small, small | {extra})
        check_monotone(large, large | {extra})
    return violations


# ---------------------------------------------------------------------------
# Sequence file I/O
#
# {"version": str, "seed": int, "order": [int], "mean_rank_curve": [float],
#  "tie_policy": str, "scorer": {"kind": str, "epsilon": float?}}


def save_sequence(
    sequence: QuestionSequence,
    path,
    scorer: ScorerSpec,
    tie_policy: str,
    seed: int = 0,
    extra: dict | None = None,
) -> None:
    from . import __version__

    doc = {
        "version": __version__,
        "seed": seed,
        "order": list(sequence.order),
        "mean_rank_curve": list(sequence.mean_rank_curve or []),
        "tie_policy": tie_policy,
        "scorer": scorer.to_json(),
    }
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_sequence(path) -> QuestionSequence:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "order" not in doc:
        raise FormatError(f"{path}: missing required field 'order'")
    curve = doc.get("mean_rank_curve") or None
    return QuestionSequence(
        order=tuple(int(q) for q in doc["order"]),
        mean_rank_curve=tuple(float(v) for v in curve) if curve else None,
    )
