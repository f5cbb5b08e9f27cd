"""Affinity scoring between a description and gallery records.

Two pluggable scorers:

* ``ideal``  -- binary constraint satisfaction: 1 iff the record satisfies
  every constrained facet. Its level set at 1 is the *candidate set* of a
  description, and candidate sets only shrink as constraints accumulate.
* ``noisy``  -- a graded stand-in for an imperfect learned scorer: the
  geometric mean over constrained facets of (1 - epsilon) for satisfied and
  epsilon for violated facets. Deterministic, bounded in [0, 1], and its
  argmax set converges to the ideal candidate set as epsilon -> 0.

Scorers are pure and stateless; vectorised paths share their arithmetic
with the per-record reference functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSet
from .errors import ConfigurationError, UnknownEntityError
from .gallery import Gallery, PersonRecord

__all__ = [
    "ScorerSpec",
    "ideal_affinity",
    "noisy_affinity",
    "score_gallery",
    "candidate_set",
]


@dataclass(frozen=True)
class ScorerSpec:
    """Which scorer to use; ``epsilon`` applies to the noisy kind only."""

    kind: str = "ideal"
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("ideal", "noisy"):
            raise ConfigurationError(f"scorer kind must be 'ideal' or 'noisy', got {self.kind!r}")
        if self.kind == "noisy":
            if self.epsilon is None or not 0.0 < self.epsilon < 0.5:
                raise ConfigurationError(
                    f"noisy scorer needs 0 < epsilon < 0.5, got {self.epsilon!r}"
                )

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "noisy":
            out["epsilon"] = self.epsilon
        return out

    @staticmethod
    def from_json(obj) -> "ScorerSpec":
        kind = obj.get("kind", "ideal") if isinstance(obj, dict) else "ideal"
        epsilon = obj.get("epsilon") if isinstance(obj, dict) else None
        return ScorerSpec(kind=kind, epsilon=epsilon)


def _satisfied_count(description: ConstraintSet, record: PersonRecord) -> int:
    count = 0
    for facet_id, admissible in description.constraints.items():
        if facet_id not in record.facet_values:
            raise UnknownEntityError(f"record {record.image_id} has no facet {facet_id}")
        if record.facet_values[facet_id] in admissible:
            count += 1
    return count


def ideal_affinity(description: ConstraintSet, record: PersonRecord) -> int:
    """1 iff every constrained facet's value is admissible; empty description -> 1."""
    total = len(description)
    return 1 if _satisfied_count(description, record) == total else 0


def noisy_affinity(description: ConstraintSet, record: PersonRecord, epsilon: float) -> float:
    """Geometric mean over constrained facets of (1-eps | satisfied, eps | violated)."""
    if not 0.0 < epsilon < 0.5:
        raise ConfigurationError(f"noisy scorer needs 0 < epsilon < 0.5, got {epsilon!r}")
    total = len(description)
    if total == 0:
        return 1.0
    satisfied = _satisfied_count(description, record)
    return math.exp(
        (satisfied * math.log1p(-epsilon) + (total - satisfied) * math.log(epsilon)) / total
    )


class _GalleryCodes:
    """Integer-coded facet values for vectorised scoring, cached per gallery."""

    def __init__(self, gallery: Gallery) -> None:
        self.n = gallery.n
        self.token_index: dict[int, dict[str, int]] = {}
        self.codes: dict[int, np.ndarray] = {}
        self.domain_size: dict[int, int] = {}
        for facet in gallery.schema.facets:
            index = {token: i for i, token in enumerate(facet.domain)}
            self.token_index[facet.id] = index
            self.domain_size[facet.id] = len(facet.domain)
            self.codes[facet.id] = np.array(
                [index[r.facet_values[facet.id]] for r in gallery.records], dtype=np.int32
            )
        self.identities = np.array([r.identity for r in gallery.records], dtype=np.int32)
        self.image_ids = np.array([r.image_id for r in gallery.records], dtype=np.int32)

    def satisfaction_counts(self, description: ConstraintSet) -> tuple[np.ndarray, int]:
        """Per-record count of satisfied constraints and the constraint total."""
        satisfied = np.zeros(self.n, dtype=np.int32)
        for facet_id, admissible in description.constraints.items():
            if facet_id not in self.codes:
                raise UnknownEntityError(f"unknown facet id {facet_id}")
            lut = np.zeros(self.domain_size[facet_id], dtype=bool)
            index = self.token_index[facet_id]
            for token in admissible:
                if token in index:
                    lut[index[token]] = True
            satisfied += lut[self.codes[facet_id]]
        return satisfied, len(description)


def gallery_codes(gallery: Gallery) -> _GalleryCodes:
    cached = getattr(gallery, "_qsearch_codes", None)
    if cached is None:
        cached = _GalleryCodes(gallery)
        gallery._qsearch_codes = cached  # idempotent; gallery is immutable by contract
    return cached


def scores_from_counts(
    spec: ScorerSpec, satisfied: np.ndarray, total: int
) -> np.ndarray:
    """Affinities for records with ``satisfied`` of ``total`` constraints met."""
    if total == 0:
        return np.ones(len(satisfied), dtype=float)
    if spec.kind == "ideal":
        return (satisfied == total).astype(float)
    log_hit = math.log1p(-spec.epsilon)
    log_miss = math.log(spec.epsilon)
    return np.exp((satisfied * log_hit + (total - satisfied) * log_miss) / total)


def score_gallery(spec: ScorerSpec, description: ConstraintSet, gallery: Gallery) -> np.ndarray:
    """Affinity of the description against every record, aligned with record order."""
    satisfied, total = gallery_codes(gallery).satisfaction_counts(description)
    return scores_from_counts(spec, satisfied, total)


def candidate_set(description: ConstraintSet, gallery: Gallery) -> set[int]:
    """Image ids of exactly the records the ideal scorer accepts."""
    scores = score_gallery(ScorerSpec("ideal"), description, gallery)
    codes = gallery_codes(gallery)
    return {int(i) for i in codes.image_ids[scores == 1.0]}
