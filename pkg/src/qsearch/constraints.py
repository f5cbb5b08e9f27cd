"""Facet constraints: the structured form of an answer to an appearance question.

A :class:`ConstraintSet` maps facet ids to sets of admissible value tokens.
A record satisfies the set when every constrained facet's value lies in the
admissible set. Answers accumulated over several questions are *fused* into a
single ConstraintSet; for facets constrained more than once the admissible
sets are intersected, so fusing is exactly "satisfy all answers at once".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import FormatError, ValidationError

__all__ = ["ConstraintSet", "Query", "load_queries", "save_queries"]


@dataclass(frozen=True)
class ConstraintSet:
    """Map of facet_id -> frozenset of admissible value tokens.

    Construct with :meth:`of` (validates that admissible sets are nonempty);
    fused sets produced by :meth:`fuse` may contain an empty admissible set,
    which marks the description as unsatisfiable by any record.
    """

    constraints: Mapping[int, frozenset[str]] = field(default_factory=dict)

    @staticmethod
    def of(mapping: Mapping[int, object]) -> "ConstraintSet":
        """Build from facet_id -> token or iterable of tokens, validating content."""
        out: dict[int, frozenset[str]] = {}
        for facet_id, tokens in mapping.items():
            if isinstance(tokens, str):
                tokens = [tokens]
            admissible = frozenset(str(t) for t in tokens)
            if not admissible:
                raise ValidationError(f"facet {facet_id}: empty admissible set")
            out[int(facet_id)] = admissible
        return ConstraintSet(out)

    @staticmethod
    def empty() -> "ConstraintSet":
        return ConstraintSet({})

    def fuse(self, other: "ConstraintSet") -> "ConstraintSet":
        """Combine with another answer; shared facets keep only commonly admissible tokens."""
        merged = dict(self.constraints)
        for facet_id, admissible in other.constraints.items():
            if facet_id in merged:
                merged[facet_id] = merged[facet_id] & admissible
            else:
                merged[facet_id] = admissible
        return ConstraintSet(merged)

    def facet_ids(self) -> set[int]:
        return set(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self) -> Iterator[tuple[int, frozenset[str]]]:
        return iter(sorted(self.constraints.items()))

    def __bool__(self) -> bool:
        return bool(self.constraints)

    def is_subset_of(self, other: "ConstraintSet") -> bool:
        """True when every record admitted by ``other`` is admitted by ``self``."""
        for facet_id, admissible in self.constraints.items():
            if facet_id not in other.constraints:
                return False
            if not other.constraints[facet_id] <= admissible:
                return False
        return True

    def to_json(self) -> dict[str, list[str]]:
        """JSON form: facet ids as strings, tokens sorted, facets in id order."""
        return {
            str(facet_id): sorted(admissible)
            for facet_id, admissible in sorted(self.constraints.items())
        }

    @staticmethod
    def from_json(obj: Mapping[str, object], where: str = "constraints") -> "ConstraintSet":
        if not isinstance(obj, Mapping):
            raise FormatError(f"{where}: expected an object of facet -> token list")
        out: dict[int, frozenset[str]] = {}
        for key, tokens in obj.items():
            try:
                facet_id = int(key)
            except (TypeError, ValueError):
                raise FormatError(f"{where}: facet key {key!r} is not an integer") from None
            if isinstance(tokens, str):
                tokens = [tokens]
            if not isinstance(tokens, (list, tuple)) or not tokens:
                raise FormatError(f"{where}[{key}]: expected a nonempty list of tokens")
            out[facet_id] = frozenset(str(t) for t in tokens)
        return ConstraintSet(out)


@dataclass(frozen=True)
class Query:
    """A search target together with its per-question answers.

    ``answers`` maps question_id -> ConstraintSet holding only facets covered
    by that question. Questions without an answer contribute no constraints.
    """

    target_identity: int
    answers: Mapping[int, ConstraintSet]

    def fused(self, question_ids) -> ConstraintSet:
        """Fuse the answers of the given questions into one description."""
        out = ConstraintSet.empty()
        for question_id in question_ids:
            answer = self.answers.get(question_id)
            if answer is not None:
                out = out.fuse(answer)
        return out


# ---------------------------------------------------------------------------
# Query file I/O
#
# {"version": str, "seed": int, "queries": [
#     {"target_identity": int, "answers": {"<question_id>": {"<facet_id>": ["<token>"]}}}
# ]}


def save_queries(queries: list[Query], path, seed: int = 0) -> None:
    from . import __version__

    doc = {
        "version": __version__,
        "seed": seed,
        "queries": [
            {
                "target_identity": q.target_identity,
                "answers": {
                    str(qid): answer.to_json()
                    for qid, answer in sorted(q.answers.items())
                },
            }
            for q in queries
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_queries(path) -> list[Query]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "queries" not in doc:
        raise FormatError(f"{path}: missing required field 'queries'")
    queries: list[Query] = []
    for i, row in enumerate(doc["queries"]):
        where = f"queries[{i}]"
        if not isinstance(row, dict) or "target_identity" not in row:
            raise FormatError(f"{path}: {where}: missing required field 'target_identity'")
        answers_obj = row.get("answers", {})
        if not isinstance(answers_obj, dict):
            raise FormatError(f"{path}: {where}.answers: expected an object")
        answers: dict[int, ConstraintSet] = {}
        for key, constraints in answers_obj.items():
            try:
                question_id = int(key)
            except (TypeError, ValueError):
                raise FormatError(
                    f"{path}: {where}.answers: question key {key!r} is not an integer"
                ) from None
            answers[question_id] = ConstraintSet.from_json(
                constraints, where=f"{where}.answers[{key}]"
            )
        queries.append(Query(target_identity=int(row["target_identity"]), answers=answers))
    return queries
