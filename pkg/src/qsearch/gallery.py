"""Entities, facets, question schemas, and synthetic gallery generation.

A gallery is the search space: ``n`` person records spanning ``K``
identities, each record carrying a value token for every facet of the
schema. Records of one identity always share facet values, which makes
candidate-set semantics exact when answers are truthful. Galleries and
schemas are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .constraints import ConstraintSet, Query
from .errors import ConfigurationError, FormatError, UnknownEntityError, ValidationError

__all__ = [
    "Facet",
    "Question",
    "FacetSchema",
    "PersonRecord",
    "Gallery",
    "GalleryConfig",
    "default_schema",
    "generate_gallery",
    "true_constraints",
    "truthful_queries",
    "save_gallery",
    "load_gallery",
    "gallery_to_json",
    "gallery_from_json",
]


@dataclass(frozen=True)
class Facet:
    """One categorical appearance attribute with a finite value domain."""

    id: int
    name: str
    domain: tuple[str, ...]


@dataclass(frozen=True)
class Question:
    """A prompt shown to the user, covering one or more facets."""

    id: int
    prompt: str
    facet_ids: tuple[int, ...]


@dataclass(frozen=True)
class FacetSchema:
    """The fixed vocabulary of facets and the questions that cover them.

    Invariants enforced at construction: facet ids unique, every facet
    covered by exactly one question, every domain has at least two values.
    """

    facets: tuple[Facet, ...]
    questions: tuple[Question, ...]

    def __post_init__(self) -> None:
        facet_ids = [f.id for f in self.facets]
        if len(set(facet_ids)) != len(facet_ids):
            raise ValidationError("schema: duplicate facet ids")
        for f in self.facets:
            if len(set(f.domain)) < 2:
                raise ValidationError(f"schema: facet {f.id} ({f.name}) needs >= 2 domain values")
        question_ids = [q.id for q in self.questions]
        if len(set(question_ids)) != len(question_ids):
            raise ValidationError("schema: duplicate question ids")
        covered: dict[int, int] = {}
        for q in self.questions:
            for fid in q.facet_ids:
                if fid not in set(facet_ids):
                    raise ValidationError(f"schema: question {q.id} covers unknown facet {fid}")
                if fid in covered:
                    raise ValidationError(
                        f"schema: facet {fid} covered by questions {covered[fid]} and {q.id}"
                    )
                covered[fid] = q.id
        missing = set(facet_ids) - set(covered)
        if missing:
            raise ValidationError(f"schema: facets {sorted(missing)} not covered by any question")

    @property
    def question_ids(self) -> list[int]:
        return [q.id for q in self.questions]

    @property
    def n_questions(self) -> int:
        return len(self.questions)

    def facet(self, facet_id: int) -> Facet:
        for f in self.facets:
            if f.id == facet_id:
                return f
        raise UnknownEntityError(f"unknown facet id {facet_id}")

    def question(self, question_id: int) -> Question:
        for q in self.questions:
            if q.id == question_id:
                return q
        raise UnknownEntityError(f"unknown question id {question_id}")

    def facets_of(self, question_id: int) -> tuple[int, ...]:
        return self.question(question_id).facet_ids


def default_schema() -> FacetSchema:
    """Five appearance questions over seven facets with mixed domain sizes.

    The spread of domain cardinalities (2 up to 6 values) makes questions
    differ in how strongly they narrow the search, which is what question
    ordering exploits.
    """
    facets = (
        Facet(1, "gender", ("male", "female")),
        Facet(2, "age-group", ("child", "adult", "senior")),
        Facet(3, "dress-color", ("black", "white", "red", "blue", "green", "yellow")),
        Facet(4, "dress-type", ("tshirt", "shirt", "jacket", "dress")),
        Facet(5, "footwear", ("sneakers", "boots", "sandals", "formal")),
        Facet(6, "hair", ("short-dark", "long-dark", "short-light", "long-light")),
        Facet(7, "accessory", ("none", "backpack", "handbag", "hat", "glasses")),
    )
    questions = (
        Question(1, "Describe gender of the person, age group and any action they are involved in.", (1, 2)),
        Question(2, "Describe appearance of dress that the person is wearing.", (3, 4)),
        Question(3, "Describe footwear of the person.", (5,)),
        Question(4, "Describe appearance of person's hair including color and length.", (6,)),
        Question(5, "Describe other accessories that person might be wearing or carrying or holding.", (7,)),
    )
    return FacetSchema(facets=facets, questions=questions)


@dataclass(frozen=True)
class PersonRecord:
    """One gallery image: an id, the identity it belongs to, and facet values."""

    image_id: int
    identity: int
    facet_values: Mapping[int, str]


@dataclass
class Gallery:
    """The searchable set of records. Immutable by contract after construction."""

    schema: FacetSchema
    records: list[PersonRecord]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.records:
            raise ValidationError("gallery: no records")
        self.records = sorted(self.records, key=lambda r: r.image_id)
        ids = [r.image_id for r in self.records]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ValidationError(f"gallery: duplicate image_id {dup}")
        if ids != list(range(1, len(ids) + 1)):
            raise ValidationError("gallery: image_ids must be contiguous from 1")
        identities = {r.identity for r in self.records}
        k = max(identities)
        if identities != set(range(1, k + 1)):
            raise ValidationError("gallery: identities must cover 1..K with no gaps")
        facet_ids = {f.id for f in self.schema.facets}
        by_identity: dict[int, Mapping[int, str]] = {}
        for r in self.records:
            if set(r.facet_values) != facet_ids:
                raise ValidationError(
                    f"gallery: record {r.image_id} does not assign exactly the schema facets"
                )
            for fid, token in r.facet_values.items():
                if token not in self.schema.facet(fid).domain:
                    raise ValidationError(
                        f"gallery: record {r.image_id} facet {fid} has value {token!r} "
                        f"outside the schema domain"
                    )
            prior = by_identity.setdefault(r.identity, r.facet_values)
            if dict(prior) != dict(r.facet_values):
                raise ValidationError(
                    f"gallery: identity {r.identity} has records with differing facet values"
                )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gallery):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.seed == other.seed
            and [(r.image_id, r.identity, dict(r.facet_values)) for r in self.records]
            == [(r.image_id, r.identity, dict(r.facet_values)) for r in other.records]
        )

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def n_identities(self) -> int:
        return max(r.identity for r in self.records)

    def record(self, image_id: int) -> PersonRecord:
        if 1 <= image_id <= self.n:
            return self.records[image_id - 1]
        raise UnknownEntityError(f"unknown image_id {image_id}")

    def records_of(self, identity: int) -> list[PersonRecord]:
        found = [r for r in self.records if r.identity == identity]
        if not found:
            raise UnknownEntityError(f"unknown identity {identity}")
        return found


@dataclass(frozen=True)
class GalleryConfig:
    """Parameters for synthetic gallery generation.

    ``value_distributions`` optionally maps facet_id -> per-token weights
    (aligned with the facet's domain order); omitted facets draw uniformly.
    """

    n: int
    n_identities: int
    schema: FacetSchema = field(default_factory=default_schema)
    value_distributions: Mapping[int, Sequence[float]] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"config: n must be >= 1, got {self.n}")
        if not 1 <= self.n_identities <= self.n:
            raise ConfigurationError(
                f"config: need 1 <= identities <= n, got K={self.n_identities}, n={self.n}"
            )
        if self.value_distributions is not None:
            for facet_id, weights in self.value_distributions.items():
                facet = self.schema.facet(facet_id)
                if len(weights) != len(facet.domain):
                    raise ConfigurationError(
                        f"config: facet {facet_id} has {len(facet.domain)} values "
                        f"but {len(weights)} weights"
                    )
                if any(w < 0 for w in weights):
                    raise ConfigurationError(f"config: facet {facet_id} has a negative weight")
                if sum(weights) <= 0:
                    raise ConfigurationError(f"config: facet {facet_id} weights sum to zero")


def generate_gallery(config: GalleryConfig, seed: int) -> Gallery:
    """Draw a gallery deterministically from (config, seed).

    Identities 1..K each get one record first; the remaining n-K records are
    assigned uniformly random identities. All records of an identity share
    the identity's facet values, drawn once per identity from the configured
    categorical weights.
    """
    rng = np.random.default_rng(seed)
    schema = config.schema
    k = config.n_identities

    profiles: dict[int, dict[int, str]] = {}
    for identity in range(1, k + 1):
        values: dict[int, str] = {}
        for facet in schema.facets:
            weights = None
            if config.value_distributions and facet.id in config.value_distributions:
                w = np.asarray(config.value_distributions[facet.id], dtype=float)
                weights = w / w.sum()
            idx = rng.choice(len(facet.domain), p=weights)
            values[facet.id] = facet.domain[int(idx)]
        profiles[identity] = values

    identities = list(range(1, k + 1))
    if config.n > k:
        identities.extend(int(i) for i in rng.integers(1, k + 1, size=config.n - k))

    records = [
        PersonRecord(image_id=i + 1, identity=ident, facet_values=dict(profiles[ident]))
        for i, ident in enumerate(identities)
    ]
    return Gallery(schema=schema, records=records, seed=seed)


def true_constraints(gallery: Gallery, identity: int, question_id: int) -> ConstraintSet:
    """The truthful answer for an identity: its actual value for each covered facet."""
    record = gallery.records_of(identity)[0]
    facet_ids = gallery.schema.facets_of(question_id)
    return ConstraintSet.of({fid: record.facet_values[fid] for fid in facet_ids})


def truthful_queries(gallery: Gallery, identities: Sequence[int]) -> list[Query]:
    """Build one fully-answered truthful query per given identity."""
    out = []
    for identity in identities:
        answers = {
            q.id: true_constraints(gallery, identity, q.id) for q in gallery.schema.questions
        }
        out.append(Query(target_identity=identity, answers=answers))
    return out


# ---------------------------------------------------------------------------
# Gallery file I/O


def gallery_to_json(gallery: Gallery) -> dict:
    from . import __version__

    return {
        "version": __version__,
        "seed": gallery.seed,
        "schema": {
            "facets": [
                {"id": f.id, "name": f.name, "domain": list(f.domain)}
                for f in gallery.schema.facets
            ],
            "questions": [
                {"id": q.id, "prompt": q.prompt, "facets": list(q.facet_ids)}
                for q in gallery.schema.questions
            ],
        },
        "records": [
            {
                "image_id": r.image_id,
                "identity": r.identity,
                "values": {str(fid): token for fid, token in sorted(r.facet_values.items())},
            }
            for r in gallery.records
        ],
    }


def _require(obj: Mapping, key: str, where: str):
    if key not in obj:
        raise FormatError(f"{where}: missing required field {key!r}")
    return obj[key]


def gallery_from_json(doc, where: str = "gallery") -> Gallery:
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected a JSON object")
    seed = _require(doc, "seed", where)
    schema_obj = _require(doc, "schema", where)
    facets = []
    for i, f in enumerate(_require(schema_obj, "facets", f"{where}.schema")):
        fw = f"{where}.schema.facets[{i}]"
        facets.append(
            Facet(
                id=int(_require(f, "id", fw)),
                name=str(_require(f, "name", fw)),
                domain=tuple(str(t) for t in _require(f, "domain", fw)),
            )
        )
    questions = []
    for i, q in enumerate(_require(schema_obj, "questions", f"{where}.schema")):
        qw = f"{where}.schema.questions[{i}]"
        questions.append(
            Question(
                id=int(_require(q, "id", qw)),
                prompt=str(_require(q, "prompt", qw)),
                facet_ids=tuple(int(x) for x in _require(q, "facets", qw)),
            )
        )
    schema = FacetSchema(facets=tuple(facets), questions=tuple(questions))
    records = []
    for i, r in enumerate(_require(doc, "records", where)):
        rw = f"{where}.records[{i}]"
        values_obj = _require(r, "values", rw)
        if not isinstance(values_obj, dict):
            raise FormatError(f"{rw}.values: expected an object")
        try:
            values = {int(k): str(v) for k, v in values_obj.items()}
        except (TypeError, ValueError):
            raise FormatError(f"{rw}.values: facet keys must be integers") from None
        records.append(
            PersonRecord(
                image_id=int(_require(r, "image_id", rw)),
                identity=int(_require(r, "identity", rw)),
                facet_values=values,
            )
        )
    return Gallery(schema=schema, records=records, seed=int(seed))


def save_gallery(gallery: Gallery, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(gallery_to_json(gallery), fh, indent=2)
        fh.write("\n")


def load_gallery(path) -> Gallery:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return gallery_from_json(doc, where=str(path))
