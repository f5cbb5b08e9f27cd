"""Streaming search over an incrementally built gallery.

Frames of person detections arrive in order; the gallery starts empty and
grows as frames are consumed. After every frame each watched description is
matched against the best-scoring record seen so far, gated by a minimum
score threshold (default 0.95): no match is ever reported below it, and the
running hypothesis may change as better-scoring records arrive. Correctness
is counted instantaneously per frame (is the description's identity in the
current thresholded top-k), with a persistent has-ever-matched flag kept
alongside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from .constraints import ConstraintSet
from .errors import ConfigurationError, FormatError, ValidationError
from .gallery import PersonRecord
from .scorer import ScorerSpec, ideal_affinity, noisy_affinity

__all__ = [
    "Frame",
    "PoiDescription",
    "OnlineRow",
    "OnlineReport",
    "online_search",
    "report_to_csv",
    "save_stream",
    "load_stream",
]

DEFAULT_THRESHOLD = 0.95


@dataclass(frozen=True)
class Frame:
    """Detections arriving together at one time step."""

    index: int
    detections: tuple[PersonRecord, ...]


@dataclass(frozen=True)
class PoiDescription:
    """A watched description and the identity it is meant to find."""

    poi_id: int
    constraints: ConstraintSet


@dataclass(frozen=True)
class OnlineRow:
    frame: int
    gallery_size: int
    poi_id: int
    best_score: float
    best_image_id: int | None
    matched: bool
    topk_correct: dict[int, bool]
    topk_ever: dict[int, bool]


@dataclass
class OnlineReport:
    threshold: float
    k_list: tuple[int, ...]
    rows: list[OnlineRow] = field(default_factory=list)

    def frame_counts(self) -> list[tuple[int, int, dict[int, int]]]:
        """Per frame: (frame, gallery_size, {k: number of descriptions correct})."""
        out: dict[int, tuple[int, dict[int, int]]] = {}
        for row in self.rows:
            size, counts = out.setdefault(row.frame, (row.gallery_size, {k: 0 for k in self.k_list}))
            for k in self.k_list:
                counts[k] += 1 if row.topk_correct.get(k) else 0
        return [(frame, size, counts) for frame, (size, counts) in sorted(out.items())]


def _affinity(spec: ScorerSpec, description: ConstraintSet, record: PersonRecord) -> float:
    if spec.kind == "ideal":
        return float(ideal_affinity(description, record))
    return noisy_affinity(description, record, spec.epsilon)


def online_search(
    stream: Sequence[Frame],
    descriptions: Sequence[PoiDescription],
    scorer: ScorerSpec = ScorerSpec("ideal"),
    threshold: float = DEFAULT_THRESHOLD,
    k_list: Sequence[int] = (1, 10),
) -> OnlineReport:
    """Consume the stream frame by frame and track each description's best match.

    Scores of already-seen records never change, so each frame only scores
    its new detections and appends them to the per-description score lists.
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigurationError(f"threshold must lie in (0, 1], got {threshold}")
    k_list = tuple(int(k) for k in k_list)
    if any(k < 1 for k in k_list):
        raise ConfigurationError(f"every k must be >= 1, got {list(k_list)}")

    last_index = -math.inf
    seen_ids: set[int] = set()
    for frame in stream:
        if frame.index <= last_index:
            raise ValidationError(
                f"frame indices must be strictly increasing, got {frame.index} after {last_index}"
            )
        last_index = frame.index
        for det in frame.detections:
            if det.image_id in seen_ids:
                raise ValidationError(f"duplicate image_id {det.image_id} in stream")
            seen_ids.add(det.image_id)

    report = OnlineReport(threshold=threshold, k_list=k_list)
    # per description: parallel lists of (score, image_id, identity), appended per frame
    scores: list[list[float]] = [[] for _ in descriptions]
    ids: list[int] = []
    identities: list[int] = []
    ever: list[dict[int, bool]] = [{k: False for k in k_list} for _ in descriptions]

    for frame in stream:
        for det in frame.detections:
            ids.append(det.image_id)
            identities.append(det.identity)
            for d, desc in enumerate(descriptions):
                scores[d].append(_affinity(scorer, desc.constraints, det))
        gallery_size = len(ids)
        for d, desc in enumerate(descriptions):
            if gallery_size == 0:
                continue
            ranked = sorted(range(gallery_size), key=lambda i: (-scores[d][i], ids[i]))
            best = ranked[0]
            best_score = scores[d][best]
            matched = best_score >= threshold
            correct: dict[int, bool] = {}
            for k in k_list:
                head = ranked[: min(k, gallery_size)]
                correct[k] = any(
                    scores[d][i] >= threshold and identities[i] == desc.poi_id for i in head
                )
                ever[d][k] = ever[d][k] or correct[k]
            report.rows.append(
                OnlineRow(
                    frame=frame.index,
                    gallery_size=gallery_size,
                    poi_id=desc.poi_id,
                    best_score=best_score,
                    best_image_id=ids[best] if matched else None,
                    matched=matched,
                    topk_correct=correct,
                    topk_ever=dict(ever[d]),
                )
            )
    return report


def report_to_csv(report: OnlineReport) -> str:
    lines = ["frame,gallery_size,poi_id,best_score,matched,top1,top10"]
    for row in report.rows:
        lines.append(
            f"{row.frame},{row.gallery_size},{row.poi_id},{row.best_score!r},"
            f"{int(row.matched)},{int(row.topk_correct.get(1, False))},"
            f"{int(row.topk_correct.get(10, False))}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Stream file I/O: JSON lines, one frame per line
# {"frame": int, "detections": [{"image_id": int, "identity": int, "values": {...}}]}


def save_stream(stream: Sequence[Frame], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for frame in stream:
            fh.write(
                json.dumps(
                    {
                        "frame": frame.index,
                        "detections": [
                            {
                                "image_id": r.image_id,
                                "identity": r.identity,
                                "values": {
                                    str(fid): token
                                    for fid, token in sorted(r.facet_values.items())
                                },
                            }
                            for r in frame.detections
                        ],
                    },
                    separators=(", ", ": "),
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_stream(path) -> list[Frame]:
    frames: list[Frame] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            if "frame" not in obj:
                raise FormatError(f"{path}:{lineno}: missing required field 'frame'")
            detections = []
            for i, det in enumerate(obj.get("detections", [])):
                where = f"{path}:{lineno}: detections[{i}]"
                for key in ("image_id", "identity", "values"):
                    if key not in det:
                        raise FormatError(f"{where}: missing required field {key!r}")
                detections.append(
                    PersonRecord(
                        image_id=int(det["image_id"]),
                        identity=int(det["identity"]),
                        facet_values={int(k): str(v) for k, v in det["values"].items()},
                    )
                )
            frames.append(Frame(index=int(obj["frame"]), detections=tuple(detections)))
    return frames
