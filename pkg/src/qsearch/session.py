"""Interactive question-answer sessions gated by an uncertainty budget.

A session walks a fixed question order. The first question is always asked;
after each answer the gallery is rescored on the fused constraints and the
entropy of the prediction recorded. The session keeps asking while the
entropy stays strictly above the budget and questions remain, so a budget
of 0 runs until the prediction is certain (or questions run out) and a
budget of ln n stops after the single mandatory question.

Every session accumulates a replayable transcript; feeding the recorded
answers back through a fresh session reproduces the final state exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constraints import ConstraintSet, Query
from .errors import ConfigurationError, StateError, ValidationError
from .gallery import Gallery, true_constraints
from .metrics import RankReport, entropy, rank_of, retrieve_topk
from .scorer import ScorerSpec, score_gallery

__all__ = [
    "SessionState",
    "Transcript",
    "SweepRow",
    "start_session",
    "submit_answer",
    "abort_session",
    "simulate_session",
    "replay_transcript",
    "sweep_budgets",
    "sweep_to_csv",
]

AWAITING_ANSWER = "awaiting_answer"
AWAITING_DECISION = "awaiting_decision"  # reserved for drivers that pause the policy
DONE = "done"

STOP_BUDGET_MET = "budget_met"
STOP_QUESTIONS_EXHAUSTED = "questions_exhausted"
STOP_USER_ABORT = "user_abort"


@dataclass
class Transcript:
    """Ordered ask / answer / stop events, plus the final target rank when known."""

    events: list[dict] = field(default_factory=list)
    final_rank: RankReport | None = None

    def append(self, event: str, **fields) -> None:
        row: dict = {"t": len(self.events), "event": event}
        row.update(fields)
        self.events.append(row)

    def answers(self) -> list[ConstraintSet]:
        return [
            ConstraintSet.from_json(e["constraints"])
            for e in self.events
            if e["event"] == "answer"
        ]

    def stop_reason(self) -> str | None:
        for e in reversed(self.events):
            if e["event"] == "stop":
                return e["reason"]
        return None

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e, separators=(", ", ": "), ensure_ascii=False) + "\n"
            for e in self.events
        )

    @staticmethod
    def from_jsonl(text: str) -> "Transcript":
        events = [json.loads(line) for line in text.splitlines() if line.strip()]
        return Transcript(events=events)


@dataclass
class SessionState:
    """Single-writer state machine for one interactive search session."""

    gallery: Gallery
    scorer: ScorerSpec
    order: tuple[int, ...]
    budget: float
    k_display: int
    target_identity: int | None
    seed: int
    asked: list[int] = field(default_factory=list)
    constraints: ConstraintSet = field(default_factory=ConstraintSet.empty)
    affinities: np.ndarray | None = None
    entropy_trace: list[float] = field(default_factory=list)
    status: str = AWAITING_ANSWER
    stop_reason: str | None = None
    transcript: Transcript = field(default_factory=Transcript)

    @property
    def done(self) -> bool:
        return self.status == DONE

    @property
    def pending_question(self) -> int | None:
        if self.status != AWAITING_ANSWER:
            return None
        return self.order[len(self.asked)]

    def topk(self) -> list[int]:
        scores = self.affinities
        if scores is None:
            scores = score_gallery(self.scorer, self.constraints, self.gallery)
        return retrieve_topk(scores, min(self.k_display, self.gallery.n))


def start_session(
    gallery: Gallery,
    scorer: ScorerSpec,
    order: Sequence[int],
    budget: float,
    k_display: int = 5,
    target_identity: int | None = None,
    seed: int = 0,
) -> SessionState:
    """Open a session awaiting the answer to the first question in the order."""
    if budget < 0:
        raise ConfigurationError(f"budget must be >= 0, got {budget}")
    if k_display < 1:
        raise ConfigurationError(f"k_display must be >= 1, got {k_display}")
    order = tuple(int(q) for q in order)
    if not order:
        raise ValidationError("question order is empty")
    if len(set(order)) != len(order):
        raise ValidationError(f"question order has duplicates: {list(order)}")
    known = set(gallery.schema.question_ids)
    unknown = [q for q in order if q not in known]
    if unknown:
        raise ValidationError(f"question order references unknown questions {unknown}")
    state = SessionState(
        gallery=gallery,
        scorer=scorer,
        order=order,
        budget=float(budget),
        k_display=k_display,
        target_identity=target_identity,
        seed=seed,
    )
    state.transcript.append("ask", question_id=order[0])
    return state


def submit_answer(state: SessionState, answer: ConstraintSet) -> SessionState:
    """Record an answer, rescore, and either ask the next question or stop."""
    if state.status == DONE:
        raise StateError("session is already done")
    if state.status != AWAITING_ANSWER:
        raise StateError(f"session is not awaiting an answer (status={state.status})")
    pending = state.pending_question
    allowed = set(state.gallery.schema.facets_of(pending))
    foreign = answer.facet_ids() - allowed
    if foreign:
        raise ValidationError(
            f"answer to question {pending} constrains foreign facet "
            f"{sorted(foreign)[0]} (allowed: {sorted(allowed)})"
        )

    state.constraints = state.constraints.fuse(answer)
    state.affinities = score_gallery(state.scorer, state.constraints, state.gallery)
    step_entropy = entropy(state.affinities)
    state.asked.append(pending)
    state.entropy_trace.append(step_entropy)
    state.transcript.append(
        "answer",
        question_id=pending,
        constraints=answer.to_json(),
        entropy=step_entropy,
        topk=state.topk(),
    )

    questions_remain = len(state.asked) < len(state.order)
    if step_entropy > state.budget and questions_remain:
        state.transcript.append("ask", question_id=state.order[len(state.asked)])
    else:
        state.status = DONE
        state.stop_reason = (
            STOP_BUDGET_MET if step_entropy <= state.budget else STOP_QUESTIONS_EXHAUSTED
        )
        state.transcript.append("stop", reason=state.stop_reason)
        if state.target_identity is not None:
            state.transcript.final_rank = rank_of(
                state.affinities, state.gallery, state.target_identity
            )
    return state


def abort_session(state: SessionState) -> SessionState:
    """Stop a session early on the user's behalf."""
    if state.status == DONE:
        raise StateError("session is already done")
    state.status = DONE
    state.stop_reason = STOP_USER_ABORT
    state.transcript.append("stop", reason=STOP_USER_ABORT)
    return state


def _noisy_truthful_answer(
    gallery: Gallery, identity: int, question_id: int, noise: float, rng: np.random.Generator
) -> ConstraintSet:
    """Truthful answer with each facet flipped to a random wrong value w.p. ``noise``."""
    truth = true_constraints(gallery, identity, question_id)
    out: dict[int, frozenset[str]] = {}
    for facet_id, admissible in sorted(truth.constraints.items()):
        token = next(iter(admissible))
        if rng.random() < noise:
            domain = gallery.schema.facet(facet_id).domain
            wrong = [t for t in domain if t != token]
            token = wrong[int(rng.integers(len(wrong)))]
        out[facet_id] = frozenset([token])
    return ConstraintSet(out)


def simulate_session(
    gallery: Gallery,
    scorer: ScorerSpec,
    order: Sequence[int],
    budget: float,
    target_identity: int,
    answer_noise: float = 0.0,
    seed: int = 0,
    k_display: int = 5,
) -> Transcript:
    """Run a full session with answers drawn from the target's true facet values.

    Noise draws happen per question in ask order, so two simulations with the
    same seed agree on every shared prefix regardless of their budgets.
    """
    if not 0.0 <= answer_noise <= 1.0:
        raise ConfigurationError(f"answer noise must lie in [0, 1], got {answer_noise}")
    rng = np.random.default_rng(seed)
    state = start_session(
        gallery, scorer, order, budget, k_display=k_display,
        target_identity=target_identity, seed=seed,
    )
    while not state.done:
        answer = _noisy_truthful_answer(
            gallery, target_identity, state.pending_question, answer_noise, rng
        )
        submit_answer(state, answer)
    return state.transcript


def replay_transcript(
    gallery: Gallery,
    scorer: ScorerSpec,
    order: Sequence[int],
    budget: float,
    transcript: Transcript,
    k_display: int = 5,
    target_identity: int | None = None,
) -> SessionState:
    """Feed recorded answers back through a fresh session."""
    state = start_session(
        gallery, scorer, order, budget, k_display=k_display, target_identity=target_identity
    )
    for answer in transcript.answers():
        if state.done:
            raise ValidationError("transcript has more answers than the session accepts")
        submit_answer(state, answer)
    return state


@dataclass(frozen=True)
class SweepRow:
    budget: float
    mean_rank: float
    total_queries: int


def sweep_budgets(
    gallery: Gallery,
    scorer: ScorerSpec,
    order: Sequence[int],
    queries: Sequence[Query | int],
    budgets: Sequence[float],
    answer_noise: float = 0.0,
    seed: int = 0,
    tie_policy: str = "expected",
    k_display: int = 5,
) -> list[SweepRow]:
    """Simulate every (query, budget) cell and aggregate rank and question counts.

    Each query draws its noise from a seed derived only from (seed, query
    index), so equal budgets produce identical rows and smaller budgets ask
    at least as many questions on every single query.
    """
    if not budgets:
        raise ValidationError("need at least one budget")
    if not queries:
        raise ValidationError("need at least one query")
    targets = [q.target_identity if isinstance(q, Query) else int(q) for q in queries]
    rows = []
    for budget in budgets:
        total_rank = 0.0
        total_questions = 0
        for query_index, target in enumerate(targets):
            state = start_session(
                gallery, scorer, order, budget, k_display=k_display,
                target_identity=target,
            )
            rng = np.random.default_rng([seed, query_index])
            while not state.done:
                answer = _noisy_truthful_answer(
                    gallery, target, state.pending_question, answer_noise, rng
                )
                submit_answer(state, answer)
            total_rank += rank_of(state.affinities, gallery, target, tie_policy).rank
            total_questions += len(state.asked)
        rows.append(
            SweepRow(
                budget=float(budget),
                mean_rank=total_rank / len(targets),
                total_queries=total_questions,
            )
        )
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    lines = ["budget,mean_rank,total_queries"]
    for row in rows:
        lines.append(f"{row.budget!r},{row.mean_rank!r},{row.total_queries}")
    return "\n".join(lines) + "\n"


def ceiling_budget(gallery: Gallery) -> float:
    """The budget above which every session stops after one question."""
    return math.log(gallery.n)
