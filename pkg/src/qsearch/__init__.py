"""qsearch: interactive gallery search by appearance questions.

Search for a target entity in a gallery of attribute-labelled records by
asking appearance questions, ordering the questions greedily by how much
they reduce the mean retrieval rank, and stopping once the prediction
entropy falls under a configurable budget of uncertainty.
"""

__version__ = "0.1.0"

from .constraints import ConstraintSet, Query, load_queries, save_queries
from .errors import (
    ConfigurationError,
    FormatError,
    QSearchError,
    StateError,
    UnknownEntityError,
    ValidationError,
)
from .gallery import (
    Facet,
    FacetSchema,
    Gallery,
    GalleryConfig,
    PersonRecord,
    Question,
    default_schema,
    generate_gallery,
    load_gallery,
    save_gallery,
    true_constraints,
    truthful_queries,
)
from .metrics import (
    RankReport,
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
from .online import Frame, OnlineReport, PoiDescription, online_search
from .ordering import (
    GainReport,
    MeanRankEvaluator,
    QuestionSequence,
    baseline_order,
    brute_force_oracle,
    check_submodularity,
    evaluate_order,
    greedy_order,
    marginal_gain,
)
from .scorer import ScorerSpec, candidate_set, ideal_affinity, noisy_affinity, score_gallery
from .session import (
    SessionState,
    SweepRow,
    Transcript,
    abort_session,
    replay_transcript,
    simulate_session,
    start_session,
    submit_answer,
    sweep_budgets,
)

__all__ = [
    "__version__",
    "ConstraintSet",
    "Query",
    "load_queries",
    "save_queries",
    "QSearchError",
    "ConfigurationError",
    "ValidationError",
    "FormatError",
    "UnknownEntityError",
    "StateError",
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
    "ScorerSpec",
    "ideal_affinity",
    "noisy_affinity",
    "score_gallery",
    "candidate_set",
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
    "QuestionSequence",
    "GainReport",
    "MeanRankEvaluator",
    "greedy_order",
    "evaluate_order",
    "baseline_order",
    "marginal_gain",
    "brute_force_oracle",
    "check_submodularity",
    "SessionState",
    "Transcript",
    "SweepRow",
    "start_session",
    "submit_answer",
    "abort_session",
    "simulate_session",
    "replay_transcript",
    "sweep_budgets",
    "Frame",
    "PoiDescription",
    "OnlineReport",
    "online_search",
]
