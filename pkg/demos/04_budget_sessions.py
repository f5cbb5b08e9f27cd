"""Interactive sessions that stop once uncertainty drops under a budget.

Run: python demos/04_budget_sessions.py
"""

import math

from qsearch import (
    GalleryConfig,
    ScorerSpec,
    generate_gallery,
    greedy_order,
    simulate_session,
    start_session,
    submit_answer,
    sweep_budgets,
    true_constraints,
    truthful_queries,
)
from qsearch.session import sweep_to_csv

gallery = generate_gallery(GalleryConfig(n=40, n_identities=25), seed=12)
queries = truthful_queries(gallery, list(range(1, 16)))
ideal = ScorerSpec("ideal")
order = greedy_order(queries, gallery, ideal).order
print(f"question order: {list(order)}; gallery n={gallery.n} (max entropy {math.log(gallery.n):.2f} nats)")

# Drive one session by hand. The first question is always asked; afterwards
# the session keeps asking while entropy > budget.
target = 9
budget = 0.8
state = start_session(gallery, ideal, order, budget, target_identity=target)
print(f"\nmanual session, budget {budget} nats, secret target {target}:")
while not state.done:
    question = gallery.schema.question(state.pending_question)
    answer = true_constraints(gallery, target, question.id)
    submit_answer(state, answer)
    print(f"  Q{question.id}: answered {answer.to_json()} "
          f"-> entropy {state.entropy_trace[-1]:.3f}, top-3 {state.topk()[:3]}")
print(f"stopped: {state.stop_reason} after {len(state.asked)} questions; "
      f"final rank {state.transcript.final_rank.rank}")

# The same run as a one-call simulation, with a replayable transcript.
transcript = simulate_session(gallery, ideal, order, budget, target_identity=target)
print(f"\nsimulated transcript ({len(transcript.events)} events):")
for event in transcript.events[:4]:
    print(f"  {event}")
print("  ...")

# Sweeping the budget trades interaction length against retrieval quality:
# tighter budgets ask more questions and reach lower mean ranks.
budgets = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, math.log(gallery.n)]
rows = sweep_budgets(gallery, ideal, order, queries, budgets)
print("\nbudget sweep over 15 truthful queries:")
print(sweep_to_csv(rows))
