"""Drive the JSON API end to end without leaving the process.

Run: python demos/06_service_api.py
(For a real server: qsearch serve --port 8000, then use any HTTP client.)
"""

from fastapi.testclient import TestClient

from qsearch import GalleryConfig, generate_gallery, true_constraints
from qsearch.gallery import gallery_to_json
from qsearch.service import create_app

client = TestClient(create_app())

gallery = generate_gallery(GalleryConfig(n=12, n_identities=8), seed=33)
created = client.post("/api/v1/galleries", json=gallery_to_json(gallery)).json()
gallery_id = created["gallery_id"]
print(f"POST /api/v1/galleries -> {created}")

session = client.post(
    "/api/v1/sessions",
    json={
        "gallery_id": gallery_id,
        "budget": 0.7,
        "order": [1, 2, 3, 4, 5],
        "scorer": {"kind": "ideal"},
        "k": 3,
    },
).json()
session_id = session["session_id"]
print(f"POST /api/v1/sessions -> session {session_id}, first question: "
      f"{session['next_question']['prompt']!r}")

# Answer truthfully for a secret target the same way the web console would.
target = 5
payload = session
while not payload.get("done"):
    question_id = payload["next_question"]["id"]
    constraints = true_constraints(gallery, target, question_id).to_json()
    payload = client.post(
        f"/api/v1/sessions/{session_id}/answer",
        json={"question_id": question_id, "constraints": constraints},
    ).json()
    print(f"  answered Q{question_id}: entropy={payload['entropy']:.3f} "
          f"top1={payload['topk'][0]['image_id']} done={payload['done']}")

print(f"stop reason: {payload['stop_reason']}")

view = client.get(f"/api/v1/sessions/{session_id}").json()
print(f"GET /api/v1/sessions/{session_id} -> {len(view['events'])} transcript events, "
      f"asked {view['asked']}")

oops = client.post(
    f"/api/v1/sessions/{session_id}/answer", json={"question_id": 1, "constraints": {}}
)
print(f"answering a finished session -> HTTP {oops.status_code}")
