"""Build synthetic galleries: schemas, identity-consistent records, and files.

Run: python demos/01_generate_galleries.py
"""

import json
import tempfile
from pathlib import Path

from qsearch import GalleryConfig, default_schema, generate_gallery, load_gallery, save_gallery

schema = default_schema()
print("The default schema asks five appearance questions:")
for q in schema.questions:
    names = ", ".join(schema.facet(f).name for f in q.facet_ids)
    print(f"  Q{q.id}: {q.prompt}  [facets: {names}]")

# A gallery draws one facet profile per identity; every image of that
# identity shares it. Skewed weights make a facet uninformative: here almost
# everyone wears black, so "dress-color" barely narrows the search.
config = GalleryConfig(
    n=30,
    n_identities=12,
    schema=schema,
    value_distributions={3: [20, 1, 1, 1, 1, 1]},  # dress-color, mostly "black"
)
gallery = generate_gallery(config, seed=42)
print(f"\nGenerated n={gallery.n} images of K={gallery.n_identities} identities (seed 42)")

black = sum(r.facet_values[3] == "black" for r in gallery.records)
print(f"  records wearing black: {black}/{gallery.n}")

first = gallery.records_of(1)
print(f"  identity 1 has {len(first)} record(s); profile: "
      + ", ".join(f"{schema.facet(f).name}={v}" for f, v in sorted(first[0].facet_values.items())))

# Galleries round-trip through a JSON file; generation is a pure function of
# (config, seed), so regenerating and reloading give equal galleries.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "gallery.json"
    save_gallery(gallery, path)
    print(f"\nSaved to {path.name}: {path.stat().st_size} bytes")
    again = load_gallery(path)
    print(f"  reload equals original: {again == gallery}")
    doc = json.loads(path.read_text())
    print(f"  file keys: {sorted(doc)}")
    print(f"  regeneration is deterministic: {generate_gallery(config, 42) == gallery}")
