"""
Similarity map of improvisation styles
======================================

With many recordings, side-by-side fretboard heatmaps stop scaling. Here
every recording becomes a small glyph (hue = fret, saturation = how often a
note was played, normalized over all recordings) placed on a grid so that
similar-sounding takes sit near each other: pairwise distances between
normalized heatmaps feed classical MDS, SMACOF stress majorization refines
the embedding, and an optimal assignment snaps points to grid cells.

Recordings whose nearest neighbors are unusually far away are flagged as
outliers and ringed; the first one is enlarged above the grid. The demo's
"eve" plays a completely different register and pops out immediately.
"""

from pathlib import Path

from practice_scope import pipeline, render
from practice_scope.catalog import Catalog
from practice_scope.sample_data import build_demo_catalog

out_dir = Path(__file__).parent / "output"
catalog_dir = out_dir / "demo-catalog"
if catalog_dir.exists():
    catalog = Catalog(catalog_dir)
else:
    catalog = build_demo_catalog(catalog_dir)

layout, grids, recording_ids = pipeline.similarity_for_exercise(catalog, "blues-improv")
print(f"{len(grids)} recordings, final stress {layout.stress:.4f}")
for rid, flagged in zip(recording_ids, layout.outlier_flags):
    if flagged:
        entry = catalog.entry(rid)
        print(f"outlier: {entry.player} @ {entry.recorded_at:%Y-%m-%d}")

target = out_dir / "similarity.svg"
target.write_text(render.render_similarity_map(layout, grids), encoding="utf-8")
print("wrote", target)
