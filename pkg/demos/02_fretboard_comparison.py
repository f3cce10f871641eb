"""
Fretboard heatmaps and two-player comparison
============================================

A fretboard heatmap summarizes an improvisation: strings as rows, frets as
columns, each played cell shaded by how often it was hit. Overlaying two
players gives a categorical comparison: red cells only player A played,
blue only player B, gray both.

In the demo catalog "alice" works the low strings while "bob" stays on the
high ones; they meet on string 3.
"""

from pathlib import Path

from practice_scope import pipeline, render
from practice_scope.catalog import Catalog
from practice_scope.heatmaps import CellCategory
from practice_scope.sample_data import build_demo_catalog

out_dir = Path(__file__).parent / "output"
catalog_dir = out_dir / "demo-catalog"
if catalog_dir.exists():
    catalog = Catalog(catalog_dir)
else:
    catalog = build_demo_catalog(catalog_dir)

# Single-player heatmap
grid = pipeline.grid_for_player(catalog, "alice", "blues-improv")
print(f"alice played {grid.total_notes} notes over {(grid.counts > 0).sum()} cells")
(out_dir / "fretboard_alice.svg").write_text(
    render.render_fretboard(grid), encoding="utf-8"
)

# Two-player comparison
comparison = pipeline.compare_players(catalog, "alice", "bob", "blues-improv")
for category in (CellCategory.ONLY_A, CellCategory.ONLY_B, CellCategory.BOTH):
    count = int((comparison.cells == category).sum())
    print(f"{category.name.lower():>7}: {count} cells")

target = out_dir / "compare.svg"
target.write_text(render.render_fretboard(comparison), encoding="utf-8")
print("wrote", target)
