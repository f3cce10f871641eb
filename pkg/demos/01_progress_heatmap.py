"""
Progress heatmap
================

How consistently does a student hit each note of an exercise, and does it
improve across repetitions? Columns are repetitions in chronological order,
rows are the notes of the exercise; blue means early, red means late, and a
dark gray cell is a skipped note.

The bundled demo student "alice" improves steadily but keeps rushing one
note in the middle of the pattern, which shows up as a persistent dark
horizontal stripe.
"""

from pathlib import Path

import numpy as np

from practice_scope import pipeline, render
from practice_scope.catalog import Catalog
from practice_scope.sample_data import build_demo_catalog

out_dir = Path(__file__).parent / "output"
catalog_dir = out_dir / "demo-catalog"
if catalog_dir.exists():
    catalog = Catalog(catalog_dir)
else:
    catalog = build_demo_catalog(catalog_dir)

matrix = pipeline.progress_for_player(catalog, "alice", "pentatonic-box")
print(f"{matrix.rows} notes x {matrix.cols} repetitions")

column_means = np.nanmean(np.abs(matrix.deviations), axis=0)
print("mean |deviation| per repetition:", np.round(column_means, 4))
print("problem note (row 6) |deviation|:", np.round(np.abs(matrix.deviations[6]), 3))

svg = render.render_progress_heatmap(matrix)
target = out_dir / "progress.svg"
target.write_text(svg, encoding="utf-8")
print("wrote", target)
