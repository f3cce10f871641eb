"""
Note roles for improvisation
============================

Over a blues backing track in A minor, music theory assigns every note a
role: the root, other scale tones of the minor pentatonic, the blue note
(to be used sparingly), or an outside note. Each recording becomes a row of
rounded rectangles on a shared time axis, colored by role, with a legend
mapping colors to note names.

The demo's bottom row holds a conspicuously long blue note, the kind of
thing a teacher might flag for a listen.
"""

from pathlib import Path

from practice_scope import pipeline, render
from practice_scope.catalog import Catalog
from practice_scope.sample_data import build_demo_catalog
from practice_scope.theory import NoteRole, role_duration_shares

out_dir = Path(__file__).parent / "output"
catalog_dir = out_dir / "demo-catalog"
if catalog_dir.exists():
    catalog = Catalog(catalog_dir)
else:
    catalog = build_demo_catalog(catalog_dir)

scale = pipeline.resolve_scale(None)
sequences = pipeline.roles_for_exercise(catalog, "blues-improv")
print(f"{len(sequences)} recordings under scale: {scale.name}")

for sequence in sequences:
    shares = role_duration_shares(sequence)
    entry = catalog.entry(sequence.recording_id)
    print(
        f"{entry.player:<6} {entry.recorded_at:%Y-%m-%d}  "
        f"root {shares[NoteRole.ROOT]:.2f}  "
        f"scale {shares[NoteRole.SCALE_TONE]:.2f}  "
        f"blue {shares[NoteRole.BLUE_NOTE]:.2f}"
    )

target = out_dir / "roles.svg"
target.write_text(render.render_role_sequence(sequences, scale), encoding="utf-8")
print("wrote", target)
