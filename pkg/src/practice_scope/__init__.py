"""practice-scope: analytics and visualizations for MIDI instrument practice.

Ingests Standard MIDI File recordings, aligns them to reference scores,
and produces four deterministic SVG views: per-note progress heatmaps,
fretboard heatmaps and comparisons, similarity-ordered heatmap grids,
and note-role sequences for improvisation.
"""

from .alignment import (
    Alignment,
    FitMode,
    NoteDeviation,
    Segment,
    TimeMap,
    align_notes,
    compute_deviations,
    fit_time_map,
    segment_repetitions,
)
from .catalog import Catalog, CatalogError, RecordingSummary
from .heatmaps import (
    CellCategory,
    ComparisonGrid,
    FretboardGrid,
    ProgressMatrix,
    comparison_grid,
    fretboard_counts,
    progress_matrix,
)
from .midi import (
    DEFAULT_CHANNEL_MAP,
    Diagnostics,
    EventKind,
    ExerciseKind,
    NoteEvent,
    RawEvent,
    Recording,
    RecordingMeta,
    SmfParseError,
    TempoMap,
    attach_coords,
    infer_string_fret,
    notes_from_smf,
    pair_notes,
    parse_smf,
    ticks_to_seconds,
)
from .render import (
    RenderOptions,
    render_fretboard,
    render_progress_heatmap,
    render_role_sequence,
    render_similarity_map,
)
from .score import (
    DEFAULT_FRET_COUNT,
    STANDARD_TUNING,
    FretboardCoord,
    ReferenceNote,
    ReferenceScore,
    ScoreError,
    Tuning,
    coords_for_pitch,
    load_score,
    pitch_at,
    score_from_dict,
    score_to_dict,
)
from .similarity import (
    DistanceMatrix,
    Layout2D,
    classical_mds,
    detect_outliers,
    distance_matrix,
    heatmap_distance,
    layout_grids,
    smacof,
    snap_to_grid,
)
from .theory import (
    A_MINOR_PENTATONIC_BLUES,
    NoteRole,
    RoleSequence,
    ScaleSpec,
    classify_note,
    role_duration_shares,
    role_sequence,
)

__version__ = "0.1.0"
