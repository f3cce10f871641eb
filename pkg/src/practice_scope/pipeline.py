"""Composition layer: resolve catalog queries into the four analytics results.

The HTTP API and CLI both call these functions, so a service response is
always exactly the module function applied to the queried data.
"""

from __future__ import annotations

import json

from .alignment import FitMode, Segment, segment_repetitions
from .catalog import BadRequestError, Catalog, NotFoundError
from .heatmaps import (
    ComparisonGrid,
    FretboardGrid,
    ProgressMatrix,
    comparison_grid,
    fretboard_counts,
    progress_matrix,
)
from .score import DEFAULT_FRET_COUNT, STANDARD_TUNING
from .similarity import Layout2D, layout_grids
from .theory import A_MINOR_PENTATONIC_BLUES, BUILTIN_SCALES, RoleSequence, ScaleSpec, role_sequence

GRID_STRINGS = STANDARD_TUNING.string_count
GRID_FRETS = DEFAULT_FRET_COUNT


def canonical_json(obj: dict) -> bytes:
    """The one JSON byte encoding used for API payloads and their oracles."""
    return json.dumps(obj, separators=(",", ":"), sort_keys=True).encode("utf-8")


def _segments_for(catalog: Catalog, rids: list[str], exercise: str) -> tuple[list[Segment], dict]:
    score = catalog.get_score(exercise)
    segments: list[Segment] = []
    recorded_at = {}
    for rid in rids:
        recording = catalog.load_recording(rid)
        recorded_at[rid] = recording.meta.recorded_at
        segments.extend(segment_repetitions(list(recording.notes), score, rid))
    return segments, recorded_at


def progress_for_recording(
    catalog: Catalog, rid: str, fit: FitMode | str = FitMode.AFFINE
) -> ProgressMatrix:
    recording = catalog.load_recording(rid)
    score = catalog.get_score(recording.meta.exercise)
    segments = segment_repetitions(list(recording.notes), score, rid)
    return progress_matrix(segments, score, fit)


def progress_for_player(
    catalog: Catalog, player: str, exercise: str, fit: FitMode | str = FitMode.AFFINE
) -> ProgressMatrix:
    """All the player's repetitions of one exercise, concatenated chronologically."""
    summaries = catalog.query_recordings(player=player, exercise=exercise)
    if not summaries:
        raise NotFoundError(f"no recordings for player {player!r} and exercise {exercise!r}")
    score = catalog.get_score(exercise)
    segments, recorded_at = _segments_for(catalog, [s.id for s in summaries], exercise)
    return progress_matrix(segments, score, fit, recorded_at)


def grid_for_recording(catalog: Catalog, rid: str) -> FretboardGrid:
    recording = catalog.load_recording(rid)
    return fretboard_counts(list(recording.notes), GRID_STRINGS, GRID_FRETS)


def grid_for_player(catalog: Catalog, player: str, exercise: str) -> FretboardGrid:
    summaries = catalog.query_recordings(player=player, exercise=exercise)
    if not summaries:
        raise NotFoundError(f"no recordings for player {player!r} and exercise {exercise!r}")
    notes = []
    for s in summaries:
        notes.extend(catalog.load_recording(s.id).notes)
    return fretboard_counts(notes, GRID_STRINGS, GRID_FRETS)


def compare_players(
    catalog: Catalog, player_a: str, player_b: str, exercise: str
) -> ComparisonGrid:
    return comparison_grid(
        grid_for_player(catalog, player_a, exercise),
        grid_for_player(catalog, player_b, exercise),
    )


def similarity_for_exercise(
    catalog: Catalog, exercise: str
) -> tuple[Layout2D, list[FretboardGrid], list[str]]:
    """Similarity layout over all recordings of an exercise, chronological order."""
    summaries = catalog.query_recordings(exercise=exercise)
    if not summaries:
        raise NotFoundError(f"no recordings for exercise {exercise!r}")
    rids = [s.id for s in summaries]
    grids = [grid_for_recording(catalog, rid) for rid in rids]
    return layout_grids(grids), grids, rids


def resolve_scale(name: str | None) -> ScaleSpec:
    if name is None:
        return A_MINOR_PENTATONIC_BLUES
    try:
        return BUILTIN_SCALES[name]
    except KeyError:
        raise BadRequestError(
            f"unknown scale {name!r}; available: {sorted(BUILTIN_SCALES)}"
        ) from None


def roles_for_exercise(
    catalog: Catalog,
    exercise: str,
    players: list[str] | None = None,
    scale: ScaleSpec = A_MINOR_PENTATONIC_BLUES,
) -> list[RoleSequence]:
    """Role sequences for an exercise's recordings, chronological; one row each."""
    summaries = catalog.query_recordings(exercise=exercise)
    if players:
        summaries = [s for s in summaries if s.meta.player in players]
    if not summaries:
        raise NotFoundError(f"no recordings for exercise {exercise!r}")
    return [
        role_sequence(catalog.load_recording(s.id), scale) for s in summaries
    ]
