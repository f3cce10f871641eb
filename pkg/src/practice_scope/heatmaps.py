"""Aggregate alignments into progress matrices and notes into fretboard grids."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from enum import IntEnum

import numpy as np

from .alignment import FitMode, Segment, align_notes, compute_deviations, fit_time_map
from .midi import NoteEvent
from .score import ReferenceScore


@dataclass
class ProgressMatrix:
    """Per-note timing deviations across repetitions.

    Rows are reference-note indices (0 at the top), columns repetitions in
    chronological order. NaN cells are missed notes.
    """

    deviations: np.ndarray  # (score length, repetition count), NaN = missed
    score_ref: str

    @property
    def rows(self) -> int:
        return self.deviations.shape[0]

    @property
    def cols(self) -> int:
        return self.deviations.shape[1]

    def to_json_dict(self) -> dict:
        flat = [
            None if np.isnan(v) else float(v) for v in self.deviations.ravel(order="C")
        ]
        return {
            "rows": self.rows,
            "cols": self.cols,
            "scoreRef": self.score_ref,
            "deviations": flat,
        }


@dataclass
class FretboardGrid:
    """How often each fretboard cell was played; row 0 is string 1."""

    counts: np.ndarray  # (strings, fret_count + 1), nonnegative ints
    total_notes: int
    unmapped_notes: int

    @property
    def strings(self) -> int:
        return self.counts.shape[0]

    @property
    def frets(self) -> int:
        return self.counts.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "rows": self.strings,
            "cols": self.frets,
            "counts": [int(v) for v in self.counts.ravel(order="C")],
            "totalNotes": self.total_notes,
            "unmappedNotes": self.unmapped_notes,
        }


class CellCategory(IntEnum):
    NEITHER = 0
    ONLY_A = 1
    ONLY_B = 2
    BOTH = 3


@dataclass
class ComparisonGrid:
    """Cellwise played-by-whom categories for two players' grids."""

    cells: np.ndarray  # (strings, fret_count + 1) of CellCategory codes

    @property
    def strings(self) -> int:
        return self.cells.shape[0]

    @property
    def frets(self) -> int:
        return self.cells.shape[1]

    def to_json_dict(self) -> dict:
        return {
            "rows": self.strings,
            "cols": self.frets,
            "cells": [int(v) for v in self.cells.ravel(order="C")],
            "categories": {
                "neither": int(CellCategory.NEITHER),
                "onlyA": int(CellCategory.ONLY_A),
                "onlyB": int(CellCategory.ONLY_B),
                "both": int(CellCategory.BOTH),
            },
        }


def progress_matrix(
    segments: list[Segment],
    score: ReferenceScore,
    fit_mode: FitMode | str = FitMode.AFFINE,
    recorded_at: dict[str, datetime] | None = None,
) -> ProgressMatrix:
    """Deviation matrix over repetitions, one column per segment.

    Columns sort chronologically: by each segment's recording timestamp when
    ``recorded_at`` maps recording ids to timestamps (segments then order by
    start time within a recording), otherwise by first appearance of the
    recording id in ``segments``.
    """
    if recorded_at is not None:
        key = lambda s: (recorded_at[s.recording_id], s.start_seconds)
    else:
        first_seen: dict[str, int] = {}
        for s in segments:
            first_seen.setdefault(s.recording_id, len(first_seen))
        key = lambda s: (first_seen[s.recording_id], s.start_seconds)
    ordered = sorted(segments, key=key)

    matrix = np.full((len(score.notes), len(ordered)), np.nan)
    for col, segment in enumerate(ordered):
        alignment = align_notes(list(segment.notes), score)
        time_map = fit_time_map(alignment, score, fit_mode, segment.start_seconds)
        for dev in compute_deviations(alignment, time_map, score):
            if dev.deviation_seconds is not None:
                matrix[dev.ref_index, col] = dev.deviation_seconds
    return ProgressMatrix(deviations=matrix, score_ref=score.exercise)


def fretboard_counts(
    notes: list[NoteEvent], strings: int = 6, fret_count: int = 22
) -> FretboardGrid:
    """Count plays per fretboard cell; notes without coordinates are tallied apart."""
    counts = np.zeros((strings, fret_count + 1), dtype=np.int64)
    unmapped = 0
    for note in notes:
        c = note.coord
        if c is not None and 1 <= c.string <= strings and 0 <= c.fret <= fret_count:
            counts[c.string - 1, c.fret] += 1
        else:
            unmapped += 1
    return FretboardGrid(counts=counts, total_notes=len(notes), unmapped_notes=unmapped)


def comparison_grid(grid_a: FretboardGrid, grid_b: FretboardGrid) -> ComparisonGrid:
    """Categorize each cell by which player's grid has a nonzero count there."""
    if grid_a.counts.shape != grid_b.counts.shape:
        raise ValueError(
            f"grid dimensions differ: {grid_a.counts.shape} vs {grid_b.counts.shape}"
        )
    a = grid_a.counts > 0
    b = grid_b.counts > 0
    cells = np.full(a.shape, CellCategory.NEITHER, dtype=np.uint8)
    cells[a & ~b] = CellCategory.ONLY_A
    cells[~a & b] = CellCategory.ONLY_B
    cells[a & b] = CellCategory.BOTH
    return ComparisonGrid(cells=cells)
