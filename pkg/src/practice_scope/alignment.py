"""Align recorded notes to a reference score and measure per-note timing error.

The pipeline per repetition: segment the recording, match pitches with a
monotone DP alignment, fit a beats→seconds time map over the matched pairs
(removing global tempo/offset), and report the signed residuals. Negative
deviations mean early, positive late.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .midi import NoteEvent
from .score import ReferenceScore

#: Minimum fraction of reference notes that must match for a repetition to count.
MATCH_RATE_THRESHOLD = 0.5


@dataclass(frozen=True, slots=True)
class Segment:
    """One pass through the exercise inside a longer recording."""

    recording_id: str
    repetition_index: int
    notes: tuple[NoteEvent, ...]
    start_seconds: float


@dataclass(frozen=True, slots=True)
class Alignment:
    """Monotone correspondence between a note sequence and a score.

    ``pairs`` has one entry per reference note, in score order; None marks a
    missed reference note. Recorded notes matched to no reference note (pitch
    mismatches included) appear in ``insertions``.
    """

    pairs: tuple[tuple[int, NoteEvent | None], ...]
    insertions: tuple[NoteEvent, ...]
    cost: float

    @property
    def matched(self) -> list[tuple[int, NoteEvent]]:
        return [(i, n) for i, n in self.pairs if n is not None]

    @property
    def match_count(self) -> int:
        return sum(1 for _, n in self.pairs if n is not None)


class FitMode(str, Enum):
    NONE = "none"
    OFFSET = "offset"
    AFFINE = "affine"


@dataclass(frozen=True, slots=True)
class TimeMap:
    """Affine beats→seconds model: seconds = seconds_per_beat * beats + offset."""

    mode: FitMode
    seconds_per_beat: float
    offset_seconds: float

    def predict(self, beats: float) -> float:
        return self.seconds_per_beat * beats + self.offset_seconds


@dataclass(frozen=True, slots=True)
class NoteDeviation:
    """Signed timing error for one reference note; None = the note was missed."""

    ref_index: int
    deviation_seconds: float | None


# DP move codes, in traceback preference order at equal cost.
_DIAGONAL, _DELETE, _INSERT = 0, 1, 2


def _dp_tables(ref: list[int], rec: list[int]) -> tuple[list[list[int]], list[list[int]]]:
    """Edit-distance DP over pitch sequences.

    Unit costs: equal-pitch match 0; substitution, reference deletion, and
    recorded insertion 1 each. Ties prefer diagonal over delete over insert.
    """
    m, n = len(ref), len(rec)
    cost = [[0] * (n + 1) for _ in range(m + 1)]
    move = [[_DIAGONAL] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        cost[i][0] = i
        move[i][0] = _DELETE
    for j in range(1, n + 1):
        cost[0][j] = j
        move[0][j] = _INSERT
    for i in range(1, m + 1):
        row, prev = cost[i], cost[i - 1]
        for j in range(1, n + 1):
            diag = prev[j - 1] + (0 if ref[i - 1] == rec[j - 1] else 1)
            best, best_move = diag, _DIAGONAL
            if prev[j] + 1 < best:
                best, best_move = prev[j] + 1, _DELETE
            if row[j - 1] + 1 < best:
                best, best_move = row[j - 1] + 1, _INSERT
            row[j] = best
            move[i][j] = best_move
    return cost, move


def align_notes(segment_notes: list[NoteEvent], score: ReferenceScore) -> Alignment:
    """Globally align recorded notes to the score by pitch.

    A substitution counts as a missed reference note plus an inserted recorded
    note (at total cost 1), so ``pairs`` only ever matches equal pitches.
    """
    ref = score.pitches
    rec = [n.pitch for n in segment_notes]
    cost, move = _dp_tables(ref, rec)

    pairs: list[tuple[int, NoteEvent | None]] = []
    insertions: list[NoteEvent] = []
    i, j = len(ref), len(rec)
    while i > 0 or j > 0:
        mv = move[i][j]
        if mv == _DIAGONAL:
            if ref[i - 1] == rec[j - 1]:
                pairs.append((i - 1, segment_notes[j - 1]))
            else:
                pairs.append((i - 1, None))
                insertions.append(segment_notes[j - 1])
            i, j = i - 1, j - 1
        elif mv == _DELETE:
            pairs.append((i - 1, None))
            i -= 1
        else:
            insertions.append(segment_notes[j - 1])
            j -= 1
    pairs.reverse()
    insertions.reverse()
    return Alignment(tuple(pairs), tuple(insertions), float(cost[len(ref)][len(rec)]))


def segment_repetitions(
    recording_notes: list[NoteEvent],
    score: ReferenceScore,
    recording_id: str = "",
) -> list[Segment]:
    """Split a practice recording into exercise repetitions.

    Greedy sequential semi-global matching: align the whole score against the
    remaining notes with a free (unpenalized) tail, accept when at least half
    the reference notes match, cut after the last matched note, repeat.
    """
    ref = score.pitches
    m = len(ref)
    segments: list[Segment] = []
    pos = 0
    notes = list(recording_notes)

    while len(notes) - pos >= MATCH_RATE_THRESHOLD * m:
        remaining = notes[pos:]
        rec = [n.pitch for n in remaining]
        cost, move = _dp_tables(ref, rec)
        end = min(range(len(rec) + 1), key=lambda j: (cost[m][j], j))

        # Traceback from (m, end) to find matched recorded indices.
        matched_rec: list[int] = []
        i, j = m, end
        while i > 0 or j > 0:
            mv = move[i][j]
            if mv == _DIAGONAL:
                if ref[i - 1] == rec[j - 1]:
                    matched_rec.append(j - 1)
                i, j = i - 1, j - 1
            elif mv == _DELETE:
                i -= 1
            else:
                j -= 1

        if len(matched_rec) < MATCH_RATE_THRESHOLD * m:
            break
        last = max(matched_rec)
        seg_notes = tuple(remaining[: last + 1])
        segments.append(
            Segment(
                recording_id=recording_id,
                repetition_index=len(segments),
                notes=seg_notes,
                start_seconds=seg_notes[0].onset_seconds,
            )
        )
        pos += last + 1
    return segments


def fit_time_map(
    alignment: Alignment,
    score: ReferenceScore,
    mode: FitMode | str = FitMode.AFFINE,
    segment_start: float = 0.0,
) -> TimeMap:
    """Fit the beats→seconds map used to normalize deviations.

    affine: least-squares slope and intercept over matched pairs.
    offset: slope pinned to the reference tempo, intercept = mean residual.
    none: nominal reference-tempo map anchored at ``segment_start``.
    Degradation: affine needs ≥ 2 matches (and distinct beats) else offset;
    offset needs ≥ 1 match else none.
    """
    mode = FitMode(mode)
    nominal = score.seconds_per_beat
    matched = alignment.matched
    beats = [score.notes[i].onset_beats for i, _ in matched]
    secs = [n.onset_seconds for _, n in matched]

    if mode == FitMode.AFFINE and len(matched) >= 2 and max(beats) > min(beats):
        n = len(beats)
        mean_b = math.fsum(beats) / n
        mean_s = math.fsum(secs) / n
        var = math.fsum((b - mean_b) ** 2 for b in beats)
        cov = math.fsum((b - mean_b) * (s - mean_s) for b, s in zip(beats, secs))
        slope = cov / var
        return TimeMap(FitMode.AFFINE, slope, mean_s - slope * mean_b)
    if mode != FitMode.NONE and matched:
        residuals = [s - nominal * b for b, s in zip(beats, secs)]
        return TimeMap(FitMode.OFFSET, nominal, math.fsum(residuals) / len(residuals))
    return TimeMap(FitMode.NONE, nominal, segment_start)


def compute_deviations(
    alignment: Alignment, time_map: TimeMap, score: ReferenceScore
) -> list[NoteDeviation]:
    """Signed onset error per reference note; missed notes yield None."""
    out = []
    for ref_index, note in alignment.pairs:
        if note is None:
            out.append(NoteDeviation(ref_index, None))
        else:
            predicted = time_map.predict(score.notes[ref_index].onset_beats)
            out.append(NoteDeviation(ref_index, note.onset_seconds - predicted))
    return out
