"""Reference scores, instrument tuning, and fretboard coordinate arithmetic.

A reference score lives in the beat domain (quarter notes), independent of
any performance tempo. Tunings map (string, fret) cells to MIDI pitches;
string 1 is the highest-pitched string.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class ScoreError(ValueError):
    """Raised when a score document fails validation."""


@dataclass(frozen=True, slots=True)
class FretboardCoord:
    """One cell on the fretboard: string 1..S (1 = highest), fret 0..fret_count."""

    string: int
    fret: int


@dataclass(frozen=True, slots=True)
class Tuning:
    """Open-string pitches from string 1 (highest) down to string S (lowest)."""

    open_pitches: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.open_pitches) < 1:
            raise ValueError("tuning needs at least one string")
        for a, b in zip(self.open_pitches, self.open_pitches[1:]):
            if b >= a:
                raise ValueError("open pitches must strictly decrease from string 1 down")

    @property
    def string_count(self) -> int:
        return len(self.open_pitches)


#: E4 B3 G3 D3 A2 E2 — standard six-string guitar tuning.
STANDARD_TUNING = Tuning((64, 59, 55, 50, 45, 40))

#: Highest fret rendered and considered playable by default.
DEFAULT_FRET_COUNT = 22


def pitch_at(tuning: Tuning, coord: FretboardCoord, fret_count: int = DEFAULT_FRET_COUNT) -> int:
    """MIDI pitch sounding at a fretboard cell."""
    if not 1 <= coord.string <= tuning.string_count:
        raise ValueError(f"string {coord.string} out of range 1..{tuning.string_count}")
    if not 0 <= coord.fret <= fret_count:
        raise ValueError(f"fret {coord.fret} out of range 0..{fret_count}")
    return tuning.open_pitches[coord.string - 1] + coord.fret


def coords_for_pitch(
    tuning: Tuning, pitch: int, fret_count: int = DEFAULT_FRET_COUNT
) -> list[FretboardCoord]:
    """All cells sounding ``pitch``, ordered by string number; empty if unplayable."""
    coords = []
    for string, open_pitch in enumerate(tuning.open_pitches, start=1):
        fret = pitch - open_pitch
        if 0 <= fret <= fret_count:
            coords.append(FretboardCoord(string, fret))
    return coords


@dataclass(frozen=True, slots=True)
class ReferenceNote:
    index: int
    pitch: int
    onset_beats: float
    duration_beats: float


@dataclass(frozen=True, slots=True)
class ReferenceScore:
    """Ground-truth note list for one exercise, in quarter-note beats."""

    exercise: str
    notes: tuple[ReferenceNote, ...]
    reference_tempo_bpm: float

    @property
    def pitches(self) -> list[int]:
        return [n.pitch for n in self.notes]

    @property
    def seconds_per_beat(self) -> float:
        return 60.0 / self.reference_tempo_bpm


def _validate_notes(
    raw: list[tuple[int, float, float]], voice_limit: int
) -> tuple[ReferenceNote, ...]:
    """Check ordering, bounds, and polyphony; returns indexed notes."""
    if not raw:
        raise ScoreError("score must contain at least one note")
    for i, (pitch, onset, dur) in enumerate(raw):
        if not 0 <= pitch <= 127:
            raise ScoreError(f"note {i}: pitch {pitch} outside 0..127")
        if onset < 0:
            raise ScoreError(f"note {i}: negative onset {onset}")
        if dur <= 0:
            raise ScoreError(f"note {i}: non-positive duration {dur}")
    keys = [(onset, pitch) for pitch, onset, _ in raw]
    if keys != sorted(keys):
        raise ScoreError("notes must be sorted by (onsetBeats, pitch)")

    # Polyphony: count notes sounding at each onset; strict overlap only,
    # a note ending exactly where the next starts is monophonic.
    offending: list[int] = []
    for i, (_, onset, _) in enumerate(raw):
        sounding = sum(
            1 for p, o, d in raw if o <= onset and onset < o + d
        )
        if sounding > voice_limit:
            offending.append(i)
    if offending:
        raise ScoreError(
            f"polyphony exceeds voice limit {voice_limit} at note indices {offending}"
        )
    return tuple(
        ReferenceNote(index=i, pitch=p, onset_beats=o, duration_beats=d)
        for i, (p, o, d) in enumerate(raw)
    )


def score_from_dict(doc: dict, voice_limit: int = 1) -> ReferenceScore:
    """Build a validated score from the JSON score document structure."""
    try:
        exercise = doc["exercise"]
        tempo = doc["referenceTempoBpm"]
        notes = doc["notes"]
    except (KeyError, TypeError) as exc:
        raise ScoreError(f"score document missing field: {exc}") from exc
    if not isinstance(exercise, str) or not exercise:
        raise ScoreError("exercise must be a nonempty string")
    if not isinstance(tempo, (int, float)) or tempo <= 0:
        raise ScoreError(f"referenceTempoBpm must be positive, got {tempo!r}")
    try:
        raw = [(int(n["pitch"]), float(n["onsetBeats"]), float(n["durationBeats"])) for n in notes]
    except (KeyError, TypeError, ValueError) as exc:
        raise ScoreError(f"malformed note entry: {exc}") from exc
    return ReferenceScore(
        exercise=exercise,
        notes=_validate_notes(raw, voice_limit),
        reference_tempo_bpm=float(tempo),
    )


def score_to_dict(score: ReferenceScore) -> dict:
    """Serialize to the JSON score document structure (inverse of score_from_dict)."""
    return {
        "exercise": score.exercise,
        "referenceTempoBpm": score.reference_tempo_bpm,
        "notes": [
            {
                "pitch": n.pitch,
                "onsetBeats": n.onset_beats,
                "durationBeats": n.duration_beats,
            }
            for n in score.notes
        ],
    }


def load_score(
    source: str | Path | bytes,
    exercise: str | None = None,
    voice_limit: int = 1,
) -> ReferenceScore:
    """Load a reference score from a JSON score document or a reference SMF.

    SMF sources keep the beat domain exactly (ticks / ppq); the tempo map's
    first entry supplies the reference tempo. ``exercise`` overrides the name
    (defaults to the file stem for paths).
    """
    name = exercise
    if isinstance(source, (str, Path)):
        path = Path(source)
        data = path.read_bytes()
        if name is None:
            name = path.stem
    else:
        data = source

    if data[:4] == b"MThd":
        return _score_from_smf(data, name or "score", voice_limit)
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ScoreError(f"unrecognized score format: {exc}") from exc
    score = score_from_dict(doc, voice_limit)
    if exercise is not None and exercise != score.exercise:
        score = ReferenceScore(exercise, score.notes, score.reference_tempo_bpm)
    return score


def _score_from_smf(data: bytes, exercise: str, voice_limit: int) -> ReferenceScore:
    # Imported here: midi depends on score for coordinate types.
    from . import midi

    tempo_map, events = midi.parse_smf(data)
    pairs, _ = midi.pair_note_ticks(events)
    ppq = tempo_map.ppq
    first = tempo_map.entries[0]
    bpm = 60_000_000.0 / first[1]
    raw = sorted(
        ((p.pitch, p.on_tick / ppq, (p.off_tick - p.on_tick) / ppq) for p in pairs),
        key=lambda t: (t[1], t[0]),
    )
    return ReferenceScore(
        exercise=exercise,
        notes=_validate_notes(list(raw), voice_limit),
        reference_tempo_bpm=bpm,
    )
