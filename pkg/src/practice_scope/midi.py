"""Standard MIDI File ingestion: parsing, tick→seconds conversion, note pairing,
and string/fret inference for per-string (hexaphonic) pickup recordings.

Parses SMF formats 0 and 1 with PPQ time division, per the SMF 1.0 layout:
"MThd"/"MTrk" chunks, big-endian lengths, variable-length delta times, and
running status. Format 2 and SMPTE division are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum

from .score import (
    DEFAULT_FRET_COUNT,
    STANDARD_TUNING,
    FretboardCoord,
    Tuning,
    coords_for_pitch,
)

#: Hexaphonic pickup convention: channels 0..5 carry strings 1..6.
DEFAULT_CHANNEL_MAP: dict[int, int] = {ch: ch + 1 for ch in range(6)}

_DEFAULT_TEMPO = 500_000  # µs per quarter note = 120 BPM


class SmfParseError(ValueError):
    """Malformed SMF input; ``offset`` is the byte position of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class EventKind(str, Enum):
    NOTE_ON = "noteOn"
    NOTE_OFF = "noteOff"
    TEMPO_CHANGE = "tempoChange"
    OTHER = "other"


@dataclass(frozen=True, slots=True)
class RawEvent:
    """One merged-track MIDI event at an absolute tick."""

    tick: int
    kind: EventKind
    channel: int | None = None
    pitch: int | None = None
    velocity: int | None = None
    microseconds_per_quarter: int | None = None
    status: int | None = None


@dataclass(frozen=True)
class TempoMap:
    """Tempo changes as (tick, µs per quarter note), plus the header's PPQ."""

    entries: tuple[tuple[int, int], ...]
    ppq: int

    def __post_init__(self) -> None:
        if self.ppq <= 0:
            raise ValueError("ppq must be positive")
        ticks = [t for t, _ in self.entries]
        if ticks != sorted(set(ticks)):
            raise ValueError("tempo entries must be strictly sorted by tick")
        if not self.entries or self.entries[0][0] != 0:
            object.__setattr__(
                self, "entries", ((0, _DEFAULT_TEMPO),) + self.entries
            )


def ticks_to_seconds(tempo_map: TempoMap, tick: int) -> float:
    """Piecewise-linear tick→seconds: (Δtick / ppq) × (µsPerQuarter / 10⁶) per segment."""
    if tick < 0:
        raise ValueError("tick must be nonnegative")
    seconds = 0.0
    entries = tempo_map.entries
    for i, (seg_tick, uspq) in enumerate(entries):
        seg_end = entries[i + 1][0] if i + 1 < len(entries) else tick
        if tick <= seg_tick:
            break
        span = min(tick, seg_end) - seg_tick
        seconds += (span / tempo_map.ppq) * (uspq / 1_000_000)
    return seconds


@dataclass
class Diagnostics:
    """Non-fatal ingestion anomalies, exposed as a JSON-serializable summary."""

    orphan_note_offs: int = 0
    zero_duration_notes: int = 0
    unclosed_notes: int = 0
    unmapped_notes: int = 0
    negative_fret_notes: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "orphanNoteOffs": self.orphan_note_offs,
            "zeroDurationNotes": self.zero_duration_notes,
            "unclosedNotes": self.unclosed_notes,
            "unmappedNotes": self.unmapped_notes,
            "negativeFretNotes": self.negative_fret_notes,
        }

    @property
    def clean(self) -> bool:
        return all(v == 0 for v in self.as_dict().values())


@dataclass(frozen=True, slots=True)
class NoteEvent:
    """One recorded note in seconds, optionally located on the fretboard."""

    pitch: int
    onset_seconds: float
    duration_seconds: float
    velocity: int
    channel: int
    coord: FretboardCoord | None = None


class ExerciseKind(str, Enum):
    SCALE_PATTERN = "scalePattern"
    RIFF = "riff"
    IMPROVISATION = "improvisation"


@dataclass(frozen=True, slots=True)
class RecordingMeta:
    player: str
    exercise: str
    recorded_at: datetime
    exercise_kind: ExerciseKind


@dataclass(frozen=True, slots=True)
class Recording:
    id: str
    notes: tuple[NoteEvent, ...]
    meta: RecordingMeta


class _Reader:
    """Byte cursor with the absolute offset needed for parse errors."""

    __slots__ = ("data", "pos", "end")

    def __init__(self, data: bytes, pos: int = 0, end: int | None = None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def remaining(self) -> int:
        return self.end - self.pos

    def u8(self) -> int:
        if self.pos >= self.end:
            raise SmfParseError("unexpected end of data", self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n: int) -> bytes:
        if self.remaining() < n:
            raise SmfParseError(f"truncated chunk: wanted {n} bytes", self.pos)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def vlq(self) -> int:
        """Variable-length quantity: 7 bits per byte, high bit = continuation."""
        value = 0
        for i in range(4):
            b = self.u8()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise SmfParseError("variable-length quantity exceeds 4 bytes", self.pos)


_DATA_BYTES = {0x8: 2, 0x9: 2, 0xA: 2, 0xB: 2, 0xC: 1, 0xD: 1, 0xE: 2}


def _parse_track(r: _Reader, events: list[tuple[int, int, RawEvent]],
                 tempos: list[tuple[int, int]]) -> None:
    tick = 0
    running_status: int | None = None
    seq = 0

    def emit(ev: RawEvent) -> None:
        nonlocal seq
        events.append((ev.tick, seq, ev))
        seq += 1

    while r.remaining() > 0:
        tick += r.vlq()
        first = r.u8()
        if first & 0x80:
            status = first
        else:
            if running_status is None:
                raise SmfParseError("data byte with no running status", r.pos - 1)
            status = running_status
            r.pos -= 1

        if status == 0xFF:
            running_status = None
            meta_type = r.u8()
            length = r.vlq()
            payload = r.take(length)
            if meta_type == 0x51:
                if length != 3:
                    raise SmfParseError("tempo meta event must carry 3 bytes", r.pos - length)
                uspq = int.from_bytes(payload, "big")
                if uspq <= 0:
                    raise SmfParseError("tempo must be positive", r.pos - length)
                tempos.append((tick, uspq))
                emit(RawEvent(tick, EventKind.TEMPO_CHANGE,
                              microseconds_per_quarter=uspq, status=status))
            else:
                emit(RawEvent(tick, EventKind.OTHER, status=status))
                if meta_type == 0x2F:  # end of track
                    return
        elif status in (0xF0, 0xF7):
            running_status = None
            length = r.vlq()
            r.take(length)
            emit(RawEvent(tick, EventKind.OTHER, status=status))
        elif status >= 0xF0:
            raise SmfParseError(f"unsupported system message 0x{status:02x}", r.pos - 1)
        else:
            running_status = status
            hi, channel = status >> 4, status & 0x0F
            data = r.take(_DATA_BYTES[hi])
            if any(b & 0x80 for b in data):
                raise SmfParseError("data byte has high bit set", r.pos - len(data))
            if hi == 0x9:
                emit(RawEvent(tick, EventKind.NOTE_ON, channel=channel,
                              pitch=data[0], velocity=data[1], status=status))
            elif hi == 0x8:
                emit(RawEvent(tick, EventKind.NOTE_OFF, channel=channel,
                              pitch=data[0], velocity=data[1], status=status))
            else:
                emit(RawEvent(tick, EventKind.OTHER, channel=channel, status=status))


def parse_smf(data: bytes) -> tuple[TempoMap, list[RawEvent]]:
    """Parse an SMF into a tempo map and one tick-ordered merged event list.

    Raises SmfParseError (with byte offset) on a malformed header, truncated
    chunk, SMPTE time division, or format 2.
    """
    r = _Reader(data)
    if r.take(4) != b"MThd":
        raise SmfParseError("missing MThd header", 0)
    header_len = r.u32()
    if header_len < 6:
        raise SmfParseError(f"header chunk too short ({header_len})", r.pos - 4)
    fmt = r.u16()
    n_tracks = r.u16()
    division = r.u16()
    r.take(header_len - 6)
    if fmt == 2:
        raise SmfParseError("format 2 files are not supported", 8)
    if fmt not in (0, 1):
        raise SmfParseError(f"unknown SMF format {fmt}", 8)
    if division & 0x8000:
        raise SmfParseError("SMPTE time division is not supported", 12)
    if division == 0:
        raise SmfParseError("PPQ division must be positive", 12)

    keyed: list[tuple[int, int, RawEvent]] = []
    tempos: list[tuple[int, int]] = []
    tracks_seen = 0
    while r.remaining() > 0 and tracks_seen < n_tracks:
        chunk_start = r.pos
        chunk_id = r.take(4)
        length = r.u32()
        if r.remaining() < length:
            raise SmfParseError(f"truncated chunk {chunk_id!r}", chunk_start)
        if chunk_id == b"MTrk":
            track = _Reader(r.data, r.pos, r.pos + length)
            _parse_track(track, keyed, tempos)
            tracks_seen += 1
        # Alien chunk types are skipped per the SMF spec.
        r.pos += length
    if tracks_seen < n_tracks:
        raise SmfParseError(
            f"header declared {n_tracks} tracks, found {tracks_seen}", r.pos
        )

    keyed.sort(key=lambda item: item[0])  # stable: preserves track/file order at equal ticks
    merged = [ev for _, _, ev in keyed]

    tempo_entries: dict[int, int] = {}
    for tick, uspq in sorted(tempos, key=lambda t: t[0]):
        tempo_entries[tick] = uspq  # later events at the same tick win
    tempo_map = TempoMap(tuple(sorted(tempo_entries.items())), ppq=division)
    return tempo_map, merged


@dataclass(frozen=True, slots=True)
class TickNote:
    """A paired note in the tick domain (shared by score and recording loaders)."""

    pitch: int
    velocity: int
    channel: int
    on_tick: int
    off_tick: int


def pair_note_ticks(events: list[RawEvent]) -> tuple[list[TickNote], Diagnostics]:
    """Match note-ons to the earliest matching off (or velocity-0 on).

    Pairing is FIFO per (pitch, channel). Unclosed notes are closed at the
    final event tick; orphan offs and zero-duration notes are tallied, not fatal.
    """
    diagnostics = Diagnostics()
    open_notes: dict[tuple[int, int], list[tuple[int, int]]] = {}
    paired: list[TickNote] = []
    final_tick = events[-1].tick if events else 0

    def close(key: tuple[int, int], off_tick: int) -> None:
        on_tick, velocity = open_notes[key].pop(0)
        if not open_notes[key]:
            del open_notes[key]
        if off_tick <= on_tick:
            diagnostics.zero_duration_notes += 1
            return
        paired.append(TickNote(key[0], velocity, key[1], on_tick, off_tick))

    for ev in events:
        if ev.kind not in (EventKind.NOTE_ON, EventKind.NOTE_OFF):
            continue
        key = (ev.pitch, ev.channel)
        is_off = ev.kind == EventKind.NOTE_OFF or ev.velocity == 0
        if is_off:
            if key in open_notes:
                close(key, ev.tick)
            else:
                diagnostics.orphan_note_offs += 1
        else:
            open_notes.setdefault(key, []).append((ev.tick, ev.velocity))

    for key in sorted(open_notes):
        while key in open_notes:
            diagnostics.unclosed_notes += 1
            close(key, final_tick)

    paired.sort(key=lambda n: (n.on_tick, n.pitch, n.channel))
    return paired, diagnostics


def pair_notes(
    events: list[RawEvent], tempo_map: TempoMap
) -> tuple[list[NoteEvent], Diagnostics]:
    """Pair note events and convert ticks to seconds via the tempo map."""
    ticks, diagnostics = pair_note_ticks(events)
    notes = []
    for t in ticks:
        onset = ticks_to_seconds(tempo_map, t.on_tick)
        notes.append(
            NoteEvent(
                pitch=t.pitch,
                onset_seconds=onset,
                duration_seconds=ticks_to_seconds(tempo_map, t.off_tick) - onset,
                velocity=t.velocity,
                channel=t.channel,
            )
        )
    notes.sort(key=lambda n: (n.onset_seconds, n.pitch))
    return notes, diagnostics


def infer_string_fret(
    note: NoteEvent,
    channel_map: dict[int, int] | None = None,
    tuning: Tuning = STANDARD_TUNING,
    fret_count: int = DEFAULT_FRET_COUNT,
    diagnostics: Diagnostics | None = None,
) -> FretboardCoord | None:
    """Locate a note on the fretboard.

    A channel map (channel → string number) pins the string, as emitted by
    per-string pickups; otherwise the lowest playable fret wins, ties going to
    the lowest string number. Returns None for unplayable pitches, tallying
    the miss (a negative fret under a channel map signals a wrong map).
    """
    if channel_map is not None and note.channel in channel_map:
        string = channel_map[note.channel]
        if not 1 <= string <= tuning.string_count:
            raise ValueError(f"channel map targets invalid string {string}")
        fret = note.pitch - tuning.open_pitches[string - 1]
        if fret < 0:
            if diagnostics is not None:
                diagnostics.negative_fret_notes += 1
                diagnostics.unmapped_notes += 1
            return None
        if fret > fret_count:
            if diagnostics is not None:
                diagnostics.unmapped_notes += 1
            return None
        return FretboardCoord(string, fret)

    candidates = coords_for_pitch(tuning, note.pitch, fret_count)
    if not candidates:
        if diagnostics is not None:
            diagnostics.unmapped_notes += 1
        return None
    return min(candidates, key=lambda c: (c.fret, c.string))


def attach_coords(
    notes: list[NoteEvent],
    channel_map: dict[int, int] | None = None,
    tuning: Tuning = STANDARD_TUNING,
    fret_count: int = DEFAULT_FRET_COUNT,
    diagnostics: Diagnostics | None = None,
) -> list[NoteEvent]:
    """Return notes with inferred fretboard coordinates attached."""
    return [
        replace(
            n,
            coord=infer_string_fret(n, channel_map, tuning, fret_count, diagnostics),
        )
        for n in notes
    ]


def notes_from_smf(
    data: bytes,
    channel_map: dict[int, int] | None = None,
    tuning: Tuning = STANDARD_TUNING,
    fret_count: int = DEFAULT_FRET_COUNT,
) -> tuple[list[NoteEvent], Diagnostics]:
    """Full ingestion: parse, pair, convert to seconds, and infer coordinates.

    ``channel_map=None`` selects the hexaphonic default; pass an empty dict
    to force the min-fret heuristic for every note.
    """
    if channel_map is None:
        channel_map = DEFAULT_CHANNEL_MAP
    tempo_map, events = parse_smf(data)
    notes, diagnostics = pair_notes(events, tempo_map)
    notes = attach_coords(notes, channel_map, tuning, fret_count, diagnostics)
    return notes, diagnostics
