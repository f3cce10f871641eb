"""Byte-level Standard MIDI File emitter.

Written directly from the SMF 1.0 chunk layout, independent of the parser in
:mod:`practice_scope.midi`, so parse(write(x)) round-trips are a meaningful
check. Exists for the synthetic-catalog generator and the test suite; the
analytics pipeline itself never writes MIDI.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class NoteSpec:
    """One note to emit, in absolute ticks."""

    pitch: int
    velocity: int
    channel: int
    on_tick: int
    off_tick: int

    def __post_init__(self) -> None:
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch {self.pitch} outside 0..127")
        if not 1 <= self.velocity <= 127:
            raise ValueError(f"velocity {self.velocity} outside 1..127")
        if not 0 <= self.channel <= 15:
            raise ValueError(f"channel {self.channel} outside 0..15")
        if self.on_tick < 0 or self.off_tick < self.on_tick:
            raise ValueError("note ticks must satisfy 0 <= on <= off")


def encode_vlq(value: int) -> bytes:
    """Encode a nonnegative integer as an SMF variable-length quantity."""
    if value < 0 or value > 0x0FFFFFFF:
        raise ValueError(f"VLQ value {value} outside 0..0x0FFFFFFF")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def _chunk(chunk_id: bytes, payload: bytes) -> bytes:
    return chunk_id + len(payload).to_bytes(4, "big") + payload


def _track_bytes(
    timed: list[tuple[int, int, bytes]], use_running_status: bool
) -> bytes:
    """Delta-encode (tick, sort_rank, message) triples into one MTrk chunk."""
    timed.sort(key=lambda t: (t[0], t[1]))
    out = bytearray()
    last_tick = 0
    last_status: int | None = None
    for tick, _, message in timed:
        out += encode_vlq(tick - last_tick)
        last_tick = tick
        status = message[0]
        if status < 0xF0:
            if use_running_status and status == last_status:
                out += message[1:]
            else:
                out += message
            last_status = status
        else:
            out += message
            last_status = None
    out += encode_vlq(0) + b"\xff\x2f\x00"
    return _chunk(b"MTrk", bytes(out))


def write_smf(
    notes: list[NoteSpec],
    ppq: int = 480,
    tempos: tuple[tuple[int, int], ...] = ((0, 500_000),),
    fmt: int = 0,
    use_running_status: bool = True,
) -> bytes:
    """Serialize notes to SMF bytes.

    Format 0 puts tempo and notes in one track; format 1 uses a tempo track
    plus one note track. Note-offs sort before note-ons at equal ticks so
    back-to-back repeats of a pitch never overlap.
    """
    if fmt not in (0, 1):
        raise ValueError("only formats 0 and 1 are supported")
    if not 1 <= ppq <= 0x7FFF:
        raise ValueError("ppq must fit in 15 bits")

    tempo_msgs: list[tuple[int, int, bytes]] = [
        (tick, 0, b"\xff\x51\x03" + int(uspq).to_bytes(3, "big"))
        for tick, uspq in tempos
    ]
    note_msgs: list[tuple[int, int, bytes]] = []
    for n in notes:
        note_msgs.append((n.off_tick, 1, bytes([0x80 | n.channel, n.pitch, 0x40])))
        note_msgs.append((n.on_tick, 2, bytes([0x90 | n.channel, n.pitch, n.velocity])))

    if fmt == 0:
        tracks = [_track_bytes(tempo_msgs + note_msgs, use_running_status)]
    else:
        tracks = [
            _track_bytes(tempo_msgs, use_running_status),
            _track_bytes(note_msgs, use_running_status),
        ]

    header = (
        fmt.to_bytes(2, "big")
        + len(tracks).to_bytes(2, "big")
        + ppq.to_bytes(2, "big")
    )
    return _chunk(b"MThd", header) + b"".join(tracks)
