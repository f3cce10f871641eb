"""Music-theory note roles for improvisation views.

A scale spec assigns every pitch class one of four roles: the root, other
scale tones, sparingly-used blue notes, or outside notes. Roles are
octave-independent (pitch class = pitch mod 12).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .midi import Recording

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


class NoteRole(str, Enum):
    ROOT = "root"
    SCALE_TONE = "scaleTone"
    BLUE_NOTE = "blueNote"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class ScaleSpec:
    """Named scale with a root and optional blue notes, as pitch-class sets."""

    name: str
    root_pitch_class: int
    scale_pitch_classes: frozenset[int]
    blue_pitch_classes: frozenset[int]

    def __post_init__(self) -> None:
        all_pcs = {self.root_pitch_class} | self.scale_pitch_classes | self.blue_pitch_classes
        if not all(0 <= pc <= 11 for pc in all_pcs):
            raise ValueError("pitch classes must be in 0..11")
        if self.root_pitch_class not in self.scale_pitch_classes:
            raise ValueError("root must be part of the scale")
        if self.scale_pitch_classes & self.blue_pitch_classes:
            raise ValueError("blue notes must be disjoint from the scale")


#: The blues-improvisation default: A minor pentatonic with the ♭5 blue note.
A_MINOR_PENTATONIC_BLUES = ScaleSpec(
    name="A minor pentatonic blues",
    root_pitch_class=9,
    scale_pitch_classes=frozenset({9, 0, 2, 4, 7}),
    blue_pitch_classes=frozenset({3}),
)

BUILTIN_SCALES = {"a-minor-pentatonic-blues": A_MINOR_PENTATONIC_BLUES}


@dataclass(frozen=True, slots=True)
class RoleSpan:
    start_seconds: float
    duration_seconds: float
    role: NoteRole
    pitch: int


@dataclass(frozen=True)
class RoleSequence:
    """All notes of one recording with their classified roles, by onset."""

    recording_id: str
    spans: tuple[RoleSpan, ...]

    def to_json_dict(self) -> dict:
        return {
            "recordingId": self.recording_id,
            "spans": [
                {
                    "startSeconds": s.start_seconds,
                    "durationSeconds": s.duration_seconds,
                    "role": s.role.value,
                    "pitch": s.pitch,
                }
                for s in self.spans
            ],
        }


def classify_note(pitch: int, spec: ScaleSpec) -> NoteRole:
    """Role of a pitch under the scale spec; total over all MIDI pitches."""
    pc = pitch % 12
    if pc == spec.root_pitch_class:
        return NoteRole.ROOT
    if pc in spec.blue_pitch_classes:
        return NoteRole.BLUE_NOTE
    if pc in spec.scale_pitch_classes:
        return NoteRole.SCALE_TONE
    return NoteRole.OUTSIDE


def role_sequence(recording: Recording, spec: ScaleSpec) -> RoleSequence:
    """One role span per recorded note, onset order preserved."""
    spans = tuple(
        RoleSpan(
            start_seconds=n.onset_seconds,
            duration_seconds=n.duration_seconds,
            role=classify_note(n.pitch, spec),
            pitch=n.pitch,
        )
        for n in recording.notes
    )
    return RoleSequence(recording_id=recording.id, spans=spans)


def role_duration_shares(sequence: RoleSequence) -> dict[NoteRole, float]:
    """Fraction of total sounded duration per role; zeros for an empty sequence."""
    totals = {role: 0.0 for role in NoteRole}
    for span in sequence.spans:
        totals[span.role] += span.duration_seconds
    grand = sum(totals.values())
    if grand <= 0:
        return totals
    return {role: value / grand for role, value in totals.items()}


def scale_spec_from_dict(doc: dict) -> ScaleSpec:
    """Parse the scale-spec JSON document structure."""
    try:
        return ScaleSpec(
            name=str(doc["name"]),
            root_pitch_class=int(doc["rootPitchClass"]),
            scale_pitch_classes=frozenset(int(p) for p in doc["scalePitchClasses"]),
            blue_pitch_classes=frozenset(int(p) for p in doc["bluePitchClasses"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed scale spec: {exc}") from exc


def scale_spec_to_dict(spec: ScaleSpec) -> dict:
    return {
        "name": spec.name,
        "rootPitchClass": spec.root_pitch_class,
        "scalePitchClasses": sorted(spec.scale_pitch_classes),
        "bluePitchClasses": sorted(spec.blue_pitch_classes),
    }


def load_scale_spec(path: str | Path) -> ScaleSpec:
    return scale_spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
