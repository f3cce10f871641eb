from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from practice_scope.midi import ExerciseKind, NoteEvent, Recording, RecordingMeta
from practice_scope.theory import (
    A_MINOR_PENTATONIC_BLUES,
    NoteRole,
    RoleSequence,
    RoleSpan,
    ScaleSpec,
    classify_note,
    role_duration_shares,
    role_sequence,
    scale_spec_from_dict,
    scale_spec_to_dict,
)
from practice_scope.catalog import parse_timestamp


def recording(notes) -> Recording:
    return Recording(
        id="r1",
        notes=tuple(notes),
        meta=RecordingMeta(
            player="p",
            exercise="e",
            recorded_at=parse_timestamp("2026-01-05T10:00:00Z"),
            exercise_kind=ExerciseKind.IMPROVISATION,
        ),
    )


def note(pitch, onset=0.0, duration=1.0):
    return NoteEvent(pitch=pitch, onset_seconds=onset, duration_seconds=duration,
                     velocity=90, channel=0)


def test_builtin_scale_constants():
    spec = A_MINOR_PENTATONIC_BLUES
    assert spec.root_pitch_class == 9
    assert spec.scale_pitch_classes == frozenset({9, 0, 2, 4, 7})
    assert spec.blue_pitch_classes == frozenset({3})


@pytest.mark.parametrize(
    "pitch,role",
    [
        (57, NoteRole.ROOT),        # A3
        (63, NoteRole.BLUE_NOTE),   # Eb4
        (61, NoteRole.OUTSIDE),     # C#4
        (60, NoteRole.SCALE_TONE),  # C4
        (64, NoteRole.SCALE_TONE),  # E4
    ],
)
def test_classify_note(pitch, role):
    assert classify_note(pitch, A_MINOR_PENTATONIC_BLUES) is role


@given(st.integers(0, 115))
@settings(max_examples=116)
def test_octave_invariance(pitch):
    spec = A_MINOR_PENTATONIC_BLUES
    assert classify_note(pitch, spec) is classify_note(pitch + 12, spec)


def test_roles_partition_all_pitch_classes():
    spec = A_MINOR_PENTATONIC_BLUES
    buckets = {role: set() for role in NoteRole}
    for pc in range(12):
        buckets[classify_note(pc, spec)].add(pc)
    assert buckets[NoteRole.ROOT] == {9}
    assert buckets[NoteRole.BLUE_NOTE] == {3}
    assert buckets[NoteRole.SCALE_TONE] == {0, 2, 4, 7}
    assert buckets[NoteRole.OUTSIDE] == {1, 5, 6, 8, 10, 11}
    assert set().union(*buckets.values()) == set(range(12))


def test_scale_spec_validation():
    with pytest.raises(ValueError, match="root"):
        ScaleSpec("x", 1, frozenset({0, 2}), frozenset())
    with pytest.raises(ValueError, match="disjoint"):
        ScaleSpec("x", 0, frozenset({0, 2}), frozenset({2}))
    with pytest.raises(ValueError, match="0..11"):
        ScaleSpec("x", 12, frozenset({12}), frozenset())


def test_role_sequence_empty_recording():
    assert role_sequence(recording([]), A_MINOR_PENTATONIC_BLUES).spans == ()


def test_role_sequence_single_root():
    seq = role_sequence(recording([note(57, 0.0, 2.0)]), A_MINOR_PENTATONIC_BLUES)
    assert len(seq.spans) == 1
    span = seq.spans[0]
    assert span.role is NoteRole.ROOT
    assert span.duration_seconds == 2.0


def test_twelve_note_lick_has_one_blue_span():
    pitches = [57, 60, 62, 63, 64, 67, 69, 72, 69, 67, 64, 60]
    seq = role_sequence(
        recording([note(p, i * 0.25, 0.2) for i, p in enumerate(pitches)]),
        A_MINOR_PENTATONIC_BLUES,
    )
    blues = [s for s in seq.spans if s.role is NoteRole.BLUE_NOTE]
    assert len(blues) == 1
    assert blues[0].pitch == 63


def test_all_root_shares():
    seq = role_sequence(recording([note(57), note(69)]), A_MINOR_PENTATONIC_BLUES)
    shares = role_duration_shares(seq)
    assert shares[NoteRole.ROOT] == 1.0
    assert shares[NoteRole.SCALE_TONE] == 0.0


def test_even_root_blue_split():
    seq = role_sequence(
        recording([note(57, 0.0, 1.0), note(63, 1.0, 1.0)]), A_MINOR_PENTATONIC_BLUES
    )
    shares = role_duration_shares(seq)
    assert shares[NoteRole.ROOT] == 0.5
    assert shares[NoteRole.BLUE_NOTE] == 0.5


def test_long_blue_note_share():
    # 10 s of notes in total, 1.5 s of blue note: share 0.15 exactly.
    spans = [
        RoleSpan(0.0, 4.25, NoteRole.ROOT, 57),
        RoleSpan(4.25, 1.5, NoteRole.BLUE_NOTE, 63),
        RoleSpan(5.75, 4.25, NoteRole.SCALE_TONE, 60),
    ]
    shares = role_duration_shares(RoleSequence("r", tuple(spans)))
    assert shares[NoteRole.BLUE_NOTE] == 0.15


def test_empty_sequence_all_zero_shares():
    shares = role_duration_shares(RoleSequence("r", ()))
    assert all(v == 0.0 for v in shares.values())
    assert set(shares) == set(NoteRole)


@given(
    st.lists(
        st.tuples(st.integers(0, 127), st.floats(0.01, 10.0)),
        min_size=1,
        max_size=30,
    )
)
@settings(max_examples=150)
def test_shares_sum_to_one(items):
    notes = [note(p, i * 0.1, d) for i, (p, d) in enumerate(items)]
    shares = role_duration_shares(
        role_sequence(recording(notes), A_MINOR_PENTATONIC_BLUES)
    )
    assert sum(shares.values()) == pytest.approx(1.0, abs=1e-12)


def test_scale_spec_json_roundtrip():
    doc = scale_spec_to_dict(A_MINOR_PENTATONIC_BLUES)
    assert doc == {
        "name": "A minor pentatonic blues",
        "rootPitchClass": 9,
        "scalePitchClasses": [0, 2, 4, 7, 9],
        "bluePitchClasses": [3],
    }
    assert scale_spec_from_dict(json.loads(json.dumps(doc))) == A_MINOR_PENTATONIC_BLUES
