from __future__ import annotations

import json

import pytest

from practice_scope.catalog import (
    BadRequestError,
    Catalog,
    ConflictError,
    NotFoundError,
    ParseFailureError,
    parse_timestamp,
    recording_id,
)
from practice_scope.midi import ExerciseKind, RecordingMeta
from practice_scope.score import score_from_dict
from practice_scope.smf_write import NoteSpec, write_smf


def meta(player="alice", exercise="box", at="2026-01-05T10:00:00Z", kind="scalePattern"):
    return RecordingMeta(
        player=player,
        exercise=exercise,
        recorded_at=parse_timestamp(at),
        exercise_kind=ExerciseKind(kind),
    )


def smf_bytes(pitches=(60, 64, 67)):
    return write_smf(
        [NoteSpec(p, 90, 0, i * 480, i * 480 + 240) for i, p in enumerate(pitches)]
    )


@pytest.fixture
def catalog(tmp_path):
    return Catalog(tmp_path / "cat", create=True)


def test_ingest_happy_path(catalog):
    rid = catalog.ingest_recording(smf_bytes(), meta())
    assert len(catalog.query_recordings()) == 1
    summary = catalog.query_recordings()[0]
    assert summary.id == rid
    assert summary.note_count == 3
    rec = catalog.load_recording(rid)
    assert [n.pitch for n in rec.notes] == [60, 64, 67]
    catalog.validate()


def test_ingest_duplicate_conflicts(catalog):
    catalog.ingest_recording(smf_bytes(), meta())
    with pytest.raises(ConflictError):
        catalog.ingest_recording(smf_bytes((50,)), meta())
    assert len(catalog.query_recordings()) == 1


def test_garbage_rejected_atomically(catalog):
    with pytest.raises(ParseFailureError) as exc:
        catalog.ingest_recording(b"\x00\x01\x02\x03", meta())
    assert exc.value.detail == {"byteOffset": 0}
    assert catalog.query_recordings() == []
    files = [p for p in catalog.root.rglob("*") if p.is_file() and p.name != "index.json"]
    assert files == []


def test_empty_meta_rejected(catalog):
    with pytest.raises(BadRequestError):
        catalog.ingest_recording(smf_bytes(), meta(player=""))


def test_query_filters(catalog):
    catalog.ingest_recording(smf_bytes(), meta("a", "x", "2026-01-01T00:00:00Z"))
    catalog.ingest_recording(smf_bytes(), meta("b", "x", "2026-01-02T00:00:00Z"))
    catalog.ingest_recording(smf_bytes(), meta("a", "y", "2026-01-03T00:00:00Z"))
    assert len(catalog.query_recordings()) == 3
    assert [s.meta.player for s in catalog.query_recordings()] == ["a", "b", "a"]
    assert len(catalog.query_recordings(player="a")) == 2
    assert len(catalog.query_recordings(player="a", exercise="x")) == 1
    after = catalog.query_recordings(since=parse_timestamp("2026-01-04T00:00:00Z"))
    assert after == []
    until = catalog.query_recordings(until=parse_timestamp("2026-01-01T00:00:00Z"))
    assert len(until) == 1


def test_players_and_exercises(catalog):
    catalog.ingest_recording(smf_bytes(), meta("zed", "x"))
    catalog.ingest_recording(smf_bytes(), meta("ann", "y"))
    assert catalog.players() == ["ann", "zed"]
    assert catalog.exercises() == ["x", "y"]


def test_reload_sees_ingested(tmp_path):
    cat = Catalog(tmp_path / "c", create=True)
    rid = cat.ingest_recording(smf_bytes(), meta())
    again = Catalog(tmp_path / "c")
    assert [s.id for s in again.query_recordings()] == [rid]
    again.validate()


def test_crash_before_index_write_leaves_no_dangling_entry(tmp_path, monkeypatch):
    cat = Catalog(tmp_path / "c", create=True)
    cat.ingest_recording(smf_bytes(), meta(at="2026-01-01T00:00:00Z"))

    class Crash(RuntimeError):
        pass

    def boom(self):
        raise Crash("simulated crash between file write and index publication")

    monkeypatch.setattr(Catalog, "_write_index", boom)
    with pytest.raises(Crash):
        cat.ingest_recording(smf_bytes(), meta(at="2026-02-01T00:00:00Z"))
    monkeypatch.undo()

    reloaded = Catalog(tmp_path / "c")
    assert len(reloaded.query_recordings()) == 1
    reloaded.validate()


def test_rebuild_index_adopts_orphans(tmp_path, monkeypatch):
    cat = Catalog(tmp_path / "c", create=True)

    def boom(self):
        raise RuntimeError("crash")

    monkeypatch.setattr(Catalog, "_write_index", boom)
    with pytest.raises(RuntimeError):
        cat.ingest_recording(smf_bytes(), meta())
    monkeypatch.undo()

    fresh = Catalog(tmp_path / "c")
    assert fresh.query_recordings() == []
    fresh.rebuild_index()
    assert len(fresh.query_recordings()) == 1
    fresh.validate()


def test_out_of_band_edit_triggers_reparse(catalog):
    rid = catalog.ingest_recording(smf_bytes((60,)), meta())
    path = catalog.root / catalog.entry(rid).path
    path.write_bytes(smf_bytes((61, 62)))
    rec = catalog.load_recording(rid)
    assert [n.pitch for n in rec.notes] == [61, 62]


def test_unknown_recording_id(catalog):
    with pytest.raises(NotFoundError):
        catalog.load_recording("deadbeef")


def test_scores_roundtrip(catalog):
    score = score_from_dict(
        {
            "exercise": "box",
            "referenceTempoBpm": 100,
            "notes": [{"pitch": 60, "onsetBeats": 0, "durationBeats": 1}],
        }
    )
    catalog.add_score(score)
    assert catalog.get_score("box") == score
    with pytest.raises(NotFoundError):
        catalog.get_score("nope")
    assert "box" in catalog.exercises()


def test_recording_id_deterministic():
    at = parse_timestamp("2026-01-05T10:00:00Z")
    assert recording_id("a", "x", at) == recording_id("a", "x", at)
    assert recording_id("a", "x", at) != recording_id("b", "x", at)


def test_sidecar_contents(catalog):
    rid = catalog.ingest_recording(smf_bytes(), meta(), channel_map={0: 6})
    sidecar = (catalog.root / catalog.entry(rid).path).with_suffix(".json")
    doc = json.loads(sidecar.read_text())
    assert doc["player"] == "alice"
    assert doc["exerciseKind"] == "scalePattern"
    assert doc["channelMap"] == {"0": 6}
    # channel map applies on parse: pitch 60 on string 6 = fret 20
    rec = catalog.load_recording(rid)
    assert rec.notes[0].coord is not None
    assert rec.notes[0].coord.string == 6
