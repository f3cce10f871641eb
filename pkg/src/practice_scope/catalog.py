"""On-disk recording library: plain directories, JSON sidecars, and a cached
index rebuildable by rescanning.

Layout under the catalog root:

    index.json                                  cached metadata index
    players/<player>/<exercise>/<stamp>-<id>.mid   recording bytes
    players/<player>/<exercise>/<stamp>-<id>.json  metadata sidecar
    scores/<exercise>.json                      reference scores

Ingestion publishes files before the index and always via write-temp-rename,
so readers never observe partial recordings and the index never references
missing files, even across crashes.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import midi
from .midi import Diagnostics, ExerciseKind, NoteEvent, Recording, RecordingMeta
from .score import ReferenceScore, ScoreError, load_score, score_to_dict

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
_STAMP_FORMAT = "%Y%m%dT%H%M%SZ"


class CatalogError(Exception):
    """Base error; ``code`` matches the API error vocabulary."""

    code = "internal"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail


class NotFoundError(CatalogError):
    code = "notFound"


class ConflictError(CatalogError):
    code = "conflict"


class ParseFailureError(CatalogError):
    code = "parseFailure"


class BadRequestError(CatalogError):
    code = "badRequest"


def format_timestamp(dt: datetime) -> str:
    """Canonical UTC timestamp (whole seconds)."""
    if dt.tzinfo is None:
        raise BadRequestError("recordedAt must carry a timezone")
    return dt.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise BadRequestError(f"invalid timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _slug(name: str) -> str:
    slug = re.sub(r"[^A-Za-z0-9._-]+", "-", name).strip("-")
    return slug or "x"


def recording_id(player: str, exercise: str, recorded_at: datetime) -> str:
    """Deterministic opaque id, unique per (player, exercise, recordedAt)."""
    key = f"{player}\n{exercise}\n{format_timestamp(recorded_at)}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _dump_json(obj: dict) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")


@dataclass
class IndexEntry:
    id: str
    player: str
    exercise: str
    recorded_at: datetime
    exercise_kind: ExerciseKind
    path: str  # relative to the catalog root
    digest: str
    note_count: int
    channel_map: dict[int, int] | None = None
    diagnostics: dict[str, int] = field(default_factory=dict)

    @property
    def meta(self) -> RecordingMeta:
        return RecordingMeta(
            player=self.player,
            exercise=self.exercise,
            recorded_at=self.recorded_at,
            exercise_kind=self.exercise_kind,
        )

    def to_json_dict(self) -> dict:
        doc = {
            "id": self.id,
            "player": self.player,
            "exercise": self.exercise,
            "recordedAt": format_timestamp(self.recorded_at),
            "exerciseKind": self.exercise_kind.value,
            "path": self.path,
            "digest": self.digest,
            "noteCount": self.note_count,
            "diagnostics": self.diagnostics,
        }
        if self.channel_map is not None:
            doc["channelMap"] = {str(k): v for k, v in self.channel_map.items()}
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "IndexEntry":
        cm = doc.get("channelMap")
        return cls(
            id=doc["id"],
            player=doc["player"],
            exercise=doc["exercise"],
            recorded_at=parse_timestamp(doc["recordedAt"]),
            exercise_kind=ExerciseKind(doc["exerciseKind"]),
            path=doc["path"],
            digest=doc["digest"],
            note_count=doc["noteCount"],
            channel_map={int(k): int(v) for k, v in cm.items()} if cm else None,
            diagnostics=doc.get("diagnostics", {}),
        )


@dataclass
class RecordingSummary:
    id: str
    meta: RecordingMeta
    note_count: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "player": self.meta.player,
            "exercise": self.meta.exercise,
            "recordedAt": format_timestamp(self.meta.recorded_at),
            "exerciseKind": self.meta.exercise_kind.value,
            "noteCount": self.note_count,
        }


class Catalog:
    """A recording library rooted at a directory. Single writer, many readers."""

    def __init__(self, root: str | Path, create: bool = False):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        if not self.root.is_dir():
            raise NotFoundError(f"catalog root {self.root} does not exist")
        self._entries: list[IndexEntry] = []
        self._note_cache: dict[str, tuple[tuple[NoteEvent, ...], Diagnostics]] = {}
        index_path = self.root / "index.json"
        if index_path.exists():
            doc = json.loads(index_path.read_text(encoding="utf-8"))
            self._entries = [IndexEntry.from_json_dict(e) for e in doc["entries"]]
        else:
            self.rebuild_index()

    # -- index persistence -------------------------------------------------

    def _write_index(self) -> None:
        doc = {"entries": [e.to_json_dict() for e in self._entries]}
        _write_atomic(self.root / "index.json", _dump_json(doc))

    def rebuild_index(self) -> None:
        """Rescan sidecars under players/ and rewrite the index from files."""
        entries = []
        players_dir = self.root / "players"
        if players_dir.is_dir():
            for sidecar in sorted(players_dir.glob("*/*/*.json")):
                if sidecar.name.endswith(".truth.json"):
                    continue
                meta_doc = json.loads(sidecar.read_text(encoding="utf-8"))
                midi_path = sidecar.with_suffix(".mid")
                if not midi_path.exists():
                    continue
                data = midi_path.read_bytes()
                entries.append(self._build_entry(data, meta_doc, midi_path))
        entries.sort(key=lambda e: (e.recorded_at, e.player, e.exercise))
        self._entries = entries
        self._write_index()

    def _build_entry(self, data: bytes, meta_doc: dict, midi_path: Path) -> IndexEntry:
        recorded_at = parse_timestamp(meta_doc["recordedAt"])
        cm_doc = meta_doc.get("channelMap")
        channel_map = {int(k): int(v) for k, v in cm_doc.items()} if cm_doc else None
        notes, diagnostics = midi.notes_from_smf(
            data, channel_map if channel_map is not None else None
        )
        return IndexEntry(
            id=recording_id(meta_doc["player"], meta_doc["exercise"], recorded_at),
            player=meta_doc["player"],
            exercise=meta_doc["exercise"],
            recorded_at=recorded_at,
            exercise_kind=ExerciseKind(meta_doc["exerciseKind"]),
            path=str(midi_path.relative_to(self.root)),
            digest=_digest(data),
            note_count=len(notes),
            channel_map=channel_map,
            diagnostics=diagnostics.as_dict(),
        )

    # -- ingestion ----------------------------------------------------------

    def ingest_recording(
        self,
        midi_bytes: bytes,
        meta: RecordingMeta,
        channel_map: dict[int, int] | None = None,
    ) -> str:
        """Validate, persist, and index one recording; returns its id.

        Duplicate (player, exercise, recordedAt) → ConflictError; unparseable
        bytes → ParseFailureError before anything is written.
        """
        if not meta.player or not meta.exercise:
            raise BadRequestError("player and exercise must be nonempty")
        try:
            notes, diagnostics = midi.notes_from_smf(
                midi_bytes, channel_map if channel_map is not None else None
            )
        except midi.SmfParseError as exc:
            raise ParseFailureError(
                f"not a parseable SMF: {exc}", detail={"byteOffset": exc.offset}
            ) from exc

        rid = recording_id(meta.player, meta.exercise, meta.recorded_at)
        if any(e.id == rid for e in self._entries):
            raise ConflictError(
                f"recording already ingested for ({meta.player}, {meta.exercise}, "
                f"{format_timestamp(meta.recorded_at)})"
            )

        stamp = meta.recorded_at.astimezone(timezone.utc).strftime(_STAMP_FORMAT)
        rel_dir = Path("players") / _slug(meta.player) / _slug(meta.exercise)
        rel_path = rel_dir / f"{stamp}-{rid[:8]}.mid"
        abs_path = self.root / rel_path
        abs_path.parent.mkdir(parents=True, exist_ok=True)

        meta_doc = {
            "player": meta.player,
            "exercise": meta.exercise,
            "recordedAt": format_timestamp(meta.recorded_at),
            "exerciseKind": meta.exercise_kind.value,
        }
        if channel_map is not None:
            meta_doc["channelMap"] = {str(k): v for k, v in channel_map.items()}

        # Files first, index last: a crash in between leaves orphan files,
        # never an index entry pointing at nothing.
        _write_atomic(abs_path, midi_bytes)
        _write_atomic(abs_path.with_suffix(".json"), _dump_json(meta_doc))

        entry = IndexEntry(
            id=rid,
            player=meta.player,
            exercise=meta.exercise,
            recorded_at=meta.recorded_at.astimezone(timezone.utc),
            exercise_kind=meta.exercise_kind,
            path=str(rel_path),
            digest=_digest(midi_bytes),
            note_count=len(notes),
            channel_map=channel_map,
            diagnostics=diagnostics.as_dict(),
        )
        self._entries.append(entry)
        self._note_cache[entry.digest] = (tuple(notes), diagnostics)
        self._write_index()
        return rid

    # -- queries -------------------------------------------------------------

    def players(self) -> list[str]:
        return sorted({e.player for e in self._entries})

    def exercises(self) -> list[str]:
        names = {e.exercise for e in self._entries}
        names.update(p.stem for p in (self.root / "scores").glob("*.json"))
        return sorted(names)

    def query_recordings(
        self,
        player: str | None = None,
        exercise: str | None = None,
        since: datetime | None = None,
        until: datetime | None = None,
    ) -> list[RecordingSummary]:
        """Conjunctive filter; results chronological by recordedAt, ascending."""
        out = []
        for e in self._entries:
            if player is not None and e.player != player:
                continue
            if exercise is not None and e.exercise != exercise:
                continue
            if since is not None and e.recorded_at < since:
                continue
            if until is not None and e.recorded_at > until:
                continue
            out.append(RecordingSummary(id=e.id, meta=e.meta, note_count=e.note_count))
        out.sort(key=lambda s: (s.meta.recorded_at, s.meta.player, s.meta.exercise))
        return out

    def entry(self, rid: str) -> IndexEntry:
        for e in self._entries:
            if e.id == rid:
                return e
        raise NotFoundError(f"unknown recording id {rid!r}")

    def load_recording(self, rid: str) -> Recording:
        """Parse (or reuse cached) note events for a recording.

        A digest mismatch against the index means the file changed out of
        band; the recording is re-parsed and the in-memory digest refreshed.
        """
        e = self.entry(rid)
        path = self.root / e.path
        if not path.exists():
            raise NotFoundError(f"recording file missing: {e.path}")
        data = path.read_bytes()
        digest = _digest(data)
        if digest != e.digest:
            e.digest = digest  # out-of-band edit: re-parse below, refresh in memory
        if digest not in self._note_cache:
            cm = e.channel_map if e.channel_map is not None else None
            notes, diagnostics = midi.notes_from_smf(data, cm)
            self._note_cache[digest] = (tuple(notes), diagnostics)
            e.note_count = len(notes)
        notes, _ = self._note_cache[digest]
        return Recording(id=e.id, notes=notes, meta=e.meta)

    def content_digests(self, rids: list[str]) -> tuple[str, ...]:
        return tuple(self.entry(rid).digest for rid in rids)

    # -- scores ---------------------------------------------------------------

    def score_path(self, exercise: str) -> Path:
        return self.root / "scores" / f"{_slug(exercise)}.json"

    def add_score(self, score: ReferenceScore) -> None:
        path = self.score_path(score.exercise)
        path.parent.mkdir(parents=True, exist_ok=True)
        _write_atomic(path, _dump_json(score_to_dict(score)))

    def get_score(self, exercise: str) -> ReferenceScore:
        path = self.score_path(exercise)
        if not path.exists():
            raise NotFoundError(f"no score for exercise {exercise!r}")
        try:
            return load_score(path, exercise=exercise)
        except ScoreError as exc:
            raise ParseFailureError(f"invalid score document: {exc}") from exc

    # -- integrity -------------------------------------------------------------

    def validate(self) -> None:
        """Assert the index references only existing, digest-matching files."""
        seen = set()
        for e in self._entries:
            if e.id in seen:
                raise CatalogError(f"duplicate index entry {e.id}")
            seen.add(e.id)
            path = self.root / e.path
            if not path.exists():
                raise CatalogError(f"dangling index entry {e.id}: {e.path} missing")
            if _digest(path.read_bytes()) != e.digest:
                raise CatalogError(f"digest mismatch for {e.id}")
