"""Deterministic synthetic-catalog generator.

Produces a demo catalog of players, exercises, and improvisation recordings
with controlled timing noise and style-biased fretboard regions, plus
``<recording>.truth.json`` oracle files carrying the injected timing values.

Determinism contract: the same generator spec yields byte-identical output.
The PRNG is pinned to SplitMix64 (Steele et al. mixing constants
0x9e3779b97f4a7c15 / 0xbf58476d1ce4e5b9 / 0x94d049bb133111eb); uniform doubles
take the top 53 bits, and generation order is exercises → sessions → players,
all of which is part of the file-format contract for reimplementations.

Timing construction: played onsets live on an exact integer tick grid and the
injected deviations are integer-tick "bump" vectors (-c, +2c, -c around a
position), which sum to zero and are orthogonal to any arithmetic beat
progression. Offset and affine time-map fits therefore recover the injected
deviations and tempo exactly, up to float rounding, which is what the oracle
files promise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .catalog import Catalog
from .midi import ExerciseKind, RecordingMeta, TempoMap, ticks_to_seconds
from .score import (
    DEFAULT_FRET_COUNT,
    STANDARD_TUNING,
    FretboardCoord,
    ReferenceScore,
    coords_for_pitch,
    pitch_at,
    score_from_dict,
    score_to_dict,
)
from .smf_write import NoteSpec, write_smf
from .theory import A_MINOR_PENTATONIC_BLUES

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Pinned 64-bit PRNG; see the module docstring for the contract."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, n: int) -> int:
        """Uniform integer in 0..n-1 (floor of n·uniform)."""
        return min(int(self.uniform() * n), n - 1)

    def sign(self) -> int:
        return 1 if self.next_u64() & 1 else -1


class GeneratorError(ValueError):
    """Spec cannot produce a valid catalog (bad ranges, occupied outDir, ...)."""


@dataclass(frozen=True)
class Region:
    """A fretboard region notes are drawn from, with a selection weight."""

    strings: tuple[int, ...]
    fret_lo: int
    fret_hi: int
    weight: float = 1.0

    def cells(self) -> list[FretboardCoord]:
        return [
            FretboardCoord(s, f)
            for s in self.strings
            for f in range(self.fret_lo, self.fret_hi + 1)
        ]


@dataclass(frozen=True)
class PlayerSpec:
    name: str
    jitter_std_dev_seconds: float
    style_bias: tuple[Region, ...]
    sessions_override: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ExerciseSpec:
    name: str
    kind: ExerciseKind
    sessions: int
    score: ReferenceScore | None = None
    repetitions_per_session: int = 1
    tempo_factor: tuple[int, int] = (1, 1)  # played = factor × reference tempo
    problem_note: int | None = None
    problem_seconds: float = 0.045
    note_count: int = 64
    long_blue_note: dict | None = None  # {"player", "session", "durationSeconds"}


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int
    players: tuple[PlayerSpec, ...]
    exercises: tuple[ExerciseSpec, ...]


# ---------------------------------------------------------------------------
# Spec (de)serialization
# ---------------------------------------------------------------------------


def generator_spec_from_dict(doc: dict) -> GeneratorSpec:
    players = tuple(
        PlayerSpec(
            name=p["name"],
            jitter_std_dev_seconds=float(p["jitterStdDevSeconds"]),
            style_bias=tuple(
                Region(
                    strings=tuple(int(s) for s in r["strings"]),
                    fret_lo=int(r["frets"][0]),
                    fret_hi=int(r["frets"][1]),
                    weight=float(r.get("weight", 1.0)),
                )
                for r in p.get("styleBias", [])
            ),
            sessions_override={k: int(v) for k, v in p.get("sessionsOverride", {}).items()},
        )
        for p in doc["players"]
    )
    exercises = []
    for e in doc["exercises"]:
        kind = ExerciseKind(e["kind"])
        tf = e.get("tempoFactor", [1, 1])
        exercises.append(
            ExerciseSpec(
                name=e["name"],
                kind=kind,
                sessions=int(e["sessions"]),
                score=score_from_dict(e["score"]) if "score" in e else None,
                repetitions_per_session=int(e.get("repetitionsPerSession", 1)),
                tempo_factor=(int(tf[0]), int(tf[1])),
                problem_note=e.get("problemNote"),
                problem_seconds=float(e.get("problemSeconds", 0.045)),
                note_count=int(e.get("noteCount", 64)),
                long_blue_note=e.get("longBlueNote"),
            )
        )
    return GeneratorSpec(
        seed=int(doc["seed"]), players=players, exercises=tuple(exercises)
    )


def generator_spec_to_dict(spec: GeneratorSpec) -> dict:
    doc: dict = {"seed": spec.seed, "players": [], "exercises": []}
    for p in spec.players:
        pd: dict = {
            "name": p.name,
            "jitterStdDevSeconds": p.jitter_std_dev_seconds,
            "styleBias": [
                {
                    "strings": list(r.strings),
                    "frets": [r.fret_lo, r.fret_hi],
                    "weight": r.weight,
                }
                for r in p.style_bias
            ],
        }
        if p.sessions_override:
            pd["sessionsOverride"] = dict(p.sessions_override)
        doc["players"].append(pd)
    for e in spec.exercises:
        ed: dict = {"name": e.name, "kind": e.kind.value, "sessions": e.sessions}
        if e.score is not None:
            ed["score"] = score_to_dict(e.score)
            ed["repetitionsPerSession"] = e.repetitions_per_session
            ed["tempoFactor"] = list(e.tempo_factor)
            if e.problem_note is not None:
                ed["problemNote"] = e.problem_note
                ed["problemSeconds"] = e.problem_seconds
        else:
            ed["noteCount"] = e.note_count
            if e.long_blue_note is not None:
                ed["longBlueNote"] = dict(e.long_blue_note)
        doc["exercises"].append(ed)
    return doc


def load_generator_spec(path: str | Path) -> GeneratorSpec:
    return generator_spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Timing construction (score exercises)
# ---------------------------------------------------------------------------

_BASE_PPQ = 480
_LEAD_BEATS = 2
_GAP_BEATS = 2


def _bump(length: int, center: int, ticks: int, out: list[int]) -> None:
    """Add a (-c, +2c, -c) deviation bump; zero-sum and linear-orthogonal."""
    out[center - 1] -= ticks
    out[center] += 2 * ticks
    out[center + 1] -= ticks


def _score_recording(
    ex: ExerciseSpec, player: PlayerSpec, session: int, rng: SplitMix64
) -> tuple[bytes, dict]:
    """One session's SMF for a score exercise, plus its timing oracle."""
    score = ex.score
    assert score is not None
    num, den = ex.tempo_factor
    if num < 1 or den < 1:
        raise GeneratorError("tempoFactor parts must be positive integers")
    ppq = _BASE_PPQ * num
    bpm = score.reference_tempo_bpm
    if abs(60_000_000 / bpm - round(60_000_000 / bpm)) > 1e-9:
        raise GeneratorError(f"reference tempo {bpm} BPM has no exact µs/quarter")
    uspq = round(60_000_000 / bpm)
    beat_ticks = _BASE_PPQ * den  # ticks per played beat
    tick_sec = (uspq / 1_000_000) / ppq

    length = len(score.notes)
    reps = ex.repetitions_per_session
    columns = ex.sessions * reps

    def to_ticks(beats: float, what: str) -> int:
        t = beats * beat_ticks
        if abs(t - round(t)) > 1e-6:
            raise GeneratorError(f"{what} {beats} beats is off the tick grid")
        return round(t)

    onsets = [to_ticks(n.onset_beats, "onset") for n in score.notes]
    durations = [max(1, to_ticks(n.duration_beats, "duration")) for n in score.notes]
    span_ticks = onsets[-1] + durations[-1] + _GAP_BEATS * beat_ticks

    base_ticks = round(player.jitter_std_dev_seconds / tick_sec)
    if 0 < base_ticks < columns:
        # Amplitudes must stay positive and strictly decreasing per repetition;
        # zero jitter is fine (no noise bumps at all).
        raise GeneratorError(
            f"jitter {player.jitter_std_dev_seconds}s too small for {columns} repetitions"
        )
    step = max(1, (base_ticks - 1) // columns) if base_ticks else 0

    problem = ex.problem_note
    if problem is not None and not 1 <= problem <= length - 2:
        raise GeneratorError(f"problemNote {problem} needs interior position in 1..{length - 2}")
    problem_ticks = round(ex.problem_seconds / tick_sec)
    if problem is not None and problem_ticks < 1:
        raise GeneratorError("problemSeconds below one tick")

    # Noise bump slots: interior positions clear of the problem bump and of
    # each other, so per-cell |deviation| stays monotone per repetition.
    blocked = set()
    if problem is not None:
        blocked = {problem - 2, problem - 1, problem, problem + 1, problem + 2}
    slots = [j for j in range(1, length - 1) if j not in blocked]

    notes: list[NoteSpec] = []
    tempo_map = TempoMap(((0, uspq),), ppq=ppq)
    segments_truth = []
    for rep in range(reps):
        rep_global = session * reps + rep
        amplitude = base_ticks - rep_global * step
        dev = [0] * length
        if problem is not None:
            _bump(length, problem, problem_ticks, dev)
        chosen: list[int] = []
        if amplitude > 0:
            for j in slots:
                if all(abs(j - c) > 2 for c in chosen):
                    chosen.append(j)
                if len(chosen) == 2:
                    break
        for j in chosen:
            _bump(length, j, rng.sign() * amplitude, dev)

        rep_start = _LEAD_BEATS * beat_ticks + rep_global * span_ticks
        on_ticks = [rep_start + onsets[i] + dev[i] for i in range(length)]
        for i, note in enumerate(score.notes):
            coords = coords_for_pitch(STANDARD_TUNING, note.pitch, DEFAULT_FRET_COUNT)
            coord = min(coords, key=lambda c: (c.fret, c.string)) if coords else None
            channel = coord.string - 1 if coord else 0
            notes.append(
                NoteSpec(
                    pitch=note.pitch,
                    velocity=70 + rng.randint(40),
                    channel=channel,
                    on_tick=on_ticks[i],
                    off_tick=on_ticks[i] + durations[i],
                )
            )

        offset_sec = ticks_to_seconds(tempo_map, rep_start)
        slope = ticks_to_seconds(tempo_map, beat_ticks)
        segments_truth.append(
            {
                "repetition": rep_global,
                "offsetSeconds": offset_sec,
                "deviationsSeconds": [
                    ticks_to_seconds(tempo_map, on_ticks[i])
                    - (slope * score.notes[i].onset_beats + offset_sec)
                    for i in range(length)
                ],
            }
        )

    smf = write_smf(notes, ppq=ppq, tempos=((0, uspq),))
    truth = {
        "kind": ex.kind.value,
        "exercise": ex.name,
        "player": player.name,
        "session": session,
        "tempoFactor": [num, den],
        "secondsPerBeat": ticks_to_seconds(tempo_map, beat_ticks),
        "segments": segments_truth,
    }
    return smf, truth


# ---------------------------------------------------------------------------
# Improvisations
# ---------------------------------------------------------------------------

_IMPROV_USPQ = 500_000  # 120 BPM
_IMPROV_PPQ = 480
_IMPROV_STEP_TICKS = 240
_IMPROV_DURATION_TICKS = 180
_IMPROV_JITTER_TICKS = 30


def _scale_cells(region: Region) -> list[FretboardCoord]:
    """Region cells restricted to the backing scale's pitch classes."""
    spec = A_MINOR_PENTATONIC_BLUES
    return [
        c
        for c in region.cells()
        if pitch_at(STANDARD_TUNING, c) % 12 in spec.scale_pitch_classes
    ]


def _blue_cell(regions: tuple[Region, ...]) -> FretboardCoord | None:
    spec = A_MINOR_PENTATONIC_BLUES
    for region in regions:
        for c in region.cells():
            if pitch_at(STANDARD_TUNING, c) % 12 in spec.blue_pitch_classes:
                return c
    return None


def _pick_region(regions: tuple[Region, ...], rng: SplitMix64) -> Region:
    total = sum(r.weight for r in regions)
    x = rng.uniform() * total
    acc = 0.0
    for r in regions:
        acc += r.weight
        if x < acc:
            return r
    return regions[-1]


def _improv_recording(
    ex: ExerciseSpec, player: PlayerSpec, session: int, rng: SplitMix64
) -> tuple[bytes, dict]:
    """One improvisation take drawn from the player's style regions."""
    if not player.style_bias:
        raise GeneratorError(f"player {player.name} has no style regions")
    count = ex.note_count
    blue = _blue_cell(player.style_bias)
    blue_index = rng.randint(count) if blue is not None else -1

    long_blue = ex.long_blue_note or {}
    has_long_blue = (
        blue is not None
        and long_blue.get("player") == player.name
        and long_blue.get("session") == session
    )
    long_ticks = round(
        float(long_blue.get("durationSeconds", 1.5))
        / ((_IMPROV_USPQ / 1_000_000) / _IMPROV_PPQ)
    )
    long_index = (count * 3) // 4

    notes: list[NoteSpec] = []
    truth_notes = []
    for i in range(count):
        if has_long_blue and i == long_index:
            cell = blue
            duration = long_ticks
        elif blue is not None and i == blue_index and i != long_index:
            cell = blue
            duration = _IMPROV_DURATION_TICKS
        else:
            region = _pick_region(player.style_bias, rng)
            cells = _scale_cells(region)
            if not cells:
                raise GeneratorError(
                    f"region {region} holds no scale notes for {player.name}"
                )
            cell = cells[rng.randint(len(cells))]
            duration = _IMPROV_DURATION_TICKS
        jitter = rng.randint(2 * _IMPROV_JITTER_TICKS + 1) - _IMPROV_JITTER_TICKS
        on_tick = max(0, _LEAD_BEATS * _IMPROV_PPQ + i * _IMPROV_STEP_TICKS + jitter)
        notes.append(
            NoteSpec(
                pitch=pitch_at(STANDARD_TUNING, cell),
                velocity=70 + rng.randint(40),
                channel=cell.string - 1,
                on_tick=on_tick,
                off_tick=on_tick + duration,
            )
        )
        truth_notes.append(
            {
                "pitch": pitch_at(STANDARD_TUNING, cell),
                "cell": [cell.string, cell.fret],
                "onTick": on_tick,
                "jitterTicks": jitter,
                "durationTicks": duration,
            }
        )

    smf = write_smf(notes, ppq=_IMPROV_PPQ, tempos=((0, _IMPROV_USPQ),))
    truth = {
        "kind": ex.kind.value,
        "exercise": ex.name,
        "player": player.name,
        "session": session,
        "notes": truth_notes,
    }
    return smf, truth


# ---------------------------------------------------------------------------
# Catalog assembly
# ---------------------------------------------------------------------------

_BASE_TIME = datetime(2026, 1, 5, 10, 0, 0, tzinfo=timezone.utc)


def generate_catalog(spec: GeneratorSpec, out_dir: str | Path) -> Catalog:
    """Write a complete demo catalog; refuses a non-empty output directory."""
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()):
        raise GeneratorError(f"output directory {out} is not empty")
    catalog = Catalog(out, create=True)
    rng = SplitMix64(spec.seed)

    for ex in spec.exercises:
        if ex.score is not None:
            catalog.add_score(ex.score)

    for ex_idx, ex in enumerate(spec.exercises):
        for session in range(ex.sessions):
            for p_idx, player in enumerate(spec.players):
                budget = player.sessions_override.get(ex.name, ex.sessions)
                if session >= budget:
                    continue
                recorded_at = _BASE_TIME + timedelta(
                    days=7 * session, hours=ex_idx, minutes=10 * p_idx
                )
                if ex.score is not None:
                    smf, truth = _score_recording(ex, player, session, rng)
                else:
                    smf, truth = _improv_recording(ex, player, session, rng)
                meta = RecordingMeta(
                    player=player.name,
                    exercise=ex.name,
                    recorded_at=recorded_at,
                    exercise_kind=ex.kind,
                )
                rid = catalog.ingest_recording(smf, meta)
                truth["recordingId"] = rid
                truth_path = (catalog.root / catalog.entry(rid).path).with_suffix(
                    ".truth.json"
                )
                truth_path.write_text(
                    json.dumps(truth, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8",
                )
    return catalog


# ---------------------------------------------------------------------------
# Demo spec
# ---------------------------------------------------------------------------


def _pentatonic_box_score(name: str) -> ReferenceScore:
    """The A-minor-pentatonic box at frets 5–8, ascending eighth notes."""
    pitches = [45, 48, 50, 52, 55, 57, 60, 62, 64, 67, 69, 72]
    return score_from_dict(
        {
            "exercise": name,
            "referenceTempoBpm": 100,
            "notes": [
                {"pitch": p, "onsetBeats": 0.5 * i, "durationBeats": 0.45}
                for i, p in enumerate(pitches)
            ],
        }
    )


def _riff_score(name: str) -> ReferenceScore:
    pitches = [45, 48, 50, 45, 52, 50, 48, 45]
    return score_from_dict(
        {
            "exercise": name,
            "referenceTempoBpm": 100,
            "notes": [
                {"pitch": p, "onsetBeats": 0.5 * i, "durationBeats": 0.45}
                for i, p in enumerate(pitches)
            ],
        }
    )


def demo_generator_spec(seed: int = 19) -> GeneratorSpec:
    """The bundled demo population: an improving student, a low-string player
    vs a high-string player, and a single far-out stylist."""
    # Alice and bob overlap on string 3 (the gray "both played" cells) while
    # strings 5 and 6 stay alice-only and eve plays far up the neck.
    low = Region(strings=(3, 4, 5, 6), fret_lo=5, fret_hi=8)
    high = Region(strings=(1, 2, 3), fret_lo=5, fret_hi=8)
    far = Region(strings=(1, 2), fret_lo=15, fret_hi=19)
    no_scores = {"pentatonic-box": 0, "pentatonic-box-fast": 0, "blues-riff": 0}
    return GeneratorSpec(
        seed=seed,
        players=(
            PlayerSpec("alice", 0.045, (low,)),
            PlayerSpec("bob", 0.030, (high,)),
            PlayerSpec("eve", 0.030, (far,), sessions_override={**no_scores, "blues-improv": 1}),
        ),
        exercises=(
            ExerciseSpec(
                name="pentatonic-box",
                kind=ExerciseKind.SCALE_PATTERN,
                sessions=2,
                score=_pentatonic_box_score("pentatonic-box"),
                repetitions_per_session=4,
                problem_note=6,
            ),
            ExerciseSpec(
                name="pentatonic-box-fast",
                kind=ExerciseKind.SCALE_PATTERN,
                sessions=1,
                score=_pentatonic_box_score("pentatonic-box-fast"),
                repetitions_per_session=2,
                tempo_factor=(11, 10),
                problem_note=6,
            ),
            ExerciseSpec(
                name="blues-riff",
                kind=ExerciseKind.RIFF,
                sessions=1,
                score=_riff_score("blues-riff"),
                repetitions_per_session=2,
                problem_note=3,
            ),
            ExerciseSpec(
                name="blues-improv",
                kind=ExerciseKind.IMPROVISATION,
                sessions=5,
                note_count=64,
                long_blue_note={"player": "bob", "session": 4, "durationSeconds": 1.5},
            ),
        ),
    )


def build_demo_catalog(out_dir: str | Path, seed: int = 19) -> Catalog:
    return generate_catalog(demo_generator_spec(seed), out_dir)
