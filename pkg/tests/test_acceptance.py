"""Acceptance criteria, one test per criterion.

Each test prints a PASS line with its runtime (visible under ``pytest -s``)
and enforces the stated runtime budget and tolerances. Run with:

    pytest tests/test_acceptance.py -v -s
"""

from __future__ import annotations

import json
import math
import random
import time
import xml.etree.ElementTree as ET
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from practice_scope import midi, pipeline, render
from practice_scope.alignment import align_notes, fit_time_map, segment_repetitions
from practice_scope.api import create_app
from practice_scope.catalog import Catalog, parse_timestamp
from practice_scope.heatmaps import FretboardGrid
from practice_scope.midi import ExerciseKind, NoteEvent, RecordingMeta
from practice_scope.render import RenderOptions, resolve_clamp
from practice_scope.score import score_from_dict
from practice_scope.similarity import (
    DistanceMatrix,
    classical_mds,
    detect_outliers,
    distance_matrix,
    grid_shape,
    heatmap_distance,
    smacof,
    snap_to_grid,
)
from practice_scope.smf_write import NoteSpec, write_smf
from practice_scope.theory import (
    A_MINOR_PENTATONIC_BLUES,
    NoteRole,
    RoleSequence,
    RoleSpan,
    classify_note,
    role_duration_shares,
    role_sequence,
)

from .oracles import brute_force_alignment_cost, brute_force_assignment_cost

SNAPSHOT_DIR = Path(__file__).parent / "snapshots"
SVG_NS = "{http://www.w3.org/2000/svg}"


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    print(f"PASS criterion {number}: {description} ({elapsed:.2f}s)")
    assert elapsed < budget_seconds, (
        f"criterion {number} took {elapsed:.2f}s, budget {budget_seconds}s"
    )


def svg_cells(root: ET.Element) -> list[ET.Element]:
    return [el for el in root.iter() if el.get("class") == "cell"]


# -- 1. SMF round-trip --------------------------------------------------------------


def test_criterion_01_smf_roundtrip():
    from .oracles import drop_same_key_overlaps

    with criterion(1, "SMF round-trip, 500 random note lists, tick-exact", 5.0):
        rng = random.Random(20260101)
        for trial in range(500):
            n = rng.randint(1, 30)
            specs = []
            for _ in range(n):
                on = rng.randint(0, 30_000)
                specs.append(
                    NoteSpec(
                        pitch=rng.randint(0, 127),
                        velocity=rng.randint(1, 127),
                        channel=rng.randint(0, 15),
                        on_tick=on,
                        off_tick=on + rng.randint(1, 2_000),
                    )
                )
            # simultaneous same-pitch same-channel notes have no byte-level
            # identity in SMF; the round-trip domain excludes them
            specs = drop_same_key_overlaps(specs)
            data = write_smf(specs, fmt=trial % 2)
            _, events = midi.parse_smf(data)
            paired, diagnostics = midi.pair_note_ticks(events)
            assert diagnostics.orphan_note_offs == 0
            assert diagnostics.zero_duration_notes == 0
            got = sorted((t.on_tick, t.off_tick, t.pitch, t.velocity, t.channel)
                         for t in paired)
            want = sorted((s.on_tick, s.off_tick, s.pitch, s.velocity, s.channel)
                          for s in specs)
            assert got == want


# -- 2. alignment oracle -------------------------------------------------------------


def test_criterion_02_alignment_brute_force_equivalence():
    with criterion(2, "alignment cost equals brute force, 1000 pairs", 30.0):
        rng = random.Random(20260102)
        pitches = [57, 60, 62, 64, 67]
        for _ in range(1000):
            ref = [rng.choice(pitches) for _ in range(rng.randint(1, 8))]
            rec = [rng.choice(pitches) for _ in range(rng.randint(0, 8))]
            score = score_from_dict(
                {
                    "exercise": "x",
                    "referenceTempoBpm": 120,
                    "notes": [
                        {"pitch": p, "onsetBeats": float(i), "durationBeats": 0.9}
                        for i, p in enumerate(ref)
                    ],
                }
            )
            notes = [
                NoteEvent(pitch=p, onset_seconds=0.5 * i, duration_seconds=0.4,
                          velocity=90, channel=0)
                for i, p in enumerate(rec)
            ]
            assert align_notes(notes, score).cost == brute_force_alignment_cost(ref, rec)


# -- 3. deviation recovery --------------------------------------------------------------


def test_criterion_03_deviation_recovery(demo_catalog):
    with criterion(3, "offset-mode deviation recovery and affine tempo recovery", 5.0):
        # Offset mode: injected deviations are orthogonal to the constant
        # regressor, so the fit is exact; truth files are the oracle.
        checked = 0
        for summary in demo_catalog.query_recordings(exercise="pentatonic-box"):
            truth = json.loads(
                (demo_catalog.root / demo_catalog.entry(summary.id).path)
                .with_suffix(".truth.json").read_text()
            )
            matrix = pipeline.progress_for_recording(demo_catalog, summary.id, "offset")
            per_recording = len(truth["segments"])
            for col, seg in enumerate(truth["segments"]):
                got = matrix.deviations[:, col]
                want = np.asarray(seg["deviationsSeconds"])
                assert np.abs(got - want).max() < 1e-6
                checked += 1
            assert matrix.deviations.shape[1] == per_recording
        assert checked >= 8

        # Affine on 1.1x-tempo data: recovered slope within 1e-6 of truth.
        fast = demo_catalog.query_recordings(exercise="pentatonic-box-fast")
        assert fast
        for summary in fast:
            truth = json.loads(
                (demo_catalog.root / demo_catalog.entry(summary.id).path)
                .with_suffix(".truth.json").read_text()
            )
            recording = demo_catalog.load_recording(summary.id)
            score = demo_catalog.get_score("pentatonic-box-fast")
            for segment in segment_repetitions(list(recording.notes), score, summary.id):
                alignment = align_notes(list(segment.notes), score)
                tm = fit_time_map(alignment, score, "affine", segment.start_seconds)
                assert abs(tm.seconds_per_beat - truth["secondsPerBeat"]) < 1e-6


# -- 4. segmentation ---------------------------------------------------------------------


def test_criterion_04_repetition_segmentation():
    with criterion(4, "k = 1..5 exact copies yield k fully matched segments", 2.0):
        score = score_from_dict(
            {
                "exercise": "x",
                "referenceTempoBpm": 120,
                "notes": [
                    {"pitch": p, "onsetBeats": 0.5 * i, "durationBeats": 0.4}
                    for i, p in enumerate([60, 62, 64, 65, 67, 69])
                ],
            }
        )
        for k in range(1, 6):
            notes = []
            t = 0.0
            for _ in range(k):
                for n in score.notes:
                    notes.append(
                        NoteEvent(pitch=n.pitch, onset_seconds=t, duration_seconds=0.2,
                                  velocity=90, channel=0)
                    )
                    t += 0.25
                t += 1.0
            segments = segment_repetitions(notes, score, "r")
            assert len(segments) == k
            for seg in segments:
                assert align_notes(list(seg.notes), score).match_count == len(score.notes)


# -- 5. MDS exactness --------------------------------------------------------------------


def test_criterion_05_mds_exactness():
    with criterion(5, "MDS reproduces planar distances; SMACOF stress non-increasing", 10.0):
        rng = np.random.default_rng(20260105)
        for _ in range(8):
            pts = rng.uniform(0, 10, size=(8, 2))
            d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
            dm = DistanceMatrix(d)
            embedded, stress, trace = smacof(dm, classical_mds(dm))
            got = np.linalg.norm(embedded[:, None, :] - embedded[None, :, :], axis=2)
            assert np.abs(got - d).max() < 1e-9
            assert stress < 1e-9
            assert all(b <= a + 1e-15 for a, b in zip(trace, trace[1:]))
        for _ in range(100):
            hi_d = rng.uniform(0, 1, size=(7, 5))
            d = np.linalg.norm(hi_d[:, None, :] - hi_d[None, :, :], axis=2)
            dm = DistanceMatrix(d)
            _, _, trace = smacof(dm, classical_mds(dm))
            assert all(b <= a + 1e-15 for a, b in zip(trace, trace[1:]))


# -- 6. grid snapping ---------------------------------------------------------------------


def test_criterion_06_grid_snapping_optimality():
    with criterion(6, "snap-to-grid cost equals factorial brute force, 200 trials", 10.0):
        rng = random.Random(20260106)
        for _ in range(200):
            n = rng.randint(1, 6)
            pts = np.array([[rng.uniform(-3, 3), rng.uniform(-3, 3)] for _ in range(n)])
            rows, cols = grid_shape(n)
            cells = snap_to_grid(pts)
            scaled = np.empty_like(pts)
            for axis, extent in ((0, cols), (1, rows)):
                lo, hi = pts[:, axis].min(), pts[:, axis].max()
                scaled[:, axis] = (
                    (pts[:, axis] - lo) / (hi - lo) * extent if hi > lo else extent / 2.0
                )
            centers = [(c + 0.5, r + 0.5) for r in range(rows) for c in range(cols)]
            got = math.fsum(
                (scaled[i][0] - centers[r * cols + c][0]) ** 2
                + (scaled[i][1] - centers[r * cols + c][1]) ** 2
                for i, (r, c) in enumerate(cells)
            )
            best = brute_force_assignment_cost([tuple(p) for p in scaled], centers)
            assert got == pytest.approx(best, abs=1e-12)


# -- 7. outlier detection ---------------------------------------------------------------------


def test_criterion_07_outlier_detection():
    with criterion(7, "9-cluster-plus-far flags exactly the far grid; equidistant flags none", 1.0):
        base = np.zeros((6, 23), dtype=np.int64)
        base[0, 0] = base[1, 1] = base[2, 2] = 10
        grids = []
        for i in range(9):
            counts = base.copy()
            counts[3, 3 + i] = 1  # small unique perturbation per grid
            grids.append(FretboardGrid(counts=counts, total_notes=int(counts.sum()),
                                       unmapped_notes=0))
        far = np.zeros((6, 23), dtype=np.int64)
        far[5, 20] = 10
        grids.append(FretboardGrid(counts=far, total_notes=10, unmapped_notes=0))

        dm = distance_matrix(grids)
        cluster = dm.d[:9, :9]
        diameter = cluster.max()
        assert dm.d[9, :9].min() >= 10 * diameter
        assert detect_outliers(dm, k=3) == [False] * 9 + [True]

        equal = DistanceMatrix(np.ones((8, 8)) - np.eye(8))
        assert detect_outliers(equal, k=3) == [False] * 8


# -- 8. distance metric properties ----------------------------------------------------------------


def test_criterion_08_distance_metric_properties():
    with criterion(8, "metric + scale-invariance on 1000 random grid triples", 5.0):
        rng = np.random.default_rng(20260108)

        def random_grid():
            counts = rng.integers(0, 6, size=(3, 5))
            return FretboardGrid(counts=counts, total_notes=int(counts.sum()),
                                 unmapped_notes=0)

        for _ in range(1000):
            a, b, c = random_grid(), random_grid(), random_grid()
            dab, dba = heatmap_distance(a, b), heatmap_distance(b, a)
            assert dab >= 0
            assert abs(dab - dba) < 1e-12
            ta, tb = a.counts.sum(), b.counts.sum()
            na = a.counts / ta if ta else a.counts
            nb = b.counts / tb if tb else b.counts
            if np.array_equal(na, nb):
                assert dab < 1e-12
            else:
                assert dab > 0
            assert dab <= heatmap_distance(a, c) + heatmap_distance(c, b) + 1e-12
            factor = int(rng.integers(1, 9))
            scaled = FretboardGrid(counts=a.counts * factor,
                                   total_notes=int(a.counts.sum()) * factor,
                                   unmapped_notes=0)
            assert abs(heatmap_distance(scaled, b) - dab) < 1e-12


# -- 9. theory totality and shares ------------------------------------------------------------------


def test_criterion_09_theory_totality_and_shares():
    with criterion(9, "role partition, share normalization, long-blue-note share 0.15", 1.0):
        spec = A_MINOR_PENTATONIC_BLUES
        buckets = {role: set() for role in NoteRole}
        for pc in range(12):
            buckets[classify_note(pc, spec)].add(pc)
        assert sorted(len(v) for v in buckets.values()) == [1, 1, 4, 6]
        assert set().union(*buckets.values()) == set(range(12))

        rng = random.Random(20260109)
        for _ in range(200):
            spans = tuple(
                RoleSpan(
                    start_seconds=i * 0.1,
                    duration_seconds=rng.uniform(0.05, 2.0),
                    role=classify_note(rng.randint(0, 127), spec),
                    pitch=60,
                )
                for i in range(rng.randint(1, 25))
            )
            shares = role_duration_shares(RoleSequence("r", spans))
            assert abs(sum(shares.values()) - 1.0) <= 1e-12

        fixture = RoleSequence(
            "long-blue-take",
            (
                RoleSpan(0.0, 4.25, NoteRole.ROOT, 57),
                RoleSpan(4.25, 1.5, NoteRole.BLUE_NOTE, 63),
                RoleSpan(5.75, 4.25, NoteRole.SCALE_TONE, 60),
            ),
        )
        assert role_duration_shares(fixture)[NoteRole.BLUE_NOTE] == 0.15


# -- 10. render determinism and snapshots --------------------------------------------------------------


def demo_svgs(catalog) -> dict[str, str]:
    layout, grids, _ = pipeline.similarity_for_exercise(catalog, "blues-improv")
    scale = pipeline.resolve_scale(None)
    return {
        "progress": render.render_progress_heatmap(
            pipeline.progress_for_player(catalog, "alice", "pentatonic-box")
        ),
        "compare": render.render_fretboard(
            pipeline.compare_players(catalog, "alice", "bob", "blues-improv")
        ),
        "similarity": render.render_similarity_map(layout, grids),
        "roles": render.render_role_sequence(
            pipeline.roles_for_exercise(catalog, "blues-improv"), scale
        ),
    }


def test_criterion_10_render_determinism_and_snapshots(demo_catalog):
    with criterion(10, "byte-identical re-renders; checked-in snapshots match", 5.0):
        first = demo_svgs(demo_catalog)
        second = demo_svgs(demo_catalog)
        assert first == second
        for name, svg in first.items():
            snapshot = SNAPSHOT_DIR / f"{name}.svg"
            assert snapshot.exists(), f"missing snapshot {snapshot}"
            assert svg.encode("utf-8") == snapshot.read_bytes(), f"snapshot drift: {name}"


# -- 11. service contract ------------------------------------------------------------------------------


def test_criterion_11_service_contract(demo_catalog, tmp_path, monkeypatch):
    from fastapi.testclient import TestClient

    with criterion(11, "API byte-equality and 100 crash injections", 30.0):
        client = TestClient(create_app(demo_catalog))
        rid = demo_catalog.query_recordings(player="bob", exercise="blues-improv")[0].id
        layout, grids, _ = pipeline.similarity_for_exercise(demo_catalog, "blues-improv")
        scale = pipeline.resolve_scale(None)
        cases = [
            (
                "/api/viz/progress",
                {"player": "alice", "exercise": "pentatonic-box"},
                render.render_progress_heatmap(
                    pipeline.progress_for_player(demo_catalog, "alice", "pentatonic-box")
                ),
            ),
            (
                "/api/viz/fretboard",
                {"recording": rid},
                render.render_fretboard(pipeline.grid_for_recording(demo_catalog, rid)),
            ),
            (
                "/api/viz/compare",
                {"playerA": "alice", "playerB": "bob", "exercise": "blues-improv"},
                render.render_fretboard(
                    pipeline.compare_players(demo_catalog, "alice", "bob", "blues-improv")
                ),
            ),
            (
                "/api/viz/similarity",
                {"exercise": "blues-improv"},
                render.render_similarity_map(layout, grids),
            ),
            (
                "/api/viz/roles",
                {"exercise": "blues-improv"},
                render.render_role_sequence(
                    pipeline.roles_for_exercise(demo_catalog, "blues-improv"), scale
                ),
            ),
        ]
        for url, params, expected in cases:
            response = client.get(url, params=params)
            assert response.status_code == 200
            assert response.content == expected.encode("utf-8"), url

        # Crash injection between file write and index publication.
        root = tmp_path / "crash-catalog"
        catalog = Catalog(root, create=True)
        seed_midi = write_smf([NoteSpec(60, 90, 0, 0, 480)])
        catalog.ingest_recording(
            seed_midi,
            RecordingMeta("keeper", "ex", parse_timestamp("2026-01-01T00:00:00Z"),
                          ExerciseKind.RIFF),
        )

        class Crash(RuntimeError):
            pass

        real_write = Catalog._write_index

        def boom(self):
            raise Crash()

        for i in range(100):
            monkeypatch.setattr(Catalog, "_write_index", boom)
            meta = RecordingMeta(
                "crasher", "ex",
                parse_timestamp(f"2026-02-{(i % 27) + 1:02d}T{i % 24:02d}:00:00Z"),
                ExerciseKind.RIFF,
            )
            with pytest.raises(Crash):
                catalog.ingest_recording(write_smf([NoteSpec(61, 90, 0, 0, 480)]), meta)
            monkeypatch.setattr(Catalog, "_write_index", real_write)
            reloaded = Catalog(root)
            reloaded.validate()  # no dangling entries, digests intact
            assert [s.meta.player for s in reloaded.query_recordings()] == ["keeper"]
            catalog = reloaded


# -- 12. end-to-end figure reproduction ------------------------------------------------------------------


def test_criterion_12_end_to_end_figures(demo_catalog):
    with criterion(12, "four demo SVGs structurally match the visualization designs", 10.0):
        svgs = demo_svgs(demo_catalog)
        roots = {name: ET.fromstring(svg) for name, svg in svgs.items()}

        # (a) improving student: column means strictly decrease, problem note persists
        matrix = pipeline.progress_for_player(demo_catalog, "alice", "pentatonic-box")
        means = np.nanmean(np.abs(matrix.deviations), axis=0)
        assert all(a > b for a, b in zip(means, means[1:]))
        clamp = resolve_clamp(matrix, RenderOptions())
        assert np.abs(matrix.deviations[6]).min() > clamp / 2
        cells = svg_cells(roots["progress"])
        assert len(cells) == matrix.rows * matrix.cols

        # (b) red/blue/gray comparison with alice-only cells on the low strings
        only_a = [
            c for c in svg_cells(roots["compare"]) if c.get("fill") == "#d6604d"
        ]
        assert {"5", "6"} <= {c.get("data-string") for c in only_a}
        fills = {c.get("fill") for c in svg_cells(roots["compare"])}
        assert {"#d6604d", "#4393c3", "#888888"} <= fills

        # (c) similarity grid: seeded outlier ringed and called out
        layout, _, rids = pipeline.similarity_for_exercise(demo_catalog, "blues-improv")
        flagged = [rids[i] for i, f in enumerate(layout.outlier_flags) if f]
        eve = [s.id for s in demo_catalog.query_recordings(player="eve")]
        assert flagged == eve
        assert svgs["similarity"].count('class="outlier-ring"') == 1
        assert svgs["similarity"].count('class="outlier-zoom"') == 1

        # (d) the seeded long blue note is the longest blue span, bottom row
        blue_rects = [
            c for c in svg_cells(roots["roles"]) if c.get("data-role") == "blueNote"
        ]
        assert blue_rects
        widest = max(blue_rects, key=lambda c: float(c.get("width")))
        rows = [int(c.get("data-row")) for c in svg_cells(roots["roles"])]
        assert int(widest.get("data-row")) == max(rows)
        sequences = pipeline.roles_for_exercise(demo_catalog, "blues-improv")
        longest = max(
            (s for seq in sequences for s in seq.spans if s.role is NoteRole.BLUE_NOTE),
            key=lambda s: s.duration_seconds,
        )
        assert longest.duration_seconds == pytest.approx(1.5, abs=1e-9)
