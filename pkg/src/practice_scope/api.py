"""HTTP JSON/SVG API over a catalog.

Thin adapter: every viz response is byte-identical to the corresponding
pipeline + render call. Read endpoints never mutate the catalog; responses
for unchanged content are cached by (endpoint, params, content digests).
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import pipeline, render
from .alignment import FitMode
from .catalog import (
    BadRequestError,
    Catalog,
    CatalogError,
    RecordingMeta,
    parse_timestamp,
)
from .midi import ExerciseKind
from .score import score_to_dict
from .theory import scale_spec_to_dict

_STATUS = {
    "notFound": 404,
    "badRequest": 400,
    "conflict": 409,
    "parseFailure": 422,
    "internal": 500,
}

SVG_MEDIA_TYPE = "image/svg+xml"


def _error_response(code: str, message: str, detail=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=_STATUS.get(code, 500), content=body)


def _json_bytes(payload: dict) -> Response:
    return Response(content=pipeline.canonical_json(payload), media_type="application/json")


def _fit(value: str | None) -> FitMode:
    if value is None:
        return FitMode.AFFINE
    try:
        return FitMode(value)
    except ValueError:
        raise BadRequestError(f"fit must be one of none|offset|affine, got {value!r}") from None


def create_app(catalog: Catalog, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="practice-scope", docs_url=None, redoc_url=None)
    viz_cache: dict[tuple, bytes] = {}

    @app.exception_handler(CatalogError)
    async def on_catalog_error(_request: Request, exc: CatalogError):
        return _error_response(exc.code, str(exc), exc.detail)

    @app.exception_handler(Exception)
    async def on_internal_error(_request: Request, exc: Exception):
        return _error_response("internal", f"{type(exc).__name__}: {exc}")

    def cached_svg(key_parts: tuple, rids: list[str], build) -> Response:
        key = key_parts + (catalog.content_digests(rids),)
        if key not in viz_cache:
            viz_cache[key] = build().encode("utf-8")
        return Response(content=viz_cache[key], media_type=SVG_MEDIA_TYPE)

    # -- catalog endpoints ---------------------------------------------------

    @app.get("/api/players")
    def players():
        return _json_bytes({"players": catalog.players()})

    @app.get("/api/exercises")
    def exercises():
        return _json_bytes({"exercises": catalog.exercises()})

    @app.get("/api/recordings")
    def recordings(
        player: str | None = None,
        exercise: str | None = None,
        since: str | None = None,
        until: str | None = None,
    ):
        summaries = catalog.query_recordings(
            player=player,
            exercise=exercise,
            since=parse_timestamp(since) if since else None,
            until=parse_timestamp(until) if until else None,
        )
        return _json_bytes({"recordings": [s.to_json_dict() for s in summaries]})

    @app.get("/api/scores/{exercise}")
    def get_score(exercise: str):
        return _json_bytes(score_to_dict(catalog.get_score(exercise)))

    @app.post("/api/recordings")
    async def post_recording(file: UploadFile = File(...), meta: str = Form(...)):
        try:
            doc = json.loads(meta)
            parsed_meta = RecordingMeta(
                player=doc["player"],
                exercise=doc["exercise"],
                recorded_at=parse_timestamp(doc["recordedAt"]),
                exercise_kind=ExerciseKind(doc.get("exerciseKind", "riff")),
            )
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise BadRequestError(f"malformed meta JSON: {exc}") from exc
        cm = doc.get("channelMap")
        channel_map = {int(k): int(v) for k, v in cm.items()} if cm else None
        rid = catalog.ingest_recording(await file.read(), parsed_meta, channel_map)
        viz_cache.clear()
        return JSONResponse(status_code=201, content={"id": rid})

    # -- visualization endpoints ----------------------------------------------

    @app.get("/api/viz/progress")
    def viz_progress(
        recording: str | None = None,
        player: str | None = None,
        exercise: str | None = None,
        fit: str | None = None,
        format: str = "svg",
    ):
        fit_mode = _fit(fit)
        if recording is not None:
            rids = [recording]
            matrix = pipeline.progress_for_recording(catalog, recording, fit_mode)
        elif player is not None and exercise is not None:
            rids = [s.id for s in catalog.query_recordings(player=player, exercise=exercise)]
            matrix = pipeline.progress_for_player(catalog, player, exercise, fit_mode)
        else:
            raise BadRequestError("progress needs recording= or player=&exercise=")
        if format == "json":
            return _json_bytes(matrix.to_json_dict())
        return cached_svg(
            ("progress", recording, player, exercise, fit_mode.value),
            rids,
            lambda: render.render_progress_heatmap(matrix),
        )

    @app.get("/api/viz/fretboard")
    def viz_fretboard(
        recording: str | None = None,
        player: str | None = None,
        exercise: str | None = None,
        format: str = "svg",
    ):
        if recording is not None:
            rids = [recording]
            grid = pipeline.grid_for_recording(catalog, recording)
        elif player is not None and exercise is not None:
            rids = [s.id for s in catalog.query_recordings(player=player, exercise=exercise)]
            grid = pipeline.grid_for_player(catalog, player, exercise)
        else:
            raise BadRequestError("fretboard needs recording= or player=&exercise=")
        if format == "json":
            return _json_bytes(grid.to_json_dict())
        return cached_svg(
            ("fretboard", recording, player, exercise),
            rids,
            lambda: render.render_fretboard(grid),
        )

    @app.get("/api/viz/compare")
    def viz_compare(
        playerA: str | None = None,
        playerB: str | None = None,
        exercise: str | None = None,
        format: str = "svg",
    ):
        if not (playerA and playerB and exercise):
            raise BadRequestError("compare needs playerA=&playerB=&exercise=")
        grid = pipeline.compare_players(catalog, playerA, playerB, exercise)
        rids = [
            s.id
            for p in (playerA, playerB)
            for s in catalog.query_recordings(player=p, exercise=exercise)
        ]
        if format == "json":
            return _json_bytes(grid.to_json_dict())
        return cached_svg(
            ("compare", playerA, playerB, exercise),
            rids,
            lambda: render.render_fretboard(grid),
        )

    @app.get("/api/viz/similarity")
    def viz_similarity(exercise: str | None = None, format: str = "svg"):
        if not exercise:
            raise BadRequestError("similarity needs exercise=")
        layout, grids, rids = pipeline.similarity_for_exercise(catalog, exercise)
        if format == "json":
            return _json_bytes(
                {
                    "layout": layout.to_json_dict(),
                    "recordings": rids,
                    "exercise": exercise,
                }
            )
        return cached_svg(
            ("similarity", exercise),
            rids,
            lambda: render.render_similarity_map(layout, grids),
        )

    @app.get("/api/viz/roles")
    def viz_roles(
        exercise: str | None = None,
        players: str | None = None,
        scale: str | None = None,
        format: str = "svg",
    ):
        if not exercise:
            raise BadRequestError("roles needs exercise=")
        spec = pipeline.resolve_scale(scale)
        player_list = players.split(",") if players else None
        sequences = pipeline.roles_for_exercise(catalog, exercise, player_list, spec)
        summaries = catalog.query_recordings(exercise=exercise)
        if player_list:
            summaries = [s for s in summaries if s.meta.player in player_list]
        rids = [s.id for s in summaries]
        if format == "json":
            return _json_bytes(
                {
                    "scale": scale_spec_to_dict(spec),
                    "sequences": [seq.to_json_dict() for seq in sequences],
                }
            )
        return cached_svg(
            ("roles", exercise, players, scale),
            rids,
            lambda: render.render_role_sequence(sequences, spec),
        )

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="app")

    return app
