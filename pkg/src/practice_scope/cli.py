"""Command-line entry points: ingest, list, render, compare, serve, demo.

The catalog root comes from --root or the PRACTICE_SCOPE_ROOT environment
variable.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import pipeline, render
from .catalog import Catalog, CatalogError, RecordingMeta, parse_timestamp
from .midi import ExerciseKind
from .sample_data import build_demo_catalog, generate_catalog, load_generator_spec

_KIND_ALIASES = {
    "scale": ExerciseKind.SCALE_PATTERN,
    "riff": ExerciseKind.RIFF,
    "improv": ExerciseKind.IMPROVISATION,
}


def _open_catalog(root: str | None) -> Catalog:
    if root is None:
        raise click.UsageError(
            "no catalog root: pass --root or set PRACTICE_SCOPE_ROOT"
        )
    return Catalog(root, create=True)


@click.group()
@click.option(
    "--root",
    envvar="PRACTICE_SCOPE_ROOT",
    type=click.Path(file_okay=False),
    help="Catalog root directory (env: PRACTICE_SCOPE_ROOT).",
)
@click.pass_context
def main(ctx: click.Context, root: str | None) -> None:
    """Practice analytics for MIDI instrument recordings."""
    ctx.obj = root


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--player", required=True)
@click.option("--exercise", required=True)
@click.option("--recorded-at", required=True, help="UTC timestamp, e.g. 2026-01-05T10:00:00Z")
@click.option("--kind", type=click.Choice(sorted(_KIND_ALIASES)), default="riff")
@click.pass_obj
def ingest(root: str | None, file: str, player: str, exercise: str,
           recorded_at: str, kind: str) -> None:
    """Add one MIDI recording to the catalog."""
    catalog = _open_catalog(root)
    meta = RecordingMeta(
        player=player,
        exercise=exercise,
        recorded_at=parse_timestamp(recorded_at),
        exercise_kind=_KIND_ALIASES[kind],
    )
    try:
        rid = catalog.ingest_recording(Path(file).read_bytes(), meta)
    except CatalogError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(rid)


@main.command(name="list")
@click.option("--player")
@click.option("--exercise")
@click.pass_obj
def list_recordings(root: str | None, player: str | None, exercise: str | None) -> None:
    """List recordings, chronologically."""
    catalog = _open_catalog(root)
    for s in catalog.query_recordings(player=player, exercise=exercise):
        meta = s.meta
        click.echo(
            f"{s.id}  {meta.recorded_at:%Y-%m-%dT%H:%M:%SZ}  {meta.player:<12} "
            f"{meta.exercise:<20} {meta.exercise_kind.value:<13} {s.note_count:>5} notes"
        )


def _write_svg(svg: str, out: str) -> None:
    Path(out).write_bytes(svg.encode("utf-8"))
    click.echo(f"wrote {out}")


@main.command(name="render")
@click.argument("viz", type=click.Choice(["progress", "fretboard", "compare", "similarity", "roles"]))
@click.option("--recording")
@click.option("--player")
@click.option("--player-b", help="Second player (compare).")
@click.option("--exercise")
@click.option("--fit", type=click.Choice(["none", "offset", "affine"]), default="affine")
@click.option("--scale", help="Scale spec name for the roles view.")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def render_cmd(root: str | None, viz: str, recording: str | None, player: str | None,
               player_b: str | None, exercise: str | None, fit: str,
               scale: str | None, out: str) -> None:
    """Render one visualization to an SVG file."""
    catalog = _open_catalog(root)
    try:
        if viz == "progress":
            if recording:
                matrix = pipeline.progress_for_recording(catalog, recording, fit)
            elif player and exercise:
                matrix = pipeline.progress_for_player(catalog, player, exercise, fit)
            else:
                raise click.UsageError("progress needs --recording or --player and --exercise")
            svg = render.render_progress_heatmap(matrix)
        elif viz == "fretboard":
            if recording:
                grid = pipeline.grid_for_recording(catalog, recording)
            elif player and exercise:
                grid = pipeline.grid_for_player(catalog, player, exercise)
            else:
                raise click.UsageError("fretboard needs --recording or --player and --exercise")
            svg = render.render_fretboard(grid)
        elif viz == "compare":
            if not (player and player_b and exercise):
                raise click.UsageError("compare needs --player, --player-b, and --exercise")
            svg = render.render_fretboard(pipeline.compare_players(catalog, player, player_b, exercise))
        elif viz == "similarity":
            if not exercise:
                raise click.UsageError("similarity needs --exercise")
            layout, grids, _ = pipeline.similarity_for_exercise(catalog, exercise)
            svg = render.render_similarity_map(layout, grids)
        else:
            if not exercise:
                raise click.UsageError("roles needs --exercise")
            spec = pipeline.resolve_scale(scale)
            players = [player] if player else None
            svg = render.render_role_sequence(
                pipeline.roles_for_exercise(catalog, exercise, players, spec), spec
            )
    except CatalogError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    _write_svg(svg, out)


@main.command()
@click.option("--a", "player_a", required=True, help="Player A (red).")
@click.option("--b", "player_b", required=True, help="Player B (blue).")
@click.option("--exercise", required=True)
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def compare(root: str | None, player_a: str, player_b: str, exercise: str, out: str) -> None:
    """Render a two-player fretboard comparison."""
    catalog = _open_catalog(root)
    try:
        grid = pipeline.compare_players(catalog, player_a, player_b, exercise)
    except CatalogError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    _write_svg(render.render_fretboard(grid), out)


@main.command()
@click.option("--bind", default="127.0.0.1:8000", help="host:port to listen on.")
@click.option(
    "--frontend",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory of dashboard static files to serve at /.",
)
@click.pass_obj
def serve(root: str | None, bind: str, frontend: str | None) -> None:
    """Serve the JSON/SVG API (and optionally the dashboard) over HTTP."""
    import uvicorn

    from .api import create_app

    catalog = _open_catalog(root)
    host, _, port = bind.partition(":")
    app = create_app(catalog, frontend_dir=frontend)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
              help="Generator spec JSON; defaults to the bundled demo population.")
@click.option("--seed", type=int, default=19, show_default=True)
def demo(out: str, spec_path: str | None, seed: int) -> None:
    """Generate a deterministic demo catalog."""
    try:
        if spec_path:
            catalog = generate_catalog(load_generator_spec(spec_path), out)
        else:
            catalog = build_demo_catalog(out, seed)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"demo catalog at {catalog.root} "
               f"({len(catalog.query_recordings())} recordings)")


if __name__ == "__main__":
    sys.exit(main())
