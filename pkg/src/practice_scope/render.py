"""Deterministic SVG renderers for the four practice-analytics views.

Every renderer is a pure function from data to a standalone SVG 1.1 document:
no timestamps, no randomness, numeric attributes at exactly two decimals,
colors as lowercase hex. Identical inputs yield byte-identical output, which
the snapshot tests rely on.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .heatmaps import CellCategory, ComparisonGrid, FretboardGrid, ProgressMatrix
from .similarity import Layout2D, grid_shape
from .theory import PITCH_CLASS_NAMES, NoteRole, RoleSequence, ScaleSpec

#: Diverging deviation palette and categorical colors (ColorBrewer RdBu family).
EARLY_COLOR = "#2166ac"
NEUTRAL_COLOR = "#ffffff"
LATE_COLOR = "#b2182b"
MISS_COLOR = "#404040"
COUNT_COLOR = "#b2182b"
ONLY_A_COLOR = "#d6604d"
ONLY_B_COLOR = "#4393c3"
BOTH_COLOR = "#888888"
ROLE_COLORS = {
    NoteRole.ROOT: "#1b7837",
    NoteRole.SCALE_TONE: "#7fbf7b",
    NoteRole.BLUE_NOTE: "#2166ac",
    NoteRole.OUTSIDE: "#999999",
}

TEXT_COLOR = "#333333"
GRID_LINE_COLOR = "#cccccc"
OUTLIER_RING_COLOR = "#b2182b"

#: Standard single-dot fret markers; fret 12 gets a double dot.
FRET_MARKERS = (3, 5, 7, 9, 12, 15, 17, 19, 21)

#: Hue span for per-fret glyph coloring, capped short of a full wheel so the
#: lowest and highest frets stay distinguishable.
GLYPH_HUE_SPAN_DEGREES = 300.0

MIN_AUTO_CLAMP_SECONDS = 0.05
AUTO_CLAMP_PERCENTILE = 95


@dataclass(frozen=True)
class RenderOptions:
    cell_size_px: int = 14
    color_clamp_seconds: float | str = "auto"
    show_fret_markers: bool = True
    row_width_px: int = 500


def _f(x: float) -> str:
    return f"{x:.2f}"


def _parse_hex(color: str) -> tuple[int, int, int]:
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


def lerp_color(color_a: str, color_b: str, t: float) -> str:
    """Linear RGB interpolation at t in [0, 1], rounded per channel."""
    a, b = _parse_hex(color_a), _parse_hex(color_b)
    rgb = tuple(round(ca + (cb - ca) * t) for ca, cb in zip(a, b))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def deviation_color(deviation: float, clamp: float) -> str:
    """Diverging blue→white→red over deviations clamped to ±clamp."""
    t = max(-1.0, min(1.0, deviation / clamp))
    if t < 0:
        return lerp_color(NEUTRAL_COLOR, EARLY_COLOR, -t)
    return lerp_color(NEUTRAL_COLOR, LATE_COLOR, t)


def hsv_color(hue_degrees: float, saturation: float, value: float) -> str:
    r, g, b = colorsys.hsv_to_rgb(hue_degrees / 360.0, saturation, value)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def resolve_clamp(matrix: ProgressMatrix, opts: RenderOptions) -> float:
    """Color clamp: explicit seconds, or the 95th percentile of |deviation|
    (never below the floor, so near-perfect takes don't amplify noise)."""
    if opts.color_clamp_seconds != "auto":
        return float(opts.color_clamp_seconds)
    defined = matrix.deviations[~np.isnan(matrix.deviations)]
    if defined.size == 0:
        return MIN_AUTO_CLAMP_SECONDS
    p = float(np.percentile(np.abs(defined), AUTO_CLAMP_PERCENTILE))
    return max(p, MIN_AUTO_CLAMP_SECONDS)


class _Svg:
    """Accumulates elements; emits a single-root document with fixed formatting."""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.parts: list[str] = []

    def rect(self, x: float, y: float, w: float, h: float, fill: str, **extra: str) -> None:
        attrs = "".join(
            f" {k.replace('_', '-')}={quoteattr(v)}" for k, v in extra.items()
        )
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}"'
            f' fill="{fill}"{attrs}/>'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float,
             stroke: str = GRID_LINE_COLOR, width: float = 1.0) -> None:
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}"'
            f' stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def circle(self, cx: float, cy: float, r: float, fill: str, **extra: str) -> None:
        attrs = "".join(
            f" {k.replace('_', '-')}={quoteattr(v)}" for k, v in extra.items()
        )
        self.parts.append(
            f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{fill}"{attrs}/>'
        )

    def text(self, x: float, y: float, content: str, size: float = 10.0,
             anchor: str = "start", fill: str = TEXT_COLOR) -> None:
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{_f(size)}"'
            f' font-family="sans-serif" text-anchor="{anchor}"'
            f' fill="{fill}">{escape(content)}</text>'
        )

    def open_group(self, **extra: str) -> None:
        attrs = "".join(
            f" {k.replace('_', '-')}={quoteattr(v)}" for k, v in extra.items()
        )
        self.parts.append(f"<g{attrs}>")

    def close_group(self) -> None:
        self.parts.append("</g>")

    def document(self) -> str:
        body = "".join(self.parts)
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1"'
            f' width="{_f(self.width)}" height="{_f(self.height)}"'
            f' viewBox="0 0 {_f(self.width)} {_f(self.height)}">{body}</svg>'
        )


def render_progress_heatmap(matrix: ProgressMatrix, opts: RenderOptions = RenderOptions()) -> str:
    """Notes × repetitions heatmap, blue = early, white = on time, red = late."""
    cell = opts.cell_size_px
    left, top, right, bottom = 40, 28, 10, 26
    rows, cols = matrix.rows, matrix.cols
    width = left + max(cols, 1) * cell + right
    height = top + rows * cell + bottom
    svg = _Svg(width, height)
    svg.text(left, 16, f"progress: {matrix.score_ref}", size=12.0)

    clamp = resolve_clamp(matrix, opts)
    for r in range(rows):
        for c in range(cols):
            v = matrix.deviations[r, c]
            fill = MISS_COLOR if np.isnan(v) else deviation_color(float(v), clamp)
            svg.rect(
                left + c * cell, top + r * cell, cell - 1, cell - 1, fill,
                **{"class": "cell", "data_ref": str(r), "data_rep": str(c)},
            )
    if cols == 0:
        svg.text(left + 4, top + 14, "no data", size=11.0)

    for r in range(0, rows, 5):
        svg.text(left - 4, top + r * cell + cell * 0.75, str(r), size=8.0, anchor="end")
    for c in range(0, cols, 5):
        svg.text(left + c * cell + cell * 0.5, height - bottom + 12, str(c),
                 size=8.0, anchor="middle")
    svg.text(left - 28, top + rows * cell * 0.5, "note", size=9.0)
    svg.text(left + max(cols, 1) * cell * 0.5, height - 6, "repetition",
             size=9.0, anchor="middle")
    return svg.document()


def _fretboard_cells(
    svg: _Svg, grid: FretboardGrid | ComparisonGrid, x0: float, y0: float, cell: float
) -> None:
    """Emit the data rects for one fretboard, row-major."""
    if isinstance(grid, ComparisonGrid):
        palette = {
            int(CellCategory.ONLY_A): ONLY_A_COLOR,
            int(CellCategory.ONLY_B): ONLY_B_COLOR,
            int(CellCategory.BOTH): BOTH_COLOR,
        }
        for s in range(grid.strings):
            for fret in range(grid.frets):
                code = int(grid.cells[s, fret])
                if code == int(CellCategory.NEITHER):
                    continue
                svg.rect(
                    x0 + fret * cell, y0 + s * cell, cell - 1, cell - 1, palette[code],
                    **{"class": "cell", "data_string": str(s + 1), "data_fret": str(fret)},
                )
    else:
        max_count = int(grid.counts.max()) if grid.counts.size else 0
        for s in range(grid.strings):
            for fret in range(grid.frets):
                count = int(grid.counts[s, fret])
                if count == 0:
                    continue
                svg.rect(
                    x0 + fret * cell, y0 + s * cell, cell - 1, cell - 1, COUNT_COLOR,
                    fill_opacity=_f(count / max_count),
                    **{
                        "class": "cell",
                        "data_string": str(s + 1),
                        "data_fret": str(fret),
                        "data_count": str(count),
                    },
                )


def _fretboard_frame(svg: _Svg, strings: int, frets: int, x0: float, y0: float,
                     cell: float, markers: bool) -> None:
    for s in range(strings):
        y = y0 + s * cell + cell / 2
        svg.line(x0, y, x0 + frets * cell, y, width=0.5)
    for fret in range(frets + 1):
        x = x0 + fret * cell
        svg.line(x, y0, x, y0 + strings * cell, width=1.5 if fret == 1 else 0.5)
    if markers:
        y = y0 + strings * cell + 7
        for fret in FRET_MARKERS:
            if fret >= frets:
                continue
            cx = x0 + fret * cell + cell / 2
            if fret == 12:
                svg.circle(cx - 3, y, 2.5, GRID_LINE_COLOR)
                svg.circle(cx + 3, y, 2.5, GRID_LINE_COLOR)
            else:
                svg.circle(cx, y, 2.5, GRID_LINE_COLOR)


def render_fretboard(
    grid: FretboardGrid | ComparisonGrid, opts: RenderOptions = RenderOptions()
) -> str:
    """Fretboard heatmap: strings as rows (string 1 on top), frets as columns.

    Count grids shade cells by count/max in one hue; comparison grids use the
    categorical only-A / only-B / both colors.
    """
    cell = opts.cell_size_px
    left, top, bottom = 26, 22, 20
    width = left + grid.frets * cell + 10
    height = top + grid.strings * cell + bottom
    svg = _Svg(width, height)

    _fretboard_cells(svg, grid, left, top, cell)
    _fretboard_frame(svg, grid.strings, grid.frets, left, top, cell,
                     opts.show_fret_markers)
    for s in range(grid.strings):
        svg.text(left - 4, top + s * cell + cell * 0.75, str(s + 1), size=8.0, anchor="end")
    for fret in range(0, grid.frets, 5):
        svg.text(left + fret * cell + cell / 2, top - 6, str(fret), size=8.0, anchor="middle")
    return svg.document()


def _glyph(svg: _Svg, grid: FretboardGrid, x0: float, y0: float, cell: float,
           global_max: int, index: int) -> None:
    """Miniature fretboard glyph: hue by fret, saturation by global note share."""
    svg.open_group(**{"class": "glyph", "data_recording": str(index)})
    hue_step = GLYPH_HUE_SPAN_DEGREES / grid.frets
    for s in range(grid.strings):
        for fret in range(grid.frets):
            count = int(grid.counts[s, fret])
            if count == 0:
                continue
            svg.rect(
                x0 + fret * cell, y0 + s * cell, cell, cell,
                hsv_color(fret * hue_step, count / global_max, 0.9),
                **{"class": "cell"},
            )
    svg.rect(x0, y0, grid.frets * cell, grid.strings * cell, "none",
             stroke=GRID_LINE_COLOR, stroke_width="0.50")
    svg.close_group()


def render_similarity_map(
    layout: Layout2D,
    grids: list[FretboardGrid],
    opts: RenderOptions = RenderOptions(),
) -> str:
    """Similarity-ordered glyph grid with outlier rings and a zoom callout.

    Each recording's miniature fretboard sits at its snapped grid cell; hue
    encodes the fret, saturation the play count normalized over all grids.
    The first outlier (if any) is enlarged above the grid.
    """
    if len(layout.grid_cells) != len(grids):
        raise ValueError("layout and grids must have equal length")
    n = len(grids)
    if n == 0:
        svg = _Svg(220, 60)
        svg.text(12, 34, "no data", size=12.0)
        return svg.document()

    strings = grids[0].strings
    frets = grids[0].frets
    gcell = 3.0
    zoom = 3.0
    glyph_w = frets * gcell
    glyph_h = strings * gcell
    pad = 18.0
    rows, cols = grid_shape(n)
    global_max = max((int(g.counts.max()) for g in grids), default=0)
    global_max = max(global_max, 1)

    first_outlier = next((i for i, f in enumerate(layout.outlier_flags) if f), None)
    callout_h = glyph_h * zoom + 30.0 if first_outlier is not None else 0.0
    width = pad + cols * (glyph_w + pad)
    height = callout_h + pad + rows * (glyph_h + pad)
    svg = _Svg(width, height)

    if first_outlier is not None:
        zx = (width - glyph_w * zoom) / 2
        svg.text(zx, 12, f"outlier: recording {first_outlier}", size=10.0)
        _zoom_glyph(svg, grids[first_outlier], zx, 18.0, gcell * zoom, global_max,
                    first_outlier)

    for i, (r, c) in enumerate(layout.grid_cells):
        x0 = pad + c * (glyph_w + pad)
        y0 = callout_h + pad + r * (glyph_h + pad)
        _glyph(svg, grids[i], x0, y0, gcell, global_max, i)
        if layout.outlier_flags[i]:
            svg.circle(
                x0 + glyph_w / 2, y0 + glyph_h / 2,
                math.hypot(glyph_w, glyph_h) / 2 + 4,
                "none", stroke=OUTLIER_RING_COLOR, stroke_width="2.00",
                **{"class": "outlier-ring"},
            )
    return svg.document()


def _zoom_glyph(svg: _Svg, grid: FretboardGrid, x: float, y: float, cell: float,
                global_max: int, index: int) -> None:
    svg.open_group(**{"class": "outlier-zoom"})
    _glyph(svg, grid, x, y, cell, global_max, index)
    svg.close_group()


def render_role_sequence(
    sequences: list[RoleSequence],
    spec: ScaleSpec,
    opts: RenderOptions = RenderOptions(),
) -> str:
    """Note-role rows: one line of rounded rectangles per recording, colored by
    role, on a shared absolute-time axis; legend maps roles to note names."""
    if not sequences:
        raise ValueError("need at least one role sequence")
    row_h = float(opts.cell_size_px)
    gap = 6.0
    left, top = 10.0, 16.0
    width = left + opts.row_width_px + 10.0
    legend_h = 18.0 * len(NoteRole) + 8.0
    height = top + len(sequences) * (row_h + gap) + legend_h

    max_end = max(
        (s.start_seconds + s.duration_seconds for seq in sequences for s in seq.spans),
        default=0.0,
    )
    scale = opts.row_width_px / max_end if max_end > 0 else 0.0

    svg = _Svg(width, height)
    for row, seq in enumerate(sequences):
        y = top + row * (row_h + gap)
        svg.open_group(**{"class": "role-row", "data_recording": seq.recording_id})
        for span in seq.spans:
            svg.rect(
                left + span.start_seconds * scale, y,
                max(span.duration_seconds * scale, 1.0), row_h,
                ROLE_COLORS[span.role], rx="3.00",
                **{
                    "class": "cell",
                    "data_role": span.role.value,
                    "data_pitch": str(span.pitch),
                    "data_row": str(row),
                },
            )
        svg.close_group()

    legend_y = top + len(sequences) * (row_h + gap) + 12.0
    scale_names = " ".join(
        PITCH_CLASS_NAMES[pc]
        for pc in sorted(spec.scale_pitch_classes)
        if pc != spec.root_pitch_class
    )
    blue_names = " ".join(PITCH_CLASS_NAMES[pc] for pc in sorted(spec.blue_pitch_classes))
    labels = {
        NoteRole.ROOT: f"root ({PITCH_CLASS_NAMES[spec.root_pitch_class]})",
        NoteRole.SCALE_TONE: f"scale tone ({scale_names})",
        NoteRole.BLUE_NOTE: f"blue note ({blue_names})" if blue_names else "blue note",
        NoteRole.OUTSIDE: "outside",
    }
    for i, role in enumerate(NoteRole):
        y = legend_y + i * 18.0
        svg.rect(left, y, 12, 12, ROLE_COLORS[role], rx="2.00",
                 **{"class": "legend-swatch"})
        svg.text(left + 18, y + 10, labels[role], size=10.0)
    return svg.document()
