"""Similarity layout for fretboard grids: metric distances, MDS embedding,
grid snapping, and outlier flagging.

Distances are Euclidean between L1-normalized count vectors, so two grids
compare by *which* cells were played, not how much was played overall. The
2D layout comes from classical MDS refined by SMACOF stress majorization,
then snaps to display-grid cells by minimum-cost assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .heatmaps import FretboardGrid

SMACOF_MAX_ITER = 300
SMACOF_EPS = 1e-6


class DistanceMatrix:
    """Symmetric nonnegative distances with a zero diagonal."""

    __slots__ = ("d", "n")

    def __init__(self, d: np.ndarray):
        d = np.asarray(d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix entries must be finite")
        if np.any(d < 0):
            raise ValueError("distances must be nonnegative")
        if not np.allclose(d, d.T, atol=1e-12):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        self.d = d
        self.n = d.shape[0]


@dataclass
class Layout2D:
    """Placed recordings: raw 2D points, their display cells, and outlier flags."""

    points: np.ndarray  # (n, 2)
    stress: float
    grid_cells: list[tuple[int, int]]
    outlier_flags: list[bool]
    stress_trace: list[float] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "points": [[float(x), float(y)] for x, y in self.points],
            "stress": float(self.stress),
            "grid": [[int(r), int(c)] for r, c in self.grid_cells],
            "outliers": [bool(b) for b in self.outlier_flags],
        }


def _normalized(grid: FretboardGrid) -> np.ndarray:
    flat = grid.counts.ravel(order="C").astype(float)
    total = flat.sum()
    return flat / total if total > 0 else flat


def heatmap_distance(a: FretboardGrid, b: FretboardGrid) -> float:
    """Euclidean distance between L1-normalized grids (scale-invariant metric)."""
    if a.counts.shape != b.counts.shape:
        raise ValueError(f"grid dimensions differ: {a.counts.shape} vs {b.counts.shape}")
    return float(np.linalg.norm(_normalized(a) - _normalized(b)))


def distance_matrix(grids: list[FretboardGrid]) -> DistanceMatrix:
    """Pairwise heatmap distances for a list of grids."""
    vecs = np.array([_normalized(g) for g in grids])
    diff = vecs[:, None, :] - vecs[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(np.maximum(d, d.T))


def classical_mds(dm: DistanceMatrix) -> np.ndarray:
    """Torgerson MDS: double-center -D²/2, embed with the top-2 eigenpairs.

    Deterministic sign convention: each axis is flipped so its largest-|value|
    coordinate is positive (first such index on ties).
    """
    n = dm.n
    if n == 1:
        return np.zeros((1, 2))
    d2 = dm.d**2
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ d2 @ j
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(-evals, kind="stable")[:2]
    points = np.zeros((n, 2))
    for axis, idx in enumerate(order):
        lam = max(evals[idx], 0.0)
        points[:, axis] = evecs[:, idx] * math.sqrt(lam)
    for axis in range(2):
        col = points[:, axis]
        anchor = int(np.argmax(np.abs(col)))
        if col[anchor] < 0:
            points[:, axis] = -col
    return points


def _stress(d: np.ndarray, points: np.ndarray, denom: float) -> float:
    delta = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    iu = np.triu_indices(d.shape[0], k=1)
    return float(((d[iu] - delta[iu]) ** 2).sum() / denom)


def smacof(
    dm: DistanceMatrix,
    init: np.ndarray,
    max_iter: int = SMACOF_MAX_ITER,
    eps: float = SMACOF_EPS,
) -> tuple[np.ndarray, float, list[float]]:
    """Guttman-transform iterations minimizing normalized stress.

    Stops when the stress decrease falls below ``eps`` or after ``max_iter``
    iterations. Returns (points, final stress, stress trace including the
    initial configuration). Stress never increases between iterations.
    """
    d = dm.d
    n = dm.n
    points = np.array(init, dtype=float).reshape(n, 2)
    iu = np.triu_indices(n, k=1)
    denom = float((d[iu] ** 2).sum())
    if n == 1 or denom == 0.0:
        return np.zeros((n, 2)), 0.0, [0.0]

    trace = [_stress(d, points, denom)]
    for _ in range(max_iter):
        delta = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(delta > 0, d / np.where(delta > 0, delta, 1.0), 0.0)
        b = -ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        points = (b @ points) / n
        trace.append(_stress(d, points, denom))
        if trace[-2] - trace[-1] < eps:
            break
    return points, trace[-1], trace


def _assignment_min_cost(cost: list[list[float]]) -> tuple[list[int], float]:
    """Hungarian algorithm with potentials, O(n²m) for an n×m matrix, n ≤ m.

    Returns (column index per row, total cost).
    """
    n = len(cost)
    if n == 0:
        return [], 0.0
    m = len(cost[0])
    if n > m:
        raise ValueError("assignment needs at least as many columns as rows")
    INF = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    p = [0] * (m + 1)  # p[j] = row matched to column j (1-based; 0 = free)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assignment = [-1] * n
    for j in range(1, m + 1):
        if p[j]:
            assignment[p[j] - 1] = j - 1
    total = math.fsum(cost[i][assignment[i]] for i in range(n))
    return assignment, total


def grid_shape(n: int) -> tuple[int, int]:
    """Display grid: ⌈√n⌉ columns, enough rows to hold n cells."""
    if n < 1:
        return 1, 1
    cols = math.isqrt(n - 1) + 1  # = ceil(sqrt(n))
    rows = (n + cols - 1) // cols
    return rows, cols


def snap_to_grid(points: np.ndarray) -> list[tuple[int, int]]:
    """Assign each point a distinct display cell, minimizing total squared
    distance between scaled points and cell centers.

    Cost ties between optimal assignments break lexicographically: point 0
    takes the lowest-index cell it can hold while preserving optimality, then
    point 1, and so on (cells indexed row-major).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = pts.shape[0]
    if n == 0:
        return []
    rows, cols = grid_shape(n)

    scaled = np.empty_like(pts)
    for axis, extent in ((0, cols), (1, rows)):
        lo, hi = pts[:, axis].min(), pts[:, axis].max()
        if hi > lo:
            scaled[:, axis] = (pts[:, axis] - lo) / (hi - lo) * extent
        else:
            scaled[:, axis] = extent / 2.0
    centers = [
        (c + 0.5, r + 0.5) for r in range(rows) for c in range(cols)
    ]  # row-major cell order

    cost = [
        [(px - cx) ** 2 + (py - cy) ** 2 for cx, cy in centers]
        for px, py in scaled
    ]
    _, best_total = _assignment_min_cost(cost)

    # Sequential lexicographic fixing among cost-tied optima.
    cells = list(range(rows * cols))
    point_order = list(range(n))
    chosen: dict[int, int] = {}
    fixed_cost = 0.0
    for step, i in enumerate(point_order):
        rest = point_order[step + 1 :]
        for cell in cells:
            if rest:
                sub = [[cost[r][c] for c in cells if c != cell] for r in rest]
                _, rest_cost = _assignment_min_cost(sub)
            else:
                rest_cost = 0.0
            total = fixed_cost + cost[i][cell] + rest_cost
            if total <= best_total + 1e-9 * max(1.0, abs(best_total)):
                chosen[i] = cell
                fixed_cost += cost[i][cell]
                cells.remove(cell)
                break
        else:  # pragma: no cover - assignment always completes
            raise RuntimeError("grid assignment failed to complete")

    return [(chosen[i] // cols, chosen[i] % cols) for i in range(n)]


def detect_outliers(dm: DistanceMatrix, k: int = 3) -> list[bool]:
    """Flag recordings whose mean distance to their k nearest neighbors
    exceeds the Tukey fence (Q3 + 1.5·IQR) of all such scores.

    Fewer than 5 recordings never flag (too little data for quartiles).
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = dm.n
    if n < 5:
        return [False] * n
    kk = min(k, n - 1)
    scores = np.empty(n)
    for i in range(n):
        others = np.delete(dm.d[i], i)
        others.sort()
        scores[i] = others[:kk].mean()
    q1, q3 = np.percentile(scores, [25, 75])
    fence = q3 + 1.5 * (q3 - q1)
    return [bool(s > fence) for s in scores]


def layout_grids(grids: list[FretboardGrid], k: int = 3) -> Layout2D:
    """Full similarity layout: distances → MDS → SMACOF → grid snap → outliers."""
    dm = distance_matrix(grids)
    init = classical_mds(dm)
    points, stress, trace = smacof(dm, init)
    return Layout2D(
        points=points,
        stress=stress,
        grid_cells=snap_to_grid(points),
        outlier_flags=detect_outliers(dm, k),
        stress_trace=trace,
    )
