"""Planning-time geometric scores for build prefixes.

All three scores work on the axis-aligned part boxes.  Silhouettes are
orthographic: a raster cell is occupied when the viewing line through its
centre hits any box (slab test), so no polygon clipping is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import PartPlacement

DEFAULT_TAU_SYM = 1.0
DEFAULT_RESOLUTION = 0.5  # cells per LDU
DISTINCTNESS_GAIN = 0.25
SYMMETRY_MAPS = ("mirror_x", "mirror_z", "rotate_y180")

_UP = np.array([0.0, 1.0, 0.0])
_SLAB_TOL = 1e-9


def _unit(v) -> tuple[float, float, float]:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("view direction must be non-zero")
    return tuple(float(x) for x in v / n)


def direction_from_angles(azimuth_deg: float, elevation_deg: float) -> tuple[float, float, float]:
    """Unit vector from the model towards the viewer; azimuth 0 looks from +z."""
    az, el = math.radians(azimuth_deg), math.radians(elevation_deg)
    return _unit((math.cos(el) * math.sin(az), math.sin(el), math.cos(el) * math.cos(az)))


NAMED_VIEWS = {
    "front": (0.0, 0.0),
    "right": (90.0, 0.0),
    "back": (180.0, 0.0),
    "left": (270.0, 0.0),
    "top": (0.0, 90.0),
    "iso": (45.0, 35.264389682754654),
}


@dataclass(frozen=True)
class ViewpointSet:
    directions: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if not self.directions:
            raise ValueError("ViewpointSet needs at least one direction")
        object.__setattr__(self, "directions", tuple(_unit(d) for d in self.directions))

    @classmethod
    def default(cls, azimuths: int = 8, elevations: Sequence[float] = (15.0, 45.0)) -> "ViewpointSet":
        return cls(tuple(
            direction_from_angles(360.0 * i / azimuths, el) for el in elevations for i in range(azimuths)
        ))

    @classmethod
    def face_on(cls) -> "ViewpointSet":
        return cls(tuple(direction_from_angles(*NAMED_VIEWS[n]) for n in ("front", "right", "back", "left", "top")))

    @classmethod
    def named(cls, *names: str) -> "ViewpointSet":
        return cls(tuple(direction_from_angles(*NAMED_VIEWS[n]) for n in names))

    def __len__(self):
        return len(self.directions)


def view_basis(direction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(view, right, up) screen basis for a viewing direction."""
    v = np.asarray(_unit(direction))
    right = np.cross(_UP, v)
    if np.linalg.norm(right) < 1e-9:
        right = np.array([1.0, 0.0, 0.0])
    right = right / np.linalg.norm(right)
    up = np.cross(v, right)
    return v, right, up


@dataclass(frozen=True)
class SilhouetteRaster:
    grid: np.ndarray = field(repr=False)  # bool, rows along screen-up (row 0 lowest)
    origin: tuple[float, float]
    cell: tuple[float, float]
    resolution: float
    viewpoint: tuple[float, float, float]

    @property
    def area_cells(self) -> int:
        return int(self.grid.sum())


def _boxes(parts: Sequence[PartPlacement]) -> np.ndarray:
    parts = list(parts)
    if not parts:
        raise ValueError("prefix must contain at least one part")
    return np.stack([p.box for p in parts])


def _project_bounds(boxes, right, up):
    pts = boxes[:, _CORNERS, np.arange(3)]  # (k, 8, 3)
    sx = pts @ right
    sy = pts @ up
    return sx.min(), sx.max(), sy.min(), sy.max()


def _line_hits_box(points: np.ndarray, v: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Slab test: does the line ``point + t * v`` meet the box [lo, hi]?"""
    tmin = np.full(len(points), -np.inf)
    tmax = np.full(len(points), np.inf)
    ok = np.ones(len(points), dtype=bool)
    for a in range(3):
        p = points[:, a]
        if abs(v[a]) < 1e-12:
            ok &= (p >= lo[a] - _SLAB_TOL) & (p <= hi[a] + _SLAB_TOL)
            continue
        t1 = (lo[a] - p) / v[a]
        t2 = (hi[a] - p) / v[a]
        tmin = np.maximum(tmin, np.minimum(t1, t2))
        tmax = np.minimum(tmax, np.maximum(t1, t2))
    return ok & (tmin <= tmax + _SLAB_TOL)


_CORNERS = np.stack(np.meshgrid([0, 1], [0, 1], [0, 1], indexing="ij"), axis=-1).reshape(-1, 3)


def _raster_on(boxes, v, right, up, xs, ys) -> np.ndarray:
    """Occupancy of the grid of cell centres ``xs`` x ``ys`` (screen coordinates)."""
    grid = np.zeros((len(ys), len(xs)), dtype=bool)
    pts = boxes[:, _CORNERS, np.arange(3)]
    sx = pts @ right
    sy = pts @ up
    pad = 1e-7
    for b in range(len(boxes)):
        i0, i1 = np.searchsorted(xs, sx[b].min() - pad, side="left"), np.searchsorted(xs, sx[b].max() + pad, side="right")
        j0, j1 = np.searchsorted(ys, sy[b].min() - pad, side="left"), np.searchsorted(ys, sy[b].max() + pad, side="right")
        if i0 >= i1 or j0 >= j1:
            continue
        gx, gy = np.meshgrid(xs[i0:i1], ys[j0:j1])
        cells = gx.ravel()[:, None] * right + gy.ravel()[:, None] * up
        hit = _line_hits_box(cells, v, boxes[b, 0], boxes[b, 1])
        grid[j0:j1, i0:i1] |= hit.reshape(j1 - j0, i1 - i0)
    return grid


def rasterize(parts: Sequence[PartPlacement], direction, resolution: float = DEFAULT_RESOLUTION) -> SilhouetteRaster | None:
    """Silhouette of a prefix on a grid that tightly encloses its projection.

    Cell counts are ``round(extent * resolution)`` per axis (at least 1), and the
    cell size is stretched so the grid edges coincide with the projection bounds.
    Returns None for a zero-area projection.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    boxes = _boxes(parts)
    v, right, up = view_basis(direction)
    x0, x1, y0, y1 = _project_bounds(boxes, right, up)
    w, h = x1 - x0, y1 - y0
    if w <= 1e-12 or h <= 1e-12:
        return None
    nx = max(1, int(round(w * resolution)))
    ny = max(1, int(round(h * resolution)))
    sx, sy = w / nx, h / ny
    xs = x0 + (np.arange(nx) + 0.5) * sx
    ys = y0 + (np.arange(ny) + 0.5) * sy
    grid = _raster_on(boxes, v, right, up, xs, ys)
    return SilhouetteRaster(grid, (float(x0), float(y0)), (float(sx), float(sy)), float(resolution), tuple(float(c) for c in v))


def boundary_cells(grid: np.ndarray) -> int:
    """Cells whose occupancy differs from at least one 4-neighbour.

    Out-of-grid neighbours count as empty, so occupied border cells are
    boundary cells; empty cells count when they touch the silhouette.
    """
    g = np.asarray(grid, dtype=bool)
    p = np.pad(g, 1)
    c = p[1:-1, 1:-1]
    diff = (p[:-2, 1:-1] != c) | (p[2:, 1:-1] != c) | (p[1:-1, :-2] != c) | (p[1:-1, 2:] != c)
    return int(diff.sum())


def view_distinctness(raster: SilhouetteRaster | None, gain: float = DISTINCTNESS_GAIN) -> float:
    if raster is None or not raster.grid.any():
        return 0.0
    ref = boundary_cells(np.ones_like(raster.grid))
    ratio = boundary_cells(raster.grid) / ref
    return float(min(1.0, max(0.0, gain * (ratio - 1.0))))


def distinctness_score(parts: Sequence[PartPlacement], views: ViewpointSet | None = None,
                       resolution: float = DEFAULT_RESOLUTION, gain: float = DISTINCTNESS_GAIN) -> float:
    """Mean over views of how much the silhouette outline exceeds its bounding rectangle's."""
    views = views or ViewpointSet.default()
    parts = list(parts)
    scores = [view_distinctness(rasterize(parts, d, resolution), gain) for d in views.directions]
    return float(np.mean(scores))


def centred_rasters(parts_a, parts_b, direction, resolution: float = DEFAULT_RESOLUTION):
    """Rasters of two prefixes on one grid, each centred on its own AABB centre."""
    v, right, up = view_basis(direction)
    s = 1.0 / resolution
    spans = []
    for parts in (parts_a, parts_b):
        boxes = _boxes(parts)
        centre = (boxes[:, 0, :].min(axis=0) + boxes[:, 1, :].max(axis=0)) / 2
        cx, cy = centre @ right, centre @ up
        x0, x1, y0, y1 = _project_bounds(boxes, right, up)
        spans.append((boxes, cx, cy, x0 - cx, x1 - cx, y0 - cy, y1 - cy))
    lo_x = min(sp[3] for sp in spans)
    hi_x = max(sp[4] for sp in spans)
    lo_y = min(sp[5] for sp in spans)
    hi_y = max(sp[6] for sp in spans)
    ix = np.arange(math.floor(lo_x / s), math.ceil(hi_x / s))
    iy = np.arange(math.floor(lo_y / s), math.ceil(hi_y / s))
    if len(ix) == 0:
        ix = np.array([0])
    if len(iy) == 0:
        iy = np.array([0])
    out = []
    for boxes, cx, cy, *_ in spans:
        xs = cx + (ix + 0.5) * s
        ys = cy + (iy + 0.5) * s
        out.append(_raster_on(boxes, v, right, up, xs, ys))
    return out[0], out[1]


def confusability(parts_a: Sequence[PartPlacement], parts_b: Sequence[PartPlacement],
                  views: ViewpointSet | None = None, resolution: float = DEFAULT_RESOLUTION) -> float:
    """Mean silhouette IoU of two prefixes after centring each on its AABB centre.

    1.0 means the prefixes are indistinguishable from every view.
    """
    views = views or ViewpointSet.default()
    parts_a, parts_b = list(parts_a), list(parts_b)
    ious = []
    for d in views.directions:
        a, b = centred_rasters(parts_a, parts_b, d, resolution)
        union = np.count_nonzero(a | b)
        ious.append(1.0 if union == 0 else np.count_nonzero(a & b) / union)
    return float(np.mean(ious))


@dataclass(frozen=True)
class SymmetryReport:
    best_plane: str
    score: float
    per_plane_scores: dict


def _apply_map(name, pts, cx, cz):
    out = pts.copy()
    if name in ("mirror_x", "rotate_y180"):
        out[:, 0] = 2 * cx - out[:, 0]
    if name in ("mirror_z", "rotate_y180"):
        out[:, 2] = 2 * cz - out[:, 2]
    return out


def _greedy_matches(images, targets, same_class, tau) -> int:
    dist = np.linalg.norm(images[:, None, :] - targets[None, :, :], axis=-1)
    ok = same_class & (dist <= tau + 1e-9)
    used = np.zeros(len(targets), dtype=bool)
    matched = 0
    for i in range(len(images)):
        cand = np.flatnonzero(ok[i] & ~used)
        if len(cand):
            j = cand[np.argmin(dist[i, cand])]  # argmin keeps the first (smallest index) on ties
            used[j] = True
            matched += 1
    return matched


def symmetry_score(parts: Sequence[PartPlacement], tau_sym: float = DEFAULT_TAU_SYM) -> SymmetryReport:
    """Best fraction of part centroids that a vertical mirror or half-turn maps onto a like part."""
    parts = list(parts)
    boxes = _boxes(parts)
    cents = boxes.mean(axis=1)
    lo, hi = boxes[:, 0, :].min(axis=0), boxes[:, 1, :].max(axis=0)
    cx, cz = (lo[0] + hi[0]) / 2, (lo[2] + hi[2]) / 2
    keys = [(p.shape.shape_id, p.world_extent) for p in parts]
    codes = {k: i for i, k in enumerate(dict.fromkeys(keys))}
    cls = np.array([codes[k] for k in keys])
    same = cls[:, None] == cls[None, :]
    k = len(parts)
    per = {}
    for name in SYMMETRY_MAPS:
        per[name] = _greedy_matches(_apply_map(name, cents, cx, cz), cents, same, tau_sym) / k
    best = max(SYMMETRY_MAPS, key=lambda n: (per[n], -SYMMETRY_MAPS.index(n)))
    return SymmetryReport(best, per[best], per)


def to_pgm(raster: SilhouetteRaster) -> str:
    """Plain-text PGM (P2) of a raster, top row first."""
    grid = raster.grid[::-1].astype(int)
    ny, nx = grid.shape
    rows = "\n".join(" ".join(str(v) for v in row) for row in grid)
    return f"P2\n{nx} {ny}\n1\n{rows}\n"
