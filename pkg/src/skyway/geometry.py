"""Bounding regions that restrict the recomposition search space.

Every region answers an inclusive membership query for an ``(k, 2)`` array
of points. Regions are immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

__all__ = [
    "Density",
    "Circle",
    "CellGrid",
    "SquareUnion",
    "ConvexPolygonRegion",
    "WholeNetwork",
    "NodeSetRegion",
    "RhombusRegions",
    "build_circle",
    "build_cell_grid",
    "build_partial_areas",
    "build_rhombus_regions",
    "nodes_in_region",
    "polygon_area",
]

# relative slack for polygon side tests; keeps a and b inside their own regions
POLY_EPS = 1e-9


class Density(IntEnum):
    """Cell density class; the value is the partial-area multiplier."""

    DENSE = 1
    AVERAGE = 2
    SPARSE = 3


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts.reshape(-1, 2)


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    kind = "circle"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def contains(self, points) -> np.ndarray:
        pts = _as_points(points)
        d2 = (pts[:, 0] - self.center[0]) ** 2 + (pts[:, 1] - self.center[1]) ** 2
        return d2 <= self.radius * self.radius

    def to_dict(self) -> dict:
        return {"kind": "circle", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class SquareUnion:
    """Union of axis-aligned squares given by centers and half-widths."""

    centers: np.ndarray
    half_widths: np.ndarray

    kind = "squares"

    def contains(self, points) -> np.ndarray:
        pts = _as_points(points)
        if len(self.centers) == 0:
            return np.zeros(len(pts), dtype=bool)
        dx = np.abs(pts[:, None, 0] - self.centers[None, :, 0])
        dy = np.abs(pts[:, None, 1] - self.centers[None, :, 1])
        hw = self.half_widths[None, :]
        return ((dx <= hw) & (dy <= hw)).any(axis=1)

    def covers_box(self, box: tuple[float, float, float, float]) -> bool:
        """True when the union contains the whole closed rectangle ``box``."""
        x0, y0, x1, y1 = box
        lo = self.centers - self.half_widths[:, None]
        hi = self.centers + self.half_widths[:, None]
        if np.any((lo[:, 0] <= x0) & (lo[:, 1] <= y0) & (hi[:, 0] >= x1) & (hi[:, 1] >= y1)):
            return True
        # coordinate compression: every elementary cell of the arrangement
        # clipped to the box must be covered at its center
        xs = np.unique(np.clip(np.concatenate([[x0, x1], lo[:, 0], hi[:, 0]]), x0, x1))
        ys = np.unique(np.clip(np.concatenate([[y0, y1], lo[:, 1], hi[:, 1]]), y0, y1))
        cx = (xs[:-1] + xs[1:]) / 2 if len(xs) > 1 else xs
        cy = (ys[:-1] + ys[1:]) / 2 if len(ys) > 1 else ys
        gx, gy = np.meshgrid(cx, cy)
        probe = np.column_stack([gx.ravel(), gy.ravel()])
        return bool(self.contains(probe).all())

    def to_dict(self) -> dict:
        return {
            "kind": "squares",
            "centers": self.centers.tolist(),
            "half_widths": self.half_widths.tolist(),
        }


@dataclass(frozen=True, eq=False)
class ConvexPolygonRegion:
    """Convex polygon with counterclockwise vertices."""

    vertices: np.ndarray

    kind = "polygon"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        v = _drop_collinear(v)
        if len(v) < 3:
            raise ValueError("polygon needs at least 3 non-collinear vertices")
        if polygon_area(v) < 0:
            v = v[::-1].copy()
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def contains(self, points) -> np.ndarray:
        pts = _as_points(points)
        v = self.vertices
        w = np.concatenate((v[1:], v[:1]))
        scale = float((v.max(axis=0) - v.min(axis=0)).max())
        tol = POLY_EPS * scale * scale
        inside = np.ones(len(pts), dtype=bool)
        for (ax, ay), (bx, by) in zip(v, w):
            cross = (bx - ax) * (pts[:, 1] - ay) - (by - ay) * (pts[:, 0] - ax)
            inside &= cross >= -tol
        return inside

    def to_dict(self) -> dict:
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class WholeNetwork:
    kind = "all"

    def contains(self, points) -> np.ndarray:
        return np.ones(len(_as_points(points)), dtype=bool)

    def to_dict(self) -> dict:
        return {"kind": "all"}


@dataclass(frozen=True)
class NodeSetRegion:
    """An explicit node-id set; used where growth is topological, not geometric."""

    ids: frozenset

    kind = "nodes"

    def contains(self, points) -> np.ndarray:
        raise TypeError("a node-set region has no planar membership; use nodes_in_region")

    def to_dict(self) -> dict:
        return {"kind": "nodes", "ids": sorted(self.ids)}


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counterclockwise order."""
    pts = np.asarray(vertices, dtype=float).tolist()
    total = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _drop_collinear(v: np.ndarray) -> np.ndarray:
    if len(v) < 3:
        return v
    pts = v.tolist()
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    scale = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    tol = 1e-12 * scale * scale
    n = len(pts)
    keep = []
    for i in range(n):
        (px, py), (qx, qy), (rx, ry) = pts[i - 1], pts[i], pts[(i + 1) % n]
        if abs((qx - px) * (ry - py) - (qy - py) * (rx - px)) > tol:
            keep.append(i)
    return v[keep]


def build_circle(a, b, radius: float) -> Circle:
    """Circle of the given radius centred on the midpoint of ``a``-``b``."""
    return Circle(((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0), float(radius))


@dataclass(frozen=True, eq=False)
class CellGrid:
    cell_size: float
    origin: tuple[float, float]
    rows: int
    cols: int
    counts: np.ndarray
    classes: np.ndarray
    co: int

    def cell_of(self, points) -> tuple[np.ndarray, np.ndarray]:
        """(row, col) indices by the floor rule, clamped onto the grid."""
        pts = _as_points(points)
        col = np.floor((pts[:, 0] - self.origin[0]) / self.cell_size).astype(np.int64)
        row = np.floor((pts[:, 1] - self.origin[1]) / self.cell_size).astype(np.int64)
        return np.clip(row, 0, self.rows - 1), np.clip(col, 0, self.cols - 1)

    def density_of(self, points) -> np.ndarray:
        r, c = self.cell_of(points)
        return self.classes[r, c]


def classify_counts(counts: np.ndarray) -> tuple[np.ndarray, int]:
    """Density classes by thirds of the count spread, half-open intervals."""
    counts = np.asarray(counts)
    co = int(counts.max() - counts.min())
    classes = np.full(counts.shape, int(Density.DENSE), dtype=np.int8)
    if co > 0:
        classes[counts < 2 * co / 3] = Density.AVERAGE
        classes[counts < co / 3] = Density.SPARSE
    return classes, co


def build_cell_grid(net, cell_size: float) -> CellGrid:
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    x0, y0, x1, y1 = net.bbox
    cols = max(1, math.ceil((x1 - x0) / cell_size))
    rows = max(1, math.ceil((y1 - y0) / cell_size))
    grid = CellGrid(cell_size, (x0, y0), rows, cols, np.zeros((rows, cols), np.int64), None, 0)
    r, c = grid.cell_of(net.coords)
    counts = np.bincount(r * cols + c, minlength=rows * cols).reshape(rows, cols)
    classes, co = classify_counts(counts)
    return CellGrid(cell_size, (x0, y0), rows, cols, counts, classes, co)


def build_partial_areas(points, grid: CellGrid, do_size: float) -> SquareUnion:
    """One square per point, half-width = density multiplier x ``do_size``."""
    if not do_size > 0:
        raise ValueError("do_size must be positive")
    pts = _as_points(points)
    if len(pts) == 0:
        raise ValueError("need at least one point")
    mult = grid.density_of(pts).astype(float)
    return SquareUnion(pts.copy(), mult * do_size)


@dataclass(frozen=True, eq=False)
class RhombusRegions:
    """The corridor regions around a broken segment ``a``-``b``.

    ``full`` is the rectangle spanned along ``a``-``b`` with half-width
    ``val_frac * |ab|``; ``midpoint_rhombus`` joins its side midpoints and
    ``triangle`` is that rhombus cut down to the denser side of the line ab.
    """

    full: ConvexPolygonRegion
    midpoint_rhombus: ConvexPolygonRegion
    triangle: ConvexPolygonRegion
    positive_count: int = 0
    negative_count: int = 0
    positive_side: bool = True
    half_width: float = 0.0
    frame: tuple = field(default=(), repr=False)

    def local(self, points) -> np.ndarray:
        """Coordinates along / across the segment, origin at ``a``."""
        (ax, ay), (ux, uy) = self.frame
        pts = _as_points(points)
        dx, dy = pts[:, 0] - ax, pts[:, 1] - ay
        return np.column_stack([dx * ux + dy * uy, -dx * uy + dy * ux])


def build_rhombus_regions(a, b, val_frac: float = 0.5, net=None) -> RhombusRegions:
    """Build rectangle, midpoint rhombus and triangle around segment a-b.

    The construction works in the frame whose x-axis is the line through a
    and b, so vertical and horizontal segments need no special casing.
    When ``net`` is given its nodes decide which half of the rectangle is
    denser; without it the left-hand side of a->b is used.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    length = math.hypot(bx - ax, by - ay)
    if length == 0:
        raise ValueError("degenerate segment: a == b")
    if not val_frac > 0:
        raise ValueError("val_frac must be positive")
    ux, uy = (bx - ax) / length, (by - ay) / length
    nx, ny = -uy, ux
    w = val_frac * length

    def world(s, t):
        return (ax + s * ux + t * nx, ay + s * uy + t * ny)

    rect = ConvexPolygonRegion(np.array([world(0, -w), world(length, -w), world(length, w), world(0, w)]))
    top, bottom = world(length / 2, w), world(length / 2, -w)
    rhombus = ConvexPolygonRegion(np.array([(ax, ay), bottom, (bx, by), top]))

    pos = neg = 0
    positive = True
    if net is not None:
        coords = net.coords
        node_ids = net.ids
        inside = rect.contains(coords)
        dx, dy = coords[:, 0] - ax, coords[:, 1] - ay
        t = dx * nx + dy * ny
        tol = POLY_EPS * length
        on_pos = inside & (t >= -tol)
        on_neg = inside & (t <= tol)
        pos, neg = int(on_pos.sum()), int(on_neg.sum())
        if pos != neg:
            positive = pos > neg
        else:
            only_pos = node_ids[on_pos & ~on_neg]
            only_neg = node_ids[on_neg & ~on_pos]
            if len(only_pos) and len(only_neg):
                positive = only_pos.min() < only_neg.min()
    apex = top if positive else bottom
    tri = ConvexPolygonRegion(np.array([(ax, ay), (bx, by), apex]))
    return RhombusRegions(rect, rhombus, tri, pos, neg, positive, w, ((ax, ay), (ux, uy)))


def nodes_in_region(net, region) -> set[int]:
    """Ids of the nodes of ``net`` inside ``region`` (inclusive boundaries)."""
    if isinstance(region, WholeNetwork):
        return set(net.ids.tolist())
    if isinstance(region, NodeSetRegion):
        return {n for n in region.ids if n in net}
    mask = region.contains(net.coords)
    return set(net.ids[mask].tolist())


def region_from_dict(doc: dict):
    kind = doc["kind"]
    if kind == "circle":
        return Circle(tuple(doc["center"]), doc["radius"])
    if kind == "squares":
        return SquareUnion(np.array(doc["centers"], float).reshape(-1, 2), np.array(doc["half_widths"], float))
    if kind == "polygon":
        return ConvexPolygonRegion(np.array(doc["vertices"], float))
    if kind == "all":
        return WholeNetwork()
    if kind == "nodes":
        return NodeSetRegion(frozenset(doc["ids"]))
    raise ValueError(f"unknown region kind {kind!r}")
