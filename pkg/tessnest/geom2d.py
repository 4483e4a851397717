"""
Planar convex geometry for tessnest.

Lines, segments, convex polygons and discs, plus the clipping and crossing
primitives every other module builds on. Polygons are stored counter-clockwise
in a canonical form (duplicate and collinear vertices pruned) and may carry one
integer label per edge; the tessellation builders use the labels to remember
which line or which neighbouring nucleus produced an edge. ``ARTIFICIAL``
marks edges that come from a window or working-region boundary, ``PLAIN``
the edges of a free-standing polygon.

All predicates take an absolute tolerance ``eps``.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
import shapely
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from .exceptions import InvalidInputError

EPS = 1e-9
ARTIFICIAL = -1
PLAIN = -2

BoundingBox = Tuple[float, float, float, float]
ClippedSegment = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class Point:
    """A point of the plane in window units."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"non-finite coordinates ({self.x}, {self.y})", "point")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Line:
    """
    Line H(p, theta) = {x : <x, (cos theta, sin theta)> = p}.

    Attributes:
        p: Signed perpendicular distance from the origin
        theta: Normal direction, in [0, pi)
    """

    p: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.theta)):
            raise InvalidInputError("non-finite line parameters", "line")
        if not 0.0 <= self.theta < math.pi:
            raise InvalidInputError(f"theta {self.theta} outside [0, pi)", "line")

    @classmethod
    def normalized(cls, p: float, theta: float) -> "Line":
        """Build a line from any angle, flipping p so that theta lands in [0, pi)."""
        theta = math.fmod(theta, 2.0 * math.pi)
        if theta < 0.0:
            theta += 2.0 * math.pi
        if theta >= math.pi:
            theta -= math.pi
            p = -p
        if theta >= math.pi:
            theta = 0.0
            p = -p
        return cls(p, theta)

    @classmethod
    def through(cls, a: Point, b: Point) -> "Line":
        """The line through two distinct points."""
        dx, dy = b.x - a.x, b.y - a.y
        norm = math.hypot(dx, dy)
        if norm <= EPS:
            raise InvalidInputError("points coincide", "line")
        nx, ny = -dy / norm, dx / norm
        return cls.normalized(a.x * nx + a.y * ny, math.atan2(ny, nx))

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def direction(self) -> np.ndarray:
        return np.array([-math.sin(self.theta), math.cos(self.theta)])

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """<x, v> - p for each row of ``points``."""
        return np.asarray(points, dtype=float) @ self.normal - self.p

    def intersection(self, other: "Line", eps: float = EPS) -> Optional[Point]:
        """Intersection point with another line, None when (nearly) parallel."""
        det = math.sin(other.theta - self.theta)
        if abs(det) <= eps:
            return None
        c1, s1 = math.cos(self.theta), math.sin(self.theta)
        c2, s2 = math.cos(other.theta), math.sin(other.theta)
        x = (self.p * s2 - other.p * s1) / det
        y = (other.p * c1 - self.p * c2) / det
        return Point(x, y)


@dataclass(frozen=True)
class Segment:
    """A closed segment with distinct endpoints."""

    a: Point
    b: Point

    def __post_init__(self) -> None:
        if self.a.distance(self.b) <= EPS:
            raise InvalidInputError("segment endpoints coincide", "segment")

    @classmethod
    def from_arrays(cls, a: np.ndarray, b: np.ndarray) -> "Segment":
        return cls(Point(float(a[0]), float(a[1])), Point(float(b[0]), float(b[1])))

    @property
    def length(self) -> float:
        return self.a.distance(self.b)

    @property
    def midpoint(self) -> Point:
        return Point(0.5 * (self.a.x + self.b.x), 0.5 * (self.a.y + self.b.y))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a.x, self.a.y], [self.b.x, self.b.y]], dtype=float)


@dataclass(frozen=True)
class PolygonMetrics:
    area: float
    perimeter: float
    diameter: float
    centroid: Point
    vertex_count: int


class Window(Protocol):
    """Shape interface shared by polygon and disc sampling windows."""

    @property
    def area(self) -> float: ...

    @property
    def bounding_box(self) -> BoundingBox: ...

    def contains(self, points: np.ndarray, eps: float = EPS) -> np.ndarray: ...

    def clip_segment(
        self, a: np.ndarray, b: np.ndarray, eps: float = EPS
    ) -> Optional[ClippedSegment]: ...

    def intersects(self, poly: "ConvexPolygon", eps: float = EPS) -> bool: ...

    def circumradius(self, center: Optional[np.ndarray] = None) -> float: ...


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _signed_area2(v: np.ndarray) -> float:
    w = np.roll(v, -1, axis=0)
    return float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))


def _canonicalize(
    vertices: np.ndarray, labels: np.ndarray, eps: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Orient CCW, prune duplicate and collinear vertices, check convexity."""
    v = vertices
    n = len(v)
    if n < 3:
        raise InvalidInputError(f"polygon needs at least 3 vertices, got {n}", "polygon")
    if _signed_area2(v) < 0.0:
        idx = np.arange(n)
        v = v[::-1].copy()
        labels = labels[(n - 2 - idx) % n]

    # coincident consecutive vertices: drop the first of each pair
    while len(v) >= 3:
        d = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        short = np.flatnonzero(d <= eps)
        if short.size == 0:
            break
        k = int(short[0])
        v = np.delete(v, k, axis=0)
        labels = np.delete(labels, k)

    # collinear vertices inside one labelled edge
    while len(v) >= 3:
        prev = np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0)
        chord = np.linalg.norm(nxt - prev, axis=1)
        height = _cross(v - prev, nxt - v) / np.maximum(chord, eps)
        if np.any(height < -eps):
            raise InvalidInputError("vertices are not in convex position", "polygon")
        flat = np.flatnonzero((height <= eps) & (labels == np.roll(labels, 1)))
        if flat.size == 0:
            break
        k = int(flat[0])
        v = np.delete(v, k, axis=0)
        labels = np.delete(labels, k)

    if len(v) < 3 or 0.5 * _signed_area2(v) <= eps * eps:
        raise InvalidInputError("degenerate polygon (zero area)", "polygon")
    return v, labels


class ConvexPolygon:
    """
    Convex polygon with counter-clockwise vertices and optional edge labels.

    Edge ``k`` runs from ``vertices[k]`` to ``vertices[k + 1]`` and carries
    ``labels[k]``. Instances are immutable.
    """

    __slots__ = ("_vertices", "_labels")

    def __init__(
        self,
        vertices: Union[np.ndarray, Sequence[Point], Sequence[Sequence[float]]],
        labels: Optional[Sequence[int]] = None,
        eps: float = EPS,
    ) -> None:
        if len(vertices) and isinstance(vertices[0], Point):
            v = np.array([[p.x, p.y] for p in vertices], dtype=float)  # type: ignore[union-attr]
        else:
            v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidInputError(f"expected (n, 2) vertices, got shape {v.shape}", "polygon")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("non-finite vertex coordinates", "polygon")
        lab = (
            np.full(len(v), PLAIN, dtype=np.int64)
            if labels is None
            else np.array(labels, dtype=np.int64)
        )
        if lab.shape != (len(v),):
            raise InvalidInputError("one label per edge is required", "polygon")
        v, lab = _canonicalize(v, lab, eps)
        v.setflags(write=False)
        lab.setflags(write=False)
        self._vertices = v
        self._labels = lab

    # construction helpers

    @classmethod
    def rectangle(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "ConvexPolygon":
        return cls([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])

    @classmethod
    def square(cls, half_side: float, center: Tuple[float, float] = (0.0, 0.0)) -> "ConvexPolygon":
        cx, cy = center
        return cls.rectangle(cx - half_side, cy - half_side, cx + half_side, cy + half_side)

    @classmethod
    def regular(
        cls, n: int, radius: float, center: Tuple[float, float] = (0.0, 0.0), phase: float = 0.0
    ) -> "ConvexPolygon":
        angles = phase + 2.0 * np.pi * np.arange(n) / n
        return cls(np.column_stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)]))

    @classmethod
    def hull(cls, points: np.ndarray) -> "ConvexPolygon":
        """Convex hull of a point cloud (scipy/Qhull returns 2-D hulls CCW)."""
        pts = np.asarray(points, dtype=float)
        if len(pts) < 3:
            raise InvalidInputError("hull needs at least 3 points", "polygon")
        try:
            hull = ConvexHull(pts)
        except Exception as e:
            raise InvalidInputError(f"hull failed: {e}", "polygon") from e
        return cls(pts[hull.vertices])

    def with_labels(self, labels: Sequence[int]) -> "ConvexPolygon":
        return ConvexPolygon(self._vertices, labels)

    # accessors

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def points(self) -> List[Point]:
        return [Point(float(x), float(y)) for x, y in self._vertices]

    def __len__(self) -> int:
        return len(self._vertices)

    def __repr__(self) -> str:
        return f"ConvexPolygon(n={len(self)}, area={self.area:.6g})"

    def edge_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return self._vertices, np.roll(self._vertices, -1, axis=0)

    def edges(self) -> List[Segment]:
        starts, ends = self.edge_arrays()
        return [Segment.from_arrays(a, b) for a, b in zip(starts, ends)]

    @property
    def area(self) -> float:
        return 0.5 * _signed_area2(self._vertices)

    @property
    def perimeter(self) -> float:
        starts, ends = self.edge_arrays()
        return float(np.sum(np.linalg.norm(ends - starts, axis=1)))

    @property
    def centroid(self) -> Point:
        v = self._vertices
        w = np.roll(v, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a6 = 3.0 * np.sum(cross)
        cx = float(np.sum((v[:, 0] + w[:, 0]) * cross) / a6)
        cy = float(np.sum((v[:, 1] + w[:, 1]) * cross) / a6)
        return Point(cx, cy)

    @property
    def diameter(self) -> float:
        # the farthest pair of a convex polygon is a pair of vertices
        return float(np.max(pdist(self._vertices)))

    @property
    def bounding_box(self) -> BoundingBox:
        lo = self._vertices.min(axis=0)
        hi = self._vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def circumradius(self, center: Optional[np.ndarray] = None) -> float:
        c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        return float(np.max(np.linalg.norm(self._vertices - c, axis=1)))

    # predicates

    def contains(self, points: np.ndarray, eps: float = EPS) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        starts, ends = self.edge_arrays()
        e = ends - starts
        length = np.linalg.norm(e, axis=1)
        rel = pts[:, None, :] - starts[None, :, :]
        dist = _cross(e[None, :, :], rel) / length[None, :]
        return np.all(dist >= -eps, axis=1)

    def clip_segment(
        self, a: np.ndarray, b: np.ndarray, eps: float = EPS
    ) -> Optional[ClippedSegment]:
        """Cyrus-Beck clipping of segment ab; None when the overlap is shorter than eps."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = b - a
        seg_len = float(np.hypot(d[0], d[1]))
        if seg_len <= eps:
            return None
        starts, ends = self.edge_arrays()
        e = ends - starts
        outward = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
        num = np.sum((a - starts) * outward, axis=1)
        den = outward @ d
        t0, t1 = 0.0, 1.0
        for nk, dk in zip(num, den):
            if abs(dk) <= 1e-15:
                if nk > eps:
                    return None
                continue
            t = -nk / dk
            if dk < 0.0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1:
                return None
        if (t1 - t0) * seg_len <= eps:
            return None
        return a + t0 * d, a + t1 * d

    def intersects(self, poly: "ConvexPolygon", eps: float = EPS) -> bool:
        if not _boxes_overlap(self.bounding_box, poly.bounding_box, eps):
            return False
        return clip_to_window(poly, self, eps) is not None

    def covers(self, window: Window, eps: float = EPS) -> bool:
        """True when ``window`` lies inside this polygon."""
        if isinstance(window, Disc):
            c = np.asarray(window.center, dtype=float)
            if not bool(self.contains(c, eps)[0]):
                return False
            starts, ends = self.edge_arrays()
            e = ends - starts
            dist = _cross(e, c - starts) / np.linalg.norm(e, axis=1)
            return bool(np.all(dist >= window.radius - eps))
        return bool(np.all(self.contains(window.vertices, eps)))  # type: ignore[attr-defined]

    def equals(self, other: "ConvexPolygon", eps: float = 1e-9) -> bool:
        """Same vertex cycle up to the starting vertex."""
        if len(self) != len(other):
            return False
        a = _rotate_to_lexmin(self._vertices)
        b = _rotate_to_lexmin(other._vertices)
        return bool(np.allclose(a, b, atol=eps, rtol=0.0))


@dataclass(frozen=True)
class Disc:
    """Closed disc window."""

    radius: float
    center: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InvalidInputError(f"radius must be positive, got {self.radius}", "disc")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    @property
    def bounding_box(self) -> BoundingBox:
        cx, cy = self.center
        r = self.radius
        return cx - r, cy - r, cx + r, cy + r

    def circumradius(self, center: Optional[np.ndarray] = None) -> float:
        c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        return float(np.hypot(*(np.asarray(self.center) - c))) + self.radius

    def contains(self, points: np.ndarray, eps: float = EPS) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) <= self.radius + eps

    def clip_segment(
        self, a: np.ndarray, b: np.ndarray, eps: float = EPS
    ) -> Optional[ClippedSegment]:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = b - a
        f = a - np.asarray(self.center, dtype=float)
        qa = float(d @ d)
        if qa <= eps * eps:
            return None
        qb = 2.0 * float(f @ d)
        qc = float(f @ f) - self.radius**2
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            return None
        root = math.sqrt(disc)
        t0 = max(0.0, (-qb - root) / (2.0 * qa))
        t1 = min(1.0, (-qb + root) / (2.0 * qa))
        if (t1 - t0) * math.sqrt(qa) <= eps:
            return None
        return a + t0 * d, a + t1 * d

    def intersects(self, poly: ConvexPolygon, eps: float = EPS) -> bool:
        c = np.asarray(self.center, dtype=float)
        if not _boxes_overlap(self.bounding_box, poly.bounding_box, eps):
            return False
        if bool(poly.contains(c, eps)[0]):
            return True
        starts, ends = poly.edge_arrays()
        return bool(np.min(point_segment_distance(c, starts, ends)) < self.radius - eps)


def _rotate_to_lexmin(v: np.ndarray) -> np.ndarray:
    k = int(np.lexsort((v[:, 1], v[:, 0]))[0])
    return np.roll(v, -k, axis=0)


def _boxes_overlap(a: BoundingBox, b: BoundingBox, eps: float) -> bool:
    return not (a[2] < b[0] - eps or b[2] < a[0] - eps or a[3] < b[1] - eps or b[3] < a[1] - eps)


def point_segment_distance(p: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance from point p to each segment starts[i]-ends[i]."""
    d = ends - starts
    dd = np.sum(d * d, axis=1)
    t = np.clip(np.sum((p - starts) * d, axis=1) / np.where(dd > 0.0, dd, 1.0), 0.0, 1.0)
    proj = starts + t[:, None] * d
    return np.linalg.norm(proj - p, axis=1)


def _halfplane(
    v: np.ndarray,
    labels: np.ndarray,
    normal: np.ndarray,
    offset: float,
    new_label: int,
    eps: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Sutherland-Hodgman step keeping {x : <x, normal> <= offset}; labels follow the edges."""
    s = v @ normal - offset
    inside = s <= eps
    out_v: List[np.ndarray] = []
    out_l: List[int] = []
    n = len(v)
    for k in range(n):
        j = (k + 1) % n
        if inside[k]:
            out_v.append(v[k])
            out_l.append(int(labels[k]))
            if not inside[j]:
                t = s[k] / (s[k] - s[j])
                out_v.append(v[k] + t * (v[j] - v[k]))
                out_l.append(new_label)
        elif inside[j]:
            t = s[k] / (s[k] - s[j])
            out_v.append(v[k] + t * (v[j] - v[k]))
            out_l.append(int(labels[k]))
    if not out_v:
        return np.empty((0, 2)), np.empty(0, dtype=np.int64)
    return np.array(out_v), np.array(out_l, dtype=np.int64)


def _polygon_or_none(v: np.ndarray, labels: np.ndarray, eps: float) -> Optional[ConvexPolygon]:
    if len(v) < 3:
        return None
    try:
        return ConvexPolygon(v, labels, eps)
    except InvalidInputError:
        return None


def clip_halfplane(
    poly: ConvexPolygon,
    normal: np.ndarray,
    offset: float,
    label: int = ARTIFICIAL,
    eps: float = EPS,
) -> Optional[ConvexPolygon]:
    """Part of ``poly`` in {x : <x, normal> <= offset}; the cut edge gets ``label``."""
    s = poly.vertices @ normal - offset
    if s.max() <= eps:
        return poly
    if s.min() >= -eps:
        return None
    v, lab = _halfplane(poly.vertices, poly.labels, normal, offset, label, eps)
    return _polygon_or_none(v, lab, eps)


def split_by_line(
    poly: ConvexPolygon, line: Line, label: int = ARTIFICIAL, eps: float = EPS
) -> Tuple[Optional[ConvexPolygon], Optional[ConvexPolygon]]:
    """
    Split a convex polygon by a line.

    Args:
        poly: Polygon to split
        line: Cutting line
        label: Label given to the new edge in both parts
        eps: Tolerance

    Returns:
        (left, right) with left = {<x, v> <= p} and right = {<x, v> >= p}; a part
        is None when the line misses the polygon's interior.
    """
    s = line.signed_distance(poly.vertices)
    if s.max() <= eps:
        return poly, None
    if s.min() >= -eps:
        return None, poly
    normal = line.normal
    lv, ll = _halfplane(poly.vertices, poly.labels, normal, line.p, label, eps)
    rv, rl = _halfplane(poly.vertices, poly.labels, -normal, -line.p, label, eps)
    return _polygon_or_none(lv, ll, eps), _polygon_or_none(rv, rl, eps)


def clip_to_window(
    poly: ConvexPolygon, window: ConvexPolygon, eps: float = EPS, label: int = ARTIFICIAL
) -> Optional[ConvexPolygon]:
    """
    Intersection of two convex polygons.

    The labels of ``poly`` are kept; edges contributed by ``window`` get ``label``.
    Returns None when the interiors are disjoint.
    """
    if not _boxes_overlap(poly.bounding_box, window.bounding_box, eps):
        return None
    v, lab = poly.vertices, poly.labels
    starts, ends = window.edge_arrays()
    for a, b in zip(starts, ends):
        e = b - a
        outward = np.array([e[1], -e[0]]) / math.hypot(e[0], e[1])
        offset = float(a @ outward)
        s = v @ outward - offset
        if s.max() <= eps:
            continue
        if s.min() >= -eps:
            return None
        v, lab = _halfplane(v, lab, outward, offset, label, eps)
        if len(v) < 3:
            return None
    return _polygon_or_none(np.array(v), np.array(lab), eps)


def line_edge_crossings(
    poly: ConvexPolygon, line: Line, eps: float = EPS
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Crossing points of a line with the polygon boundary and the edge index of each.

    Edges are half-open: a crossing at a vertex belongs to the edge starting
    there. Edges lying on the line contribute nothing.
    """
    v = poly.vertices
    s = line.signed_distance(v)
    nxt = np.roll(v, -1, axis=0)
    s_next = np.roll(s, -1)
    on = np.abs(s) <= eps
    on_next = np.roll(on, -1)
    on_prev = np.roll(on, 1)
    proper = ~on & ~on_next & (s * s_next < 0.0)
    at_vertex = on & ~on_prev & ~on_next
    idx_proper = np.flatnonzero(proper)
    t = s[idx_proper] / (s[idx_proper] - s_next[idx_proper])
    pts_proper = v[idx_proper] + t[:, None] * (nxt[idx_proper] - v[idx_proper])
    idx_vertex = np.flatnonzero(at_vertex)
    idx = np.concatenate([idx_proper, idx_vertex])
    pts = np.vstack([pts_proper, v[idx_vertex]]) if idx.size else np.empty((0, 2))
    order = np.argsort(idx, kind="stable")
    return pts[order], idx[order]


def boundary_crossings(poly: ConvexPolygon, line: Line, eps: float = EPS) -> List[Point]:
    """Points where a line meets the boundary of a convex polygon (0 or 2 generically)."""
    pts, _ = line_edge_crossings(poly, line, eps)
    return [Point(float(x), float(y)) for x, y in pts]


def pairwise_segment_intersections(
    p: np.ndarray, q: np.ndarray, a: np.ndarray, b: np.ndarray, eps: float = EPS
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    All intersections between segments p[i]-q[i] and a[j]-b[j].

    Returns:
        (points, i, j). Parallel and collinear pairs give no point; endpoint
        contacts within eps count.
    """
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    d = (q - p)[:, None, :]
    e = (b - a)[None, :, :]
    w = a[None, :, :] - p[:, None, :]
    denom = _cross(d, e)
    len_d = np.linalg.norm(d, axis=2)
    len_e = np.linalg.norm(e, axis=2)
    ok = np.abs(denom) > 1e-12 * len_d * len_e
    safe = np.where(ok, denom, 1.0)
    t = _cross(w, e) / safe
    u = _cross(w, d) / safe
    tol_t = eps / len_d
    tol_u = eps / len_e
    hit = ok & (t >= -tol_t) & (t <= 1.0 + tol_t) & (u >= -tol_u) & (u <= 1.0 + tol_u)
    ii, jj = np.nonzero(hit)
    pts = p[ii] + t[ii, jj][:, None] * (q[ii] - p[ii])
    return pts, ii, jj


def merge_points(points: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Collapse points closer than eps (transitively) to one representative each."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        return pts
    pairs = cKDTree(pts).query_pairs(eps, output_type="ndarray")
    if len(pairs) == 0:
        return pts
    n = len(pts)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, component = connected_components(graph, directed=False)
    _, first = np.unique(component, return_index=True)
    return pts[np.sort(first)]


def segment_crossings(
    poly_boundary: Sequence[Segment], seg: Segment, eps: float = EPS
) -> List[Point]:
    """Intersection points of ``seg`` with boundary segments, merged under eps."""
    if not poly_boundary:
        return []
    bnd = np.array([s.as_array() for s in poly_boundary])
    arr = seg.as_array()
    pts, _, _ = pairwise_segment_intersections(arr[:1], arr[1:], bnd[:, 0], bnd[:, 1], eps)
    return [Point(float(x), float(y)) for x, y in merge_points(pts, eps)]


def metrics(poly: ConvexPolygon) -> PolygonMetrics:
    """Area, perimeter, diameter, centroid and vertex count."""
    area = poly.area
    if area <= 0.0:
        raise InvalidInputError("degenerate polygon", "polygon")
    return PolygonMetrics(
        area=area,
        perimeter=poly.perimeter,
        diameter=poly.diameter,
        centroid=poly.centroid,
        vertex_count=len(poly),
    )


def smallest_enclosing_disc(poly: ConvexPolygon) -> Tuple[np.ndarray, float]:
    """Center and radius of the minimum bounding circle (radius re-measured so every vertex is covered)."""
    circle = shapely.minimum_bounding_circle(shapely.Polygon(poly.vertices))
    c = circle.centroid
    center = np.array([c.x, c.y])
    return center, poly.circumradius(center)


def segment_length_inside(window: Window, a: np.ndarray, b: np.ndarray, eps: float = EPS) -> float:
    clipped = window.clip_segment(a, b, eps)
    if clipped is None:
        return 0.0
    return float(np.linalg.norm(clipped[1] - clipped[0]))
