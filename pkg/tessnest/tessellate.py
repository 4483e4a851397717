"""
Random planar tessellations.

Generators for the stationary isotropic Poisson line tessellation (PLT) and
the Poisson-Voronoi tessellation (PVT) inside a convex working region, the
typical Voronoi cell, and the splittable seed stream every sampler draws from.

Cells are numbered by rank in lexicographic centroid order, so cell ids do not
depend on construction order.
"""

import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from .defaults import EPSILON_SCALE, GUARD_MULTIPLIER, MAX_GUARD_DOUBLINGS
from .exceptions import GeometryError, InvalidInputError
from .geom2d import (
    ARTIFICIAL,
    EPS,
    BoundingBox,
    ConvexPolygon,
    Disc,
    Line,
    Segment,
    Window,
    clip_halfplane,
    clip_to_window,
    segment_length_inside,
    split_by_line,
)

logger = logging.getLogger("tessnest")

_MASK64 = (1 << 64) - 1

KeyFn = Callable[[int, int], Tuple[Tuple[int, ...], np.ndarray]]


class TessellationKind(str, Enum):
    PLT = "plt"
    PVT = "pvt"


class WindowShape(str, Enum):
    DISC = "disc"
    SQUARE = "square"


@dataclass(frozen=True)
class SeedStream:
    """
    Splittable deterministic seed source.

    The draws of ``SeedStream(master, path)`` depend only on the master seed and
    the index path, never on the order in which streams are consumed. Paths are
    mapped onto numpy ``SeedSequence`` spawn keys.

    Attributes:
        master_seed: 64-bit master seed
        path: Index path, e.g. (rung, replicate, stage, cell rank)
    """

    master_seed: int
    path: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _MASK64:
            raise InvalidInputError(f"seed {self.master_seed} is not a 64-bit unsigned integer", "seed")
        if any(i < 0 for i in self.path):
            raise InvalidInputError(f"negative index in seed path {self.path}", "seed")

    def child(self, *idx: int) -> "SeedStream":
        return SeedStream(self.master_seed, self.path + tuple(int(i) for i in idx))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master_seed, spawn_key=self.path)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.sequence())

    @property
    def seed(self) -> int:
        """64-bit digest of (master_seed, path), recorded next to results."""
        return int(self.sequence().generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class WindowSpec:
    """
    Sampling window W_rho = rho * W_1.

    W_1 is the unit disc (inner and outer radius 1) or the square of side 2
    centred at the origin (inner radius 1, outer radius sqrt 2).
    """

    shape: WindowShape
    rho: float

    def __post_init__(self) -> None:
        if not (self.rho > 0.0 and math.isfinite(self.rho)):
            raise InvalidInputError(f"rho must be positive, got {self.rho}", "window.rho")

    @property
    def inner_radius(self) -> float:
        return self.rho

    @property
    def outer_radius(self) -> float:
        return self.rho if self.shape is WindowShape.DISC else self.rho * math.sqrt(2.0)

    @property
    def area(self) -> float:
        if self.shape is WindowShape.DISC:
            return math.pi * self.rho**2
        return 4.0 * self.rho**2

    def window(self) -> Window:
        if self.shape is WindowShape.DISC:
            return Disc(self.rho)
        return ConvexPolygon.square(self.rho)

    def working_region(self, margin: float = 0.0) -> ConvexPolygon:
        """W+ = bounding square of the window grown by ``margin``."""
        if margin < 0.0:
            raise InvalidInputError(f"margin must be non-negative, got {margin}", "window.margin")
        return ConvexPolygon.square(self.rho + margin)

    def eps(self, scale: float = EPSILON_SCALE) -> float:
        return scale * self.outer_radius


@dataclass(frozen=True)
class TessellationSpec:
    """Kind and intensity of one tessellation (lambda for PLT, gamma for PVT)."""

    kind: TessellationKind
    intensity: float

    def __post_init__(self) -> None:
        if not (self.intensity >= 0.0 and math.isfinite(self.intensity)):
            raise InvalidInputError(f"intensity must be non-negative, got {self.intensity}", "intensity")

    def __str__(self) -> str:
        return f"{self.kind.value.upper()}({self.intensity:g})"


@dataclass(frozen=True)
class Edge:
    """
    One deduplicated tessellation edge.

    Attributes:
        segment: Edge geometry
        cells: Incident cell ids (two for interior edges, one for artificial ones)
        artificial: True when the edge lies on the working-region boundary
    """

    segment: Segment
    cells: Tuple[int, ...]
    artificial: bool


@dataclass(frozen=True)
class PlanarTessellation:
    """
    Cells of a tessellation clipped to a working region.

    For Voronoi tessellations ``sites[i]`` is the nucleus of cell ``i`` and
    ``certified[i]`` tells whether the cell is known to equal its
    infinite-volume counterpart.
    """

    kind: TessellationKind
    cells: Tuple[ConvexPolygon, ...]
    edges: Tuple[Edge, ...]
    working_region: ConvexPolygon
    sites: Optional[np.ndarray] = None
    certified: Tuple[bool, ...] = ()
    guard: float = 0.0
    line_count: int = 0

    def __len__(self) -> int:
        return len(self.cells)

    def is_certified(self, cell_id: int) -> bool:
        return not self.certified or self.certified[cell_id]

    def uncertified_cells(self) -> List[int]:
        return [i for i, ok in enumerate(self.certified) if not ok]

    def cells_meeting(self, window: Window, eps: float = EPS) -> List[int]:
        return [i for i, c in enumerate(self.cells) if window.intersects(c, eps)]


# sampling


def sample_line_arrays(
    lam: float, radius: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """(p, theta) arrays of an isotropic Poisson line process restricted to B_radius."""
    count = rng.poisson(2.0 * lam * radius)
    p = rng.uniform(-radius, radius, count)
    theta = rng.uniform(0.0, math.pi, count)
    return p, theta


def sample_isotropic_lines(lam: float, radius: float, seeds: SeedStream) -> List[Line]:
    """
    Isotropic Poisson lines of intensity ``lam`` hitting the disc of radius ``radius``.

    Args:
        lam: Line intensity (mean length per unit area)
        radius: Disc radius R
        seeds: Seed stream

    Returns:
        Poisson(2 lam R) lines with p ~ U(-R, R) and theta ~ U[0, pi)
    """
    if not (lam >= 0.0 and math.isfinite(lam)):
        raise InvalidInputError(f"line intensity must be non-negative, got {lam}", "lambda")
    if not radius > 0.0:
        raise InvalidInputError(f"radius must be positive, got {radius}", "radius")
    if lam == 0.0:
        return []
    p, theta = sample_line_arrays(lam, radius, seeds.rng())
    return [Line(float(pi), float(ti)) for pi, ti in zip(p, theta)]


def _check_box(rect: BoundingBox) -> None:
    xmin, ymin, xmax, ymax = rect
    if not (xmax > xmin and ymax > ymin):
        raise InvalidInputError(f"degenerate rectangle {rect}", "rect")


def _poisson_in_box(gamma: float, rect: BoundingBox, rng: np.random.Generator) -> np.ndarray:
    xmin, ymin, xmax, ymax = rect
    count = rng.poisson(gamma * (xmax - xmin) * (ymax - ymin))
    return np.column_stack([rng.uniform(xmin, xmax, count), rng.uniform(ymin, ymax, count)])


def sample_poisson_points(gamma: float, rect: BoundingBox, seeds: SeedStream) -> np.ndarray:
    """
    Homogeneous Poisson points on an axis-aligned rectangle.

    Args:
        gamma: Point intensity
        rect: (xmin, ymin, xmax, ymax)
        seeds: Seed stream

    Returns:
        Array of shape (n, 2) with n ~ Poisson(gamma * area)
    """
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise InvalidInputError(f"point intensity must be non-negative, got {gamma}", "gamma")
    _check_box(rect)
    if gamma == 0.0:
        return np.empty((0, 2))
    return _poisson_in_box(gamma, rect, seeds.rng())


def _grow(rect: BoundingBox, margin: float) -> BoundingBox:
    return rect[0] - margin, rect[1] - margin, rect[2] + margin, rect[3] + margin


def _artificial(poly: ConvexPolygon) -> ConvexPolygon:
    return poly.with_labels(np.full(len(poly), ARTIFICIAL))


# assembly


def _rank_cells(cells: List[ConvexPolygon]) -> np.ndarray:
    centroids = np.array([[c.centroid.x, c.centroid.y] for c in cells])
    return np.lexsort((centroids[:, 1], centroids[:, 0]))


def _pair_edges(
    cells: Sequence[ConvexPolygon], key_of: KeyFn, tol: float
) -> Tuple[Edge, ...]:
    """
    Deduplicate cell edges into tessellation edges.

    Non-artificial edges sharing a key are sorted along their common carrier
    and paired consecutively; each pair must have matching endpoints.
    """
    groups: Dict[Tuple[int, ...], List[Tuple[float, int, np.ndarray, np.ndarray]]] = defaultdict(list)
    edges: List[Edge] = []
    for cid, cell in enumerate(cells):
        starts, ends = cell.edge_arrays()
        for k, label in enumerate(cell.labels):
            a, b = starts[k], ends[k]
            if label == ARTIFICIAL:
                edges.append(Edge(Segment.from_arrays(a, b), (cid,), True))
                continue
            key, direction = key_of(cid, int(label))
            mid = 0.5 * (a + b)
            groups[key].append((float(mid @ direction), cid, a, b))

    for key in sorted(groups):
        items = sorted(groups[key], key=lambda item: (item[0], item[1]))
        if len(items) % 2:
            raise GeometryError(f"edge group {key} has {len(items)} sides, expected an even count")
        for first, second in zip(items[0::2], items[1::2]):
            _, c1, a1, b1 = first
            _, c2, a2, b2 = second
            # neighbouring cells traverse a shared edge in opposite directions
            mismatch = max(np.linalg.norm(a1 - b2), np.linalg.norm(b1 - a2))
            if mismatch > tol or c1 == c2:
                raise GeometryError(
                    f"edges of cells {c1} and {c2} on {key} do not match (gap {mismatch:.3g})"
                )
            edges.append(Edge(Segment.from_arrays(a1, b1), tuple(sorted((c1, c2))), False))
    return tuple(edges)


def _pairing_tol(region: ConvexPolygon, eps: float) -> float:
    return max(1e3 * eps, 1e-9 * region.circumradius())


def build_line_tessellation(
    lines: Sequence[Line], region: ConvexPolygon, eps: float = EPS
) -> PlanarTessellation:
    """
    Faces of a line arrangement inside a convex region.

    Cells are built by splitting every current cell with each line in turn;
    the edge cut by line ``i`` carries label ``i``.

    Args:
        lines: Lines of the arrangement
        region: Working region W+
        eps: Geometric tolerance

    Returns:
        PLT-kind tessellation
    """
    cells: List[ConvexPolygon] = [_artificial(region)]
    hits = 0
    for i, line in enumerate(lines):
        s = line.signed_distance(region.vertices)
        if s.max() <= eps or s.min() >= -eps:
            continue
        hits += 1
        split: List[ConvexPolygon] = []
        for cell in cells:
            left, right = split_by_line(cell, line, label=i, eps=eps)
            if left is not None:
                split.append(left)
            if right is not None:
                split.append(right)
        cells = split

    order = _rank_cells(cells)
    cells = [cells[i] for i in order]
    directions = {i: line.direction for i, line in enumerate(lines)}

    def key_of(cid: int, label: int) -> Tuple[Tuple[int, ...], np.ndarray]:
        return (label,), directions[label]

    edges = _pair_edges(cells, key_of, _pairing_tol(region, eps))
    logger.debug(f"line tessellation: {hits} lines, {len(cells)} cells, {len(edges)} edges")
    return PlanarTessellation(
        kind=TessellationKind.PLT,
        cells=tuple(cells),
        edges=edges,
        working_region=region,
        line_count=hits,
    )


def poisson_line_tessellation(
    lam: float, region: ConvexPolygon, seeds: SeedStream, eps: float = EPS
) -> PlanarTessellation:
    """PLT of intensity ``lam`` on ``region``; lines are sampled on the disc around the origin covering it."""
    radius = region.circumradius()
    return build_line_tessellation(sample_isotropic_lines(lam, radius, seeds), region, eps)


def _bisector_clip(
    cell: Optional[ConvexPolygon],
    site: np.ndarray,
    nuclei: np.ndarray,
    neighbours: Sequence[int],
    done: Set[int],
    eps: float,
) -> Optional[ConvexPolygon]:
    for j in neighbours:
        if cell is None:
            return None
        if j in done:
            continue
        done.add(j)
        other = nuclei[j]
        normal = other - site
        offset = 0.5 * float(other @ other - site @ site)
        cell = clip_halfplane(cell, normal, offset, label=int(j), eps=eps)
    return cell


def voronoi_cell(
    index: int,
    nuclei: np.ndarray,
    tree: cKDTree,
    domain: ConvexPolygon,
    eps: float = EPS,
    k: int = 12,
) -> Optional[ConvexPolygon]:
    """
    Voronoi cell of ``nuclei[index]`` within ``domain``.

    The domain is cut by the bisectors of the nearest nuclei, then by every
    nucleus closer than twice the current cell radius until that set stops
    growing. Edge labels are neighbour indices; domain edges stay ARTIFICIAL.
    """
    site = nuclei[index]
    n = len(nuclei)
    done: Set[int] = {index}
    _, near = tree.query(site, k=min(k, n))
    near = np.atleast_1d(near)
    cell: Optional[ConvexPolygon] = _bisector_clip(domain, site, nuclei, [int(j) for j in near if j < n], done, eps)
    while cell is not None:
        reach = 2.0 * cell.circumradius(site)
        candidates = [j for j in tree.query_ball_point(site, reach) if j not in done]
        if not candidates:
            break
        candidates.sort(key=lambda j: float(np.sum((nuclei[j] - site) ** 2)))
        cell = _bisector_clip(cell, site, nuclei, candidates, done, eps)
    return cell


def _flower_certified(cell: ConvexPolygon, site: np.ndarray, domain: BoundingBox) -> bool:
    """Every vertex disc B(v, |v - site|) lies inside the sampled domain."""
    v = cell.vertices
    reach = np.linalg.norm(v - site, axis=1)
    room = np.minimum.reduce(
        [v[:, 0] - domain[0], v[:, 1] - domain[1], domain[2] - v[:, 0], domain[3] - v[:, 1]]
    )
    return bool(np.all(reach < room))


def build_voronoi(
    nuclei: np.ndarray, region: ConvexPolygon, guard: float, eps: float = EPS
) -> PlanarTessellation:
    """
    Voronoi tessellation of the nuclei, restricted to the cells meeting ``region``.

    Nuclei are assumed to be sampled on bbox(region) grown by ``guard``. A cell
    is certified when its flower (the union of the discs centred at its
    vertices through its nucleus) lies inside that sampled domain, so no unseen
    nucleus can change it.

    Args:
        nuclei: Array of shape (n, 2)
        region: Working region W+
        guard: Guard width g > 0
        eps: Geometric tolerance

    Returns:
        PVT-kind tessellation with sites and certification flags
    """
    pts = np.asarray(nuclei, dtype=float).reshape(-1, 2)
    if len(pts) < 1:
        raise InvalidInputError("at least one nucleus is required", "nuclei")
    if not guard > 0.0:
        raise InvalidInputError(f"guard must be positive, got {guard}", "guard")
    box = _grow(region.bounding_box, guard)
    domain = _artificial(ConvexPolygon.rectangle(*box))
    tree = cKDTree(pts)

    inside = np.flatnonzero(region.contains(pts, eps))
    if inside.size == 0:
        c = region.centroid
        _, nearest = tree.query([c.x, c.y])
        inside = np.array([int(nearest)])
    queue = deque(int(i) for i in inside)
    seen: Set[int] = set(queue)
    built: Dict[int, Tuple[ConvexPolygon, bool]] = {}
    while queue:
        i = queue.popleft()
        full = voronoi_cell(i, pts, tree, domain, eps)
        if full is None:
            continue
        clipped = clip_to_window(full, region, eps)
        if clipped is None:
            continue
        built[i] = (clipped, _flower_certified(full, pts[i], box))
        for j in full.labels:
            if j != ARTIFICIAL and int(j) not in seen:
                seen.add(int(j))
                queue.append(int(j))

    ids = sorted(built)
    cells = [built[i][0] for i in ids]
    order = _rank_cells(cells)
    ids = [ids[r] for r in order]
    cells = [cells[r] for r in order]
    certified = tuple(built[i][1] for i in ids)
    cell_of = {nucleus: cid for cid, nucleus in enumerate(ids)}

    def key_of(cid: int, label: int) -> Tuple[Tuple[int, ...], np.ndarray]:
        mine = ids[cid]
        if label not in cell_of:
            raise GeometryError(f"cell {cid} borders nucleus {label} whose cell was not built")
        d = pts[label] - pts[mine]
        return (min(mine, label), max(mine, label)), np.array([-d[1], d[0]]) * (1 if mine < label else -1)

    edges = _pair_edges(cells, key_of, _pairing_tol(region, eps))
    if len(pts) == 1:
        certified = (False,)
    logger.debug(
        f"voronoi: {len(pts)} nuclei, {len(cells)} cells, "
        f"{certified.count(False)} uncertified, guard {guard:g}"
    )
    return PlanarTessellation(
        kind=TessellationKind.PVT,
        cells=tuple(cells),
        edges=edges,
        working_region=region,
        sites=pts[ids],
        certified=certified,
        guard=guard,
    )


def poisson_voronoi_tessellation(
    gamma: float,
    region: ConvexPolygon,
    seeds: SeedStream,
    guard_multiplier: float = GUARD_MULTIPLIER,
    max_doublings: int = MAX_GUARD_DOUBLINGS,
    eps: float = EPS,
) -> PlanarTessellation:
    """
    PVT of cell intensity ``gamma`` on ``region`` with automatic guard doubling.

    Nuclei are sampled on bbox(region) grown by g = guard_multiplier / sqrt(gamma).
    While some cell is uncertified the guard is doubled and the new ring is
    filled from the next stage seed, keeping the points already drawn. After
    ``max_doublings`` the flags are left in place for the caller to act on.
    """
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise InvalidInputError(f"cell intensity must be positive, got {gamma}", "gamma")
    guard = guard_multiplier / math.sqrt(gamma)
    rect = _grow(region.bounding_box, guard)
    pts = sample_poisson_points(gamma, rect, seeds.child(0))
    stage = 0
    while True:
        if len(pts):
            tess = build_voronoi(pts, region, guard, eps)
            pending = tess.uncertified_cells()
            if not pending:
                return tess
            if stage >= max_doublings:
                logger.warning(
                    f"{len(pending)} Voronoi cells still uncertified after {stage} guard doublings"
                )
                return tess
        elif stage >= max_doublings:
            raise InvalidInputError("no nuclei sampled in the guarded region", "gamma")
        stage += 1
        guard *= 2.0
        bigger = _grow(region.bounding_box, guard)
        ring = sample_poisson_points(gamma, bigger, seeds.child(stage))
        old = rect
        outside = ~(
            (ring[:, 0] >= old[0]) & (ring[:, 0] <= old[2]) & (ring[:, 1] >= old[1]) & (ring[:, 1] <= old[3])
        )
        pts = np.vstack([pts, ring[outside]])
        rect = bigger
        logger.debug(f"guard doubled to {guard:g} (stage {stage}, {len(pts)} nuclei)")


# queries


def interior_edges(tess: PlanarTessellation) -> List[Tuple[Segment, Tuple[int, int]]]:
    """Deduplicated non-artificial edges with their two incident cells."""
    out: List[Tuple[Segment, Tuple[int, int]]] = []
    for edge in tess.edges:
        if edge.artificial:
            continue
        if len(edge.cells) != 2:
            raise GeometryError(f"interior edge with {len(edge.cells)} incident cells")
        out.append((edge.segment, (edge.cells[0], edge.cells[1])))
    return out


def edge_length_in(tess: PlanarTessellation, window: Window, eps: float = EPS) -> float:
    """Total length of interior edges inside ``window``, each edge counted once."""
    if not tess.working_region.covers(window, eps):
        raise InvalidInputError("window exceeds the working region", "window")
    total = 0.0
    for seg, _ in interior_edges(tess):
        arr = seg.as_array()
        total += segment_length_inside(window, arr[0], arr[1], eps)
    return total


def cell_count_in(tess: PlanarTessellation, window: Window, eps: float = EPS) -> int:
    """Number of cells whose centroid lies in ``window``."""
    if not tess.cells:
        return 0
    centroids = np.array([[c.centroid.x, c.centroid.y] for c in tess.cells])
    return int(np.count_nonzero(window.contains(centroids, eps)))


# typical cell


def _uniform_in_disc(count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def typical_voronoi_cell(
    gamma: float, seeds: SeedStream, initial_radius: float = 4.0, max_doublings: int = 16
) -> ConvexPolygon:
    """
    Typical cell of a PVT of intensity ``gamma``.

    A nucleus is added at the origin to a Poisson process on the disc of radius
    R = initial_radius / sqrt(gamma). The cell is exact once 2 max|v| <= R; until
    then R is doubled and the annulus filled from the next stage seed.
    """
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise InvalidInputError(f"cell intensity must be positive, got {gamma}", "gamma")
    radius = initial_radius / math.sqrt(gamma)
    rng = seeds.child(0).rng()
    pts = _uniform_in_disc(rng.poisson(gamma * math.pi * radius**2), radius, rng)
    for stage in range(max_doublings + 1):
        domain = _artificial(ConvexPolygon.square(radius))
        nuclei = np.vstack([np.zeros((1, 2)), pts])
        cell = voronoi_cell(0, nuclei, cKDTree(nuclei), domain, eps=EPS * radius)
        if cell is not None and 2.0 * cell.circumradius() <= radius:
            return cell
        rng = seeds.child(stage + 1).rng()
        bigger = 2.0 * radius
        ring = _uniform_in_disc(rng.poisson(gamma * math.pi * bigger**2), bigger, rng)
        pts = np.vstack([pts, ring[np.linalg.norm(ring, axis=1) > radius]])
        radius = bigger
    raise GeometryError(f"typical cell not certified after {max_doublings} doublings")


@dataclass(frozen=True)
class TypicalCellStats:
    """Sample means (and standard errors) of typical-cell characteristics."""

    samples: int
    mean_area: float
    mean_perimeter: float
    mean_diameter: float
    mean_vertices: float
    se: Dict[str, float] = field(default_factory=dict)


def typical_cell_statistics(gamma: float, samples: int, seeds: SeedStream) -> TypicalCellStats:
    """Mean area, perimeter, diameter and vertex count of ``samples`` typical cells."""
    if samples < 2:
        raise InvalidInputError(f"need at least 2 samples, got {samples}", "samples")
    data = np.empty((samples, 4))
    for i in range(samples):
        cell = typical_voronoi_cell(gamma, seeds.child(i))
        data[i] = (cell.area, cell.perimeter, cell.diameter, len(cell))
    means = data.mean(axis=0)
    ses = data.std(axis=0, ddof=1) / math.sqrt(samples)
    names = ("area", "perimeter", "diameter", "vertices")
    return TypicalCellStats(
        samples=samples,
        mean_area=float(means[0]),
        mean_perimeter=float(means[1]),
        mean_diameter=float(means[2]),
        mean_vertices=float(means[3]),
        se={name: float(s) for name, s in zip(names, ses)},
    )


# debug dump


def format_tessellation(tess: PlanarTessellation) -> str:
    """
    Line-oriented text form of a tessellation.

    One ``cell <id> x1 y1 x2 y2 ...`` line per cell and one
    ``edge x1 y1 x2 y2 c1 c2`` line per interior edge, floats in repr form.
    """
    lines = [f"# tessnest {tess.kind.value} cells={len(tess.cells)} edges={len(interior_edges(tess))}"]
    for cid, cell in enumerate(tess.cells):
        coords = " ".join(repr(float(x)) for x in cell.vertices.ravel())
        lines.append(f"cell {cid} {coords}")
    for seg, (c1, c2) in interior_edges(tess):
        a, b = seg.a, seg.b
        lines.append(f"edge {a.x!r} {a.y!r} {b.x!r} {b.y!r} {c1} {c2}")
    return "\n".join(lines) + "\n"


def dump_tessellation(tess: PlanarTessellation, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_tessellation(tess))
