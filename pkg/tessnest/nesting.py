"""
Nested tessellations and their facet functionals.

Every cell of the initial tessellation X is subdivided by its own independent
copy of the component tessellation X0. The crossing count of a cell is the
number of points where edges of its component copy meet the cell boundary
inside the window; Z is the sum over all cells meeting the window.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .defaults import GUARD_MULTIPLIER, MAX_GUARD_DOUBLINGS
from .exceptions import ExactnessError, InvalidInputError
from .geom2d import (
    ARTIFICIAL,
    EPS,
    ConvexPolygon,
    Line,
    Segment,
    Window,
    merge_points,
    pairwise_segment_intersections,
    smallest_enclosing_disc,
)
from .moments import component_section_intensity
from .tessellate import (
    PlanarTessellation,
    SeedStream,
    TessellationKind,
    TessellationSpec,
    poisson_voronoi_tessellation,
    sample_line_arrays,
)

logger = logging.getLogger("tessnest")


@dataclass(frozen=True)
class ModelSpec:
    """An X/X0-nesting: initial tessellation X and component tessellation X0."""

    initial: TessellationSpec
    component: TessellationSpec

    def __str__(self) -> str:
        return f"{self.initial}/{self.component}"


@dataclass(frozen=True)
class ComponentEdges:
    """
    Edges of one component copy near a cell.

    Lines of a PLT component are stored as chords of the cell's enclosing
    disc, so both kinds are handled as segment arrays.
    """

    kind: TessellationKind
    starts: np.ndarray
    ends: np.ndarray
    lines: Tuple[Line, ...] = ()

    def __len__(self) -> int:
        return len(self.starts)

    def segments(self) -> List[Segment]:
        return [Segment.from_arrays(a, b) for a, b in zip(self.starts, self.ends)]


@dataclass(frozen=True)
class CellCrossing:
    cell_id: int
    theta: int
    boundary_length: float


@dataclass(frozen=True)
class CrossingResult:
    """
    Attributes:
        z_total: Z = sum of the per-cell crossing counts
        per_cell: Crossing count and boundary length in W of every cell meeting W
        cells_touched: Number of cells meeting W
    """

    z_total: int
    per_cell: Tuple[CellCrossing, ...]
    cells_touched: int


def _empty(kind: TessellationKind) -> ComponentEdges:
    return ComponentEdges(kind, np.empty((0, 2)), np.empty((0, 2)))


def _plt_component(lam: float, cell: ConvexPolygon, seeds: SeedStream) -> ComponentEdges:
    center, radius = smallest_enclosing_disc(cell)
    p, theta = sample_line_arrays(lam, radius, seeds.rng())
    normal = np.column_stack([np.cos(theta), np.sin(theta)])
    direction = np.column_stack([-np.sin(theta), np.cos(theta)])
    foot = center + p[:, None] * normal
    # chords slightly longer than the disc so tangent hits at the rim still register
    half = np.sqrt(np.maximum(radius**2 - p**2, 0.0)) + 1e-6 * radius
    lines = tuple(Line.normalized(float(pi + center @ n), float(t)) for pi, n, t in zip(p, normal, theta))
    return ComponentEdges(
        TessellationKind.PLT,
        foot - half[:, None] * direction,
        foot + half[:, None] * direction,
        lines,
    )


def _pvt_component(
    gamma: float,
    cell: ConvexPolygon,
    seeds: SeedStream,
    guard_multiplier: float,
    max_doublings: int,
    eps: float,
) -> ComponentEdges:
    xmin, ymin, xmax, ymax = cell.bounding_box
    pad = 0.01 * math.hypot(xmax - xmin, ymax - ymin)
    box = ConvexPolygon.rectangle(xmin - pad, ymin - pad, xmax + pad, ymax + pad)
    tess = poisson_voronoi_tessellation(gamma, box, seeds, guard_multiplier, max_doublings, eps)
    if tess.uncertified_cells():
        raise ExactnessError("component Voronoi cells could not be certified")
    inner = [e.segment.as_array() for e in tess.edges if not e.artificial]
    if not inner:
        return _empty(TessellationKind.PVT)
    arr = np.array(inner)
    return ComponentEdges(TessellationKind.PVT, arr[:, 0], arr[:, 1])


def component_edges_for_cell(
    component: TessellationSpec,
    cell: ConvexPolygon,
    seeds: SeedStream,
    guard_multiplier: float = GUARD_MULTIPLIER,
    max_doublings: int = MAX_GUARD_DOUBLINGS,
    eps: float = EPS,
) -> ComponentEdges:
    """
    Sample the component copy of one cell, restricted to a neighbourhood of the cell.

    Args:
        component: Component kind and intensity
        cell: Cell of the initial tessellation
        seeds: Seed stream of this cell
        guard_multiplier: Voronoi guard in units of 1/sqrt(intensity)
        max_doublings: Voronoi guard doublings before giving up
        eps: Geometric tolerance

    Returns:
        PLT: every line hitting the smallest disc enclosing the cell.
        PVT: interior edges of a certified Voronoi tessellation on the cell's
        bounding box.
    """
    if component.intensity == 0.0:
        return _empty(component.kind)
    if component.kind is TessellationKind.PLT:
        return _plt_component(component.intensity, cell, seeds)
    return _pvt_component(component.intensity, cell, seeds, guard_multiplier, max_doublings, eps)


def boundary_in_window(
    cell: ConvexPolygon, window: Optional[Window], eps: float = EPS
) -> Tuple[np.ndarray, np.ndarray]:
    """Pieces of the cell's genuine (non-artificial) edges inside the window."""
    starts, ends = cell.edge_arrays()
    keep = cell.labels != ARTIFICIAL
    starts, ends = starts[keep], ends[keep]
    if window is None:
        return starts, ends
    a_out: List[np.ndarray] = []
    b_out: List[np.ndarray] = []
    for a, b in zip(starts, ends):
        clipped = window.clip_segment(a, b, eps)
        if clipped is not None:
            a_out.append(clipped[0])
            b_out.append(clipped[1])
    if not a_out:
        return np.empty((0, 2)), np.empty((0, 2))
    return np.array(a_out), np.array(b_out)


def cell_crossing_count(
    edges: ComponentEdges, cell: ConvexPolygon, window: Optional[Window] = None, eps: float = EPS
) -> int:
    """
    Number of distinct points where component edges meet the cell boundary inside the window.

    Artificial cell edges are ignored; points closer than eps are merged. With
    ``window=None`` the whole boundary counts.
    """
    if len(edges) == 0:
        return 0
    starts, ends = boundary_in_window(cell, window, eps)
    if len(starts) == 0:
        return 0
    pts, _, _ = pairwise_segment_intersections(edges.starts, edges.ends, starts, ends, eps)
    return int(len(merge_points(pts, eps)))


def total_Z(
    initial_tess: PlanarTessellation,
    spec: ModelSpec,
    window: Window,
    seeds: SeedStream,
    guard_multiplier: float = GUARD_MULTIPLIER,
    max_doublings: int = MAX_GUARD_DOUBLINGS,
    eps: float = EPS,
) -> CrossingResult:
    """
    Z(W): crossings summed over every cell meeting the window.

    Cell ``i`` draws its component from ``seeds.child(i)``; cell ids are ranks
    in lexicographic centroid order, so the result does not depend on the
    order in which cells are visited.

    Raises:
        ExactnessError: A cell meeting the window is not certified
    """
    touched = initial_tess.cells_meeting(window, eps)
    for cid in touched:
        if not initial_tess.is_certified(cid):
            raise ExactnessError("uncertified cell meets the window; enlarge the guard", cell=cid)

    per_cell: List[CellCrossing] = []
    for cid in touched:
        cell = initial_tess.cells[cid]
        starts, ends = boundary_in_window(cell, window, eps)
        length = float(np.sum(np.linalg.norm(ends - starts, axis=1))) if len(starts) else 0.0
        theta = 0
        if length > 0.0 and spec.component.intensity > 0.0:
            edges = component_edges_for_cell(
                spec.component, cell, seeds.child(cid), guard_multiplier, max_doublings, eps
            )
            theta = cell_crossing_count(edges, cell, window, eps)
        per_cell.append(CellCrossing(cid, theta, length))

    z = sum(c.theta for c in per_cell)
    logger.debug(f"Z = {z} over {len(touched)} cells")
    return CrossingResult(z_total=z, per_cell=tuple(per_cell), cells_touched=len(touched))


def conditional_mean(
    tess: PlanarTessellation, spec: ModelSpec, window: Window, eps: float = EPS
) -> float:
    """
    E[Z | X] = lambda_0^(1,2) times the total cell-boundary length in W.

    Every interior edge borders two cells, so this equals
    lambda_0 * 2 * (edge length of X in W).
    """
    lam0 = component_section_intensity(spec.component.kind, spec.component.intensity, 2, 1)
    total = 0.0
    for cid in tess.cells_meeting(window, eps):
        starts, ends = boundary_in_window(tess.cells[cid], window, eps)
        if len(starts):
            total += float(np.sum(np.linalg.norm(ends - starts, axis=1)))
    return lam0 * total


def _line_arrays(lines: Sequence[Line]) -> Tuple[np.ndarray, np.ndarray]:
    p = np.array([ln.p for ln in lines], dtype=float)
    theta = np.array([ln.theta for ln in lines], dtype=float)
    return p, theta


def line_length_in_disc(lines: Sequence[Line], rho: float) -> float:
    """Total chord length of the lines inside the disc B_rho."""
    if not rho > 0.0:
        raise InvalidInputError(f"rho must be positive, got {rho}", "rho")
    if not lines:
        return 0.0
    p, _ = _line_arrays(lines)
    inside = np.abs(p) < rho
    return float(np.sum(2.0 * np.sqrt(rho**2 - p[inside] ** 2)))


def pair_intersections_in_disc(lines: Sequence[Line], rho: float) -> int:
    """Number of unordered line pairs meeting inside the open disc B_rho."""
    if not rho > 0.0:
        raise InvalidInputError(f"rho must be positive, got {rho}", "rho")
    if len(lines) < 2:
        return 0
    p, theta = _line_arrays(lines)
    i, j = np.triu_indices(len(lines), k=1)
    det = np.sin(theta[j] - theta[i])
    ok = np.abs(det) > 1e-12
    safe = np.where(ok, det, 1.0)
    x = (p[i] * np.sin(theta[j]) - p[j] * np.sin(theta[i])) / safe
    y = (p[j] * np.cos(theta[i]) - p[i] * np.cos(theta[j])) / safe
    return int(np.count_nonzero(ok & (x * x + y * y < rho * rho)))
