"""
Tests for the tessellation generators, seed streams and typical cells.
"""

import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from config import TEST_SE_BAND, TEST_SEED
from tessnest.exceptions import InvalidInputError
from tessnest.geom2d import ConvexPolygon, Disc, Line
from tessnest.tessellate import (
    SeedStream,
    TessellationKind,
    TessellationSpec,
    WindowShape,
    WindowSpec,
    build_line_tessellation,
    build_voronoi,
    cell_count_in,
    dump_tessellation,
    edge_length_in,
    format_tessellation,
    interior_edges,
    poisson_line_tessellation,
    poisson_voronoi_tessellation,
    sample_isotropic_lines,
    sample_poisson_points,
    typical_cell_statistics,
    typical_voronoi_cell,
)

UNIT = ConvexPolygon.rectangle(0.0, 0.0, 1.0, 1.0)


def _within(values, target, band=TEST_SE_BAND):
    arr = np.asarray(values, dtype=float)
    se = arr.std(ddof=1) / math.sqrt(len(arr))
    return abs(arr.mean() - target) <= band * se


def test_seed_stream_paths():
    """Test 1: Seed streams depend only on (master seed, path)"""
    a = SeedStream(7, (1, 2)).rng().uniform(size=5)
    b = SeedStream(7).child(1).child(2).rng().uniform(size=5)
    c = SeedStream(7, (2, 1)).rng().uniform(size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert SeedStream(7, (1, 2)).seed == SeedStream(7).child(1, 2).seed
    assert SeedStream(7, (1,)).seed != SeedStream(8, (1,)).seed
    with pytest.raises(InvalidInputError):
        SeedStream(-1)
    with pytest.raises(InvalidInputError):
        SeedStream(1, (-3,))


def test_window_spec():
    """Test 2: Window radii, areas and working regions"""
    disc = WindowSpec(WindowShape.DISC, 3.0)
    square = WindowSpec(WindowShape.SQUARE, 3.0)
    assert disc.area == pytest.approx(9.0 * math.pi)
    assert square.area == pytest.approx(36.0)
    assert square.outer_radius == pytest.approx(3.0 * math.sqrt(2.0))
    assert isinstance(disc.window(), Disc)
    assert square.working_region(1.0).area == pytest.approx(64.0)
    assert square.eps(1e-9) == pytest.approx(3e-9 * math.sqrt(2.0))
    with pytest.raises(InvalidInputError):
        WindowSpec(WindowShape.DISC, 0.0)
    with pytest.raises(InvalidInputError):
        square.working_region(-1.0)
    assert str(TessellationSpec(TessellationKind.PVT, 1.0)) == "PVT(1)"
    with pytest.raises(InvalidInputError):
        TessellationSpec(TessellationKind.PLT, -1.0)


def test_sample_isotropic_lines():
    """Test 3: Line counts are Poisson(2 lambda R) and every line hits the disc"""
    assert sample_isotropic_lines(0.0, 5.0, SeedStream(TEST_SEED)) == []
    with pytest.raises(InvalidInputError):
        sample_isotropic_lines(-1.0, 5.0, SeedStream(TEST_SEED))
    root = SeedStream(TEST_SEED, (3,))
    counts = []
    for i in range(10000):
        lines = sample_isotropic_lines(1.0, 10.0, root.child(i))
        assert all(abs(line.p) <= 10.0 and 0.0 <= line.theta < math.pi for line in lines)
        counts.append(len(lines))
    assert 19.7 <= np.mean(counts) <= 20.3


def test_sample_poisson_points():
    """Test 4: Poisson points stay in the rectangle with unit dispersion"""
    rect = (0.0, 0.0, 10.0, 10.0)
    assert sample_poisson_points(0.0, rect, SeedStream(TEST_SEED)).shape == (0, 2)
    with pytest.raises(InvalidInputError):
        sample_poisson_points(-1.0, rect, SeedStream(TEST_SEED))
    with pytest.raises(InvalidInputError):
        sample_poisson_points(1.0, (0.0, 0.0, 0.0, 1.0), SeedStream(TEST_SEED))
    root = SeedStream(TEST_SEED, (4,))
    counts = []
    for i in range(10000):
        pts = sample_poisson_points(1.0, rect, root.child(i))
        assert np.all((pts >= 0.0) & (pts <= 10.0))
        counts.append(len(pts))
    counts = np.array(counts, dtype=float)
    assert 0.95 <= counts.var(ddof=1) / counts.mean() <= 1.05


def test_line_tessellation_small_cases():
    """Test 5: Zero and one line through a square"""
    region = ConvexPolygon.square(1.0)
    empty = build_line_tessellation([], region)
    assert len(empty) == 1
    assert empty.cells[0].equals(region)
    assert interior_edges(empty) == []

    one = build_line_tessellation([Line(0.3, 0.0)], region)
    assert len(one) == 2
    edges = interior_edges(one)
    assert len(edges) == 1
    assert edges[0][1] == (0, 1)
    assert edge_length_in(one, region) == pytest.approx(2.0)
    # ranked by centroid: the left cell comes first
    assert one.cells[0].centroid.x < one.cells[1].centroid.x

    # lines missing the region are ignored
    assert len(build_line_tessellation([Line(5.0, 0.0)], region)) == 1


def test_line_tessellation_euler_count():
    """Test 6: Cell counts obey 1 + lines + interior intersections"""
    rng = np.random.default_rng(TEST_SEED)
    region = ConvexPolygon.square(1.0)
    for _ in range(200):
        n = int(rng.integers(0, 9))
        lines = [Line(float(rng.uniform(-1.3, 1.3)), float(rng.uniform(0.0, math.pi))) for _ in range(n)]
        hits = 0
        for line in lines:
            s = line.signed_distance(region.vertices)
            hits += int(s.min() < 0.0 < s.max())
        crossings = 0
        for i in range(n):
            for j in range(i + 1, n):
                pt = lines[i].intersection(lines[j])
                if pt is not None and abs(pt.x) < 1.0 and abs(pt.y) < 1.0:
                    crossings += 1
        tess = build_line_tessellation(lines, region)
        assert len(tess) == 1 + hits + crossings
        assert sum(c.area for c in tess.cells) == pytest.approx(region.area, rel=1e-9)
        assert all(len(cells) == 2 for _, cells in interior_edges(tess))


def test_poisson_line_tessellation_invariants():
    """Test 7: PLT cell areas fill the region and edges pair up"""
    region = ConvexPolygon.square(6.0)
    tess = poisson_line_tessellation(1.0, region, SeedStream(TEST_SEED, (7,)))
    assert tess.kind is TessellationKind.PLT
    assert tess.line_count > 0
    assert sum(c.area for c in tess.cells) == pytest.approx(region.area, rel=1e-6)
    for edge in tess.edges:
        assert len(edge.cells) == (1 if edge.artificial else 2)
    again = poisson_line_tessellation(1.0, region, SeedStream(TEST_SEED, (7,)))
    assert format_tessellation(tess) == format_tessellation(again)


def test_plt_edge_length_density():
    """Test 8: PLT edge length per area is lambda"""
    spec = WindowSpec(WindowShape.SQUARE, 5.0)
    root = SeedStream(TEST_SEED, (8,))
    values = []
    for i in range(300):
        tess = poisson_line_tessellation(1.0, spec.working_region(), root.child(i))
        values.append(edge_length_in(tess, spec.window()) / spec.area)
    assert _within(values, 1.0)


def test_voronoi_single_and_pair():
    """Test 9: One nucleus gives the region, two nuclei the bisector"""
    single = build_voronoi(np.array([[0.5, 0.5]]), UNIT, guard=1.0)
    assert len(single) == 1
    assert single.cells[0].area == pytest.approx(1.0)
    assert single.uncertified_cells() == [0]

    pair = build_voronoi(np.array([[0.25, 0.5], [0.75, 0.5]]), UNIT, guard=1.0)
    assert len(pair) == 2
    assert [c.area for c in pair.cells] == pytest.approx([0.5, 0.5])
    edges = interior_edges(pair)
    assert len(edges) == 1
    assert edges[0][0].length == pytest.approx(1.0)
    assert edge_length_in(pair, UNIT) == pytest.approx(1.0)

    with pytest.raises(InvalidInputError):
        build_voronoi(np.empty((0, 2)), UNIT, guard=1.0)
    with pytest.raises(InvalidInputError):
        build_voronoi(np.array([[0.5, 0.5]]), UNIT, guard=0.0)


def test_voronoi_nearest_nucleus_oracle():
    """Test 10: Every sample point strictly inside a cell is closest to that cell's nucleus"""
    rng = np.random.default_rng(TEST_SEED + 10)
    for _ in range(20):
        nuclei = rng.uniform(0.0, 1.0, (int(rng.integers(2, 13)), 2))
        tess = build_voronoi(nuclei, UNIT, guard=0.5)
        assert sum(c.area for c in tess.cells) == pytest.approx(1.0, rel=1e-9)
        points = rng.uniform(0.0, 1.0, (5000, 2))
        _, nearest = cKDTree(nuclei).query(points)
        for cell, site in zip(tess.cells, tess.sites):
            j = int(np.flatnonzero(np.all(nuclei == site, axis=1))[0])
            inside = cell.contains(points, eps=-1e-9)
            assert np.all(nearest[inside] == j)


def test_poisson_voronoi_invariants():
    """Test 11: PVT cells are certified, fill the region and are reproducible"""
    region = ConvexPolygon.square(5.0)
    tess = poisson_voronoi_tessellation(1.0, region, SeedStream(TEST_SEED, (11,)))
    assert tess.kind is TessellationKind.PVT
    assert tess.uncertified_cells() == []
    assert sum(c.area for c in tess.cells) == pytest.approx(region.area, rel=1e-6)
    assert all(len(cells) == 2 for _, cells in interior_edges(tess))
    assert len(tess.sites) == len(tess.cells)
    again = poisson_voronoi_tessellation(1.0, region, SeedStream(TEST_SEED, (11,)))
    assert format_tessellation(tess) == format_tessellation(again)


def test_guard_doubling_certifies():
    """Test 12: A too-small guard is doubled until every cell is certified"""
    region = ConvexPolygon.square(3.0)
    tess = poisson_voronoi_tessellation(1.0, region, SeedStream(TEST_SEED, (12,)), guard_multiplier=0.1)
    assert tess.uncertified_cells() == []
    assert tess.guard > 0.1


def test_certified_cells_survive_larger_guard():
    """Test 13: Widening the sampled domain leaves certified cells unchanged"""
    region = ConvexPolygon.square(3.0)
    root = SeedStream(TEST_SEED, (13,))
    for i in range(10):
        pts = sample_poisson_points(1.0, (-9.0, -9.0, 9.0, 9.0), root.child(i))
        near = pts[np.all(np.abs(pts) <= 4.0, axis=1)]
        small = build_voronoi(near, region, guard=1.0)
        large = build_voronoi(pts, region, guard=6.0)
        by_site = {tuple(s): c for s, c in zip(large.sites, large.cells)}
        for cid in range(len(small)):
            if small.is_certified(cid):
                other = by_site[tuple(small.sites[cid])]
                assert small.cells[cid].equals(other, eps=1e-9)


def test_pvt_edge_length_density():
    """Test 14: PVT edge length per area is 2 sqrt(gamma)"""
    spec = WindowSpec(WindowShape.SQUARE, 5.0)
    root = SeedStream(TEST_SEED, (14,))
    values = []
    for i in range(60):
        tess = poisson_voronoi_tessellation(1.0, spec.working_region(), root.child(i))
        values.append(edge_length_in(tess, spec.window()) / spec.area)
    assert _within(values, 2.0)


def test_window_queries():
    """Test 15: Edge length needs a covered window, cell counts use centroids"""
    tess = build_line_tessellation([Line(0.0, 0.0)], ConvexPolygon.square(1.0))
    with pytest.raises(InvalidInputError):
        edge_length_in(tess, Disc(2.0))
    assert edge_length_in(tess, Disc(0.5)) == pytest.approx(1.0)
    assert cell_count_in(tess, Disc(1.0)) == 2
    assert cell_count_in(tess, ConvexPolygon.square(0.4, center=(0.5, 0.0))) == 1
    assert tess.cells_meeting(Disc(0.1, center=(0.5, 0.0))) == [1]


def test_typical_cell_means():
    """Test 16: Typical cell mean area 1/gamma and mean perimeter 4/sqrt(gamma)"""
    stats = typical_cell_statistics(1.0, 1000, SeedStream(TEST_SEED, (16,)))
    assert abs(stats.mean_area - 1.0) <= TEST_SE_BAND * stats.se["area"]
    assert abs(stats.mean_perimeter - 4.0) <= TEST_SE_BAND * stats.se["perimeter"]
    assert abs(stats.mean_vertices - 6.0) <= TEST_SE_BAND * stats.se["vertices"]
    with pytest.raises(InvalidInputError):
        typical_cell_statistics(1.0, 1, SeedStream(TEST_SEED))


def test_typical_cell_scaling():
    """Test 17: The typical cell at intensity gamma is the unit cell scaled by gamma^(-1/2)"""
    root = SeedStream(TEST_SEED, (17,))
    for i in range(20):
        unit = typical_voronoi_cell(1.0, root.child(i))
        dense = typical_voronoi_cell(4.0, root.child(i))
        assert dense.area == pytest.approx(unit.area / 4.0, rel=1e-9)
        assert dense.diameter == pytest.approx(unit.diameter / 2.0, rel=1e-9)
        assert unit.contains(np.zeros(2))[0]
    with pytest.raises(InvalidInputError):
        typical_voronoi_cell(0.0, root)


def test_dump_tessellation(tmp_path):
    """Test 18: Text dump has one line per cell and per interior edge"""
    tess = build_line_tessellation([Line(0.0, 0.0), Line(0.0, 0.5 * math.pi)], ConvexPolygon.square(1.0))
    text = format_tessellation(tess)
    lines = text.splitlines()
    assert lines[0] == "# tessnest plt cells=4 edges=4"
    assert sum(line.startswith("cell ") for line in lines) == 4
    assert sum(line.startswith("edge ") for line in lines) == 4
    path = tmp_path / "tess.txt"
    dump_tessellation(tess, path)
    assert path.read_text(encoding="utf-8") == text
