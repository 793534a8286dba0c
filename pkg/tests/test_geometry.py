import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmplan.geometry import (
    OUTSIDE,
    MeshError,
    ParseError,
    TopologyError,
    TriangulationError,
    constrained_delaunay,
    dump_domain,
    generate_dense_mesh,
    load_domain,
    make_domain,
    point_location,
    signed_area,
)

from conftest import ngon

SQUARE = "outer 4\n0 0\n1 0\n1 1\n0 1\n"


# -- domains -------------------------------------------------------------------

def test_load_unit_square():
    d = load_domain(SQUARE)
    assert len(d.outer) == 4 and d.holes == ()
    assert signed_area(d.outer) == pytest.approx(1.0)


def test_load_reorients_cw_outer():
    d = load_domain("outer 4\n0 0\n0 1\n1 1\n1 0\n")
    assert signed_area(d.outer) > 0


def test_holes_are_made_clockwise():
    d = make_domain([(0, 0), (3, 0), (3, 3), (0, 3)], [[(1, 1), (2, 1), (2, 2), (1, 2)]])
    assert signed_area(d.holes[0]) < 0


def test_hole_outside_is_rejected():
    text = SQUARE + "hole 3\n0.2 0.2\n0.4 0.2\n1.5 0.5\n"
    with pytest.raises(TopologyError):
        load_domain(text)


def test_self_intersecting_outer_rejected():
    with pytest.raises(TopologyError):
        make_domain([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_intersecting_holes_rejected():
    outer = [(0, 0), (4, 0), (4, 4), (0, 4)]
    h1 = [(1, 1), (2, 1), (2, 2), (1, 2)]
    h2 = [(1.5, 1.5), (2.5, 1.5), (2.5, 2.5), (1.5, 2.5)]
    with pytest.raises(TopologyError):
        make_domain(outer, [h1, h2])


@pytest.mark.parametrize("text", [
    "outer 4\n0 0\n1 0\n1 1\n",
    "outer x\n0 0\n",
    "outer 3\n0 0\n1 zero\n0 1\n",
    "polygon 3\n0 0\n1 0\n0 1\n",
    "hole 3\n0 0\n1 0\n0 1\n",
])
def test_malformed_domain_files(text):
    with pytest.raises(ParseError):
        load_domain(text)


def test_domain_roundtrip(holed_domain):
    again = load_domain(dump_domain(holed_domain))
    assert np.array_equal(again.outer, holed_domain.outer)
    assert np.array_equal(again.holes[0], holed_domain.holes[0])


# -- triangulation --------------------------------------------------------------

def _incircle_strict(a, b, c, d, tol=1e-10):
    m = np.array([
        [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
        [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
        [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
    ])
    return np.linalg.det(m) > tol


def _min_angle(p, q, r):
    out = []
    for a, b, c in ((p, q, r), (q, r, p), (r, p, q)):
        u, v = b - a, c - a
        out.append(np.arccos(np.clip(u @ v / np.linalg.norm(u) / np.linalg.norm(v), -1, 1)))
    return min(out)


def test_three_points_single_triangle():
    m = constrained_delaunay([(0, 0), (1, 0), (0, 1)])
    assert m.triangles.shape == (1, 3)
    assert signed_area(m.vertices[m.triangles[0]]) > 0


@pytest.mark.parametrize("pts, diag", [
    ([(0, 0), (1, 0), (1, 1), (0, 1)], (0, 2)),
    ([(1, 0), (0, 0), (0, 1), (1, 1)], (0, 2)),
    ([(1, 1), (0, 1), (0, 0), (1, 0)], (0, 2)),
    ([(0, 1), (0, 0), (1, 1), (1, 0)], (0, 3)),
])
def test_square_diagonal_uses_lowest_index(pts, diag):
    m = constrained_delaunay(pts)
    assert len(m.triangles) == 2
    edges = {tuple(e) for e in m.edges}
    assert diag in edges


def test_random_points_empty_circumcircle():
    rng = np.random.default_rng(7)
    pts = rng.uniform(size=(50, 2))
    m = constrained_delaunay(pts)
    for t in m.triangles:
        a, b, c = pts[t]
        for j in range(len(pts)):
            if j not in t:
                assert not _incircle_strict(a, b, c, pts[j])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 25))
def test_flip_never_improves_min_angle(seed, n):
    pts = np.random.default_rng(seed).uniform(size=(n, 2))
    m = constrained_delaunay(pts)
    owner = {}
    for t in m.triangles:
        for u, v, w in ((t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])):
            owner[(u, v)] = w
    for (u, v), w in owner.items():
        if (v, u) not in owner or u > v:
            continue
        x = owner[(v, u)]
        P = pts
        # flip only convex quads
        if signed_area(P[[u, x, w]]) <= 0 or signed_area(P[[x, v, w]]) <= 0:
            continue
        before = min(_min_angle(P[u], P[v], P[w]), _min_angle(P[v], P[u], P[x]))
        after = min(_min_angle(P[u], P[x], P[w]), _min_angle(P[x], P[v], P[w]))
        assert after <= before + 1e-12


def test_constraint_segments_are_edges():
    pts = [(0, 0), (4, 0), (4, 1), (0, 1), (2, -0.2), (2, 1.2), (1, 0.5), (3, 0.5)]
    m = constrained_delaunay(pts, [(6, 7)])
    assert (6, 7) in {tuple(e) for e in m.edges}


def test_constraint_recovered_through_many_edges():
    rng = np.random.default_rng(3)
    pts = np.vstack([[(0, 0.5), (1, 0.5)], rng.uniform(size=(60, 2))])
    m = constrained_delaunay(pts, [(0, 1)])
    assert (0, 1) in {tuple(e) for e in m.edges}


@pytest.mark.parametrize("pts, segs", [
    ([(0, 0), (1, 0), (0, 0), (0, 1)], []),
    ([(0, 0), (1, 0)], []),
    ([(0, 0), (1, 0), (2, 0)], []),
    ([(0, 0), (1, 1), (1, 0), (0, 1)], [(0, 1), (2, 3)]),
])
def test_triangulation_errors(pts, segs):
    with pytest.raises(TriangulationError):
        constrained_delaunay(pts, segs)


# -- dense meshes -----------------------------------------------------------------

def test_disk_mesh_containment(disk_domain):
    m = generate_dense_mesh(disk_domain, 0.1)
    assert len(m.boundary_loops) == 1
    assert len(m.boundary_loops[0]) >= 64
    cen = m.vertices[m.triangles].mean(axis=1)
    assert disk_domain.contains(cen).all()


def test_holed_square_euler(holed_domain):
    m = generate_dense_mesh(holed_domain, 0.05)
    assert len(m.boundary_loops) == 2
    V, E, F = m.n_vertices, len(m.edges), len(m.triangles)
    assert V - E + F == 1 - 1


def test_holed_mesh_invariants(holed_domain):
    m = generate_dense_mesh(holed_domain, 0.05)
    cen = m.vertices[m.triangles].mean(axis=1)
    inner = (np.abs(cen - 0.5) < 0.15).all(axis=1)
    assert not inner.any()
    # every triangle CCW with positive area
    assert (m.triangle_areas > 0).all()
    # every edge on at most two triangles
    counts = {}
    for t in m.triangles:
        for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = (min(u, v), max(u, v))
            counts[key] = counts.get(key, 0) + 1
    assert max(counts.values()) <= 2
    # loops traverse with the interior on the left
    directed = {(int(u), int(v)) for t in m.triangles for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
    for loop in m.boundary_loops:
        for a, b in zip(loop, np.roll(loop, -1)):
            assert (int(a), int(b)) in directed
    assert signed_area(m.vertices[np.asarray(m.boundary_loops[0])]) > 0
    assert signed_area(m.vertices[np.asarray(m.boundary_loops[1])]) < 0
    # polygon corners are mesh vertices and every constraint edge is kept
    for loop in holed_domain.loops:
        for p in loop:
            assert np.min(np.linalg.norm(m.vertices - p, axis=1)) < 1e-12
    edges = {tuple(e) for e in m.edges}
    for loop in m.boundary_loops:
        for a, b in zip(loop, np.roll(loop, -1)):
            assert (min(a, b), max(a, b)) in edges


def test_boundary_spacing_at_most_h(comb_domain):
    h = 0.1
    m = generate_dense_mesh(comb_domain, h)
    for loop in m.boundary_loops:
        p = m.vertices[np.asarray(loop)]
        assert np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1).max() <= h + 1e-12


def test_h_too_large():
    with pytest.raises(MeshError):
        generate_dense_mesh(load_domain(SQUARE), 10.0)


def test_mesh_is_deterministic(comb_domain):
    a = generate_dense_mesh(comb_domain, 0.15)
    b = generate_dense_mesh(comb_domain, 0.15)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.triangles, b.triangles)


def test_ngon_disk_sizes():
    m = generate_dense_mesh(make_domain(ngon(64)), 0.04)
    assert 1500 < m.n_vertices < 3000


# -- point location --------------------------------------------------------------

def test_point_location_centroid(disk_mesh):
    c = disk_mesh.vertices[disk_mesh.triangles[0]].mean(axis=0)
    assert point_location(disk_mesh, c) == 0


def test_point_location_outside(disk_mesh):
    assert point_location(disk_mesh, (10.0, 10.0)) == OUTSIDE


def test_point_location_shared_edge():
    m = constrained_delaunay([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert point_location(m, (0.5, 0.5)) == 0
    # both triangles contain the diagonal midpoint
    assert len(m.triangles) == 2
