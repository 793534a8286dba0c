import numpy as np

from hmplan import svg, verify
from hmplan.coords import ReducedCoordinates


def test_box_breakpoints_on_square(square_mesh):
    mesh, domain = square_mesh
    rc = ReducedCoordinates(max_seg_len=1.0).fit(mesh, domain=domain)
    bps = svg.breakpoints_from_coords(mesh, rc.field_)
    corners = mesh.vertices[bps]
    assert len(bps) == 4
    assert {tuple(np.round(c, 12)) for c in corners} == {(0, 0), (1, 0), (1, 1), (0, 1)}


def test_gaussian_has_no_breakpoints(square_mesh):
    mesh, domain = square_mesh
    rc = ReducedCoordinates(max_seg_len=1.0, basis="gaussian").fit(mesh, domain=domain)
    assert len(svg.breakpoints_from_coords(mesh, rc.field_)) == 0


def test_colors_are_hex():
    cols = svg.field_colors([0.0, 0.5, 1.0, np.inf])
    assert all(c.startswith("#") and len(c) == 7 for c in cols)
    assert cols[0] != cols[2]


def test_render_is_deterministic(square_mesh):
    mesh, _ = square_mesh
    assert svg.render(mesh) == svg.render(mesh)


def test_disk_suite_passes_small():
    checks = verify.run_disk_suite(0.05)
    assert len(checks) == len(verify.ALL_CHECKS)
    for c in checks:
        assert c.passed, c.line()
