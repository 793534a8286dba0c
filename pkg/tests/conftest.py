import numpy as np
import pytest

from hmplan.geometry import generate_dense_mesh, make_domain

COMB = [
    (0, 0), (4, 0), (4, 3), (3, 3), (3, 1), (2.5, 1), (2.5, 3),
    (1.5, 3), (1.5, 1), (1, 1), (1, 3), (0, 3),
]


def ngon(n=64, r=1.0):
    a = 2 * np.pi * np.arange(n) / n
    return np.c_[r * np.cos(a), r * np.sin(a)]


def nearest_interior(mesh, p):
    d = np.linalg.norm(mesh.vertices - np.asarray(p, dtype=float), axis=1)
    d[mesh.is_boundary] = np.inf
    return int(np.argmin(d))


@pytest.fixture(scope="session")
def disk_domain():
    return make_domain(ngon(64))


@pytest.fixture(scope="session")
def disk_mesh(disk_domain):
    return generate_dense_mesh(disk_domain, 0.04)


@pytest.fixture(scope="session")
def comb_domain():
    return make_domain(COMB)


@pytest.fixture(scope="session")
def comb_mesh(comb_domain):
    return generate_dense_mesh(comb_domain, 0.08)


@pytest.fixture(scope="session")
def holed_domain():
    return make_domain(
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [[(0.35, 0.35), (0.35, 0.65), (0.65, 0.65), (0.65, 0.35)]],
    )


def polar_disk_mesh(rings=12, sectors=8):
    """Unit-disk mesh with exact rotational symmetry of order ``sectors``.

    Ring i has sectors*i vertices at angles 2*pi*j/(sectors*i); consecutive
    rings are zipped by comparing angles as exact fractions.
    """
    from hmplan.geometry import make_mesh

    verts = [(0.0, 0.0)]
    start = [0]
    for i in range(1, rings + 1):
        start.append(len(verts))
        r = i / rings
        for j in range(sectors * i):
            a = 2 * np.pi * j / (sectors * i)
            verts.append((r * np.cos(a), r * np.sin(a)))
    tris = []
    for j in range(sectors):
        tris.append((0, start[1] + j, start[1] + (j + 1) % sectors))
    for i in range(1, rings):
        n_in, n_out = sectors * i, sectors * (i + 1)
        a = b = 0
        while a < n_in or b < n_out:
            # advance the ring whose next vertex comes first (inner on ties)
            if b >= n_out or (a < n_in and (a + 1) * n_out <= (b + 1) * n_in):
                tris.append((start[i] + a % n_in, start[i + 1] + b % n_out, start[i] + (a + 1) % n_in))
                a += 1
            else:
                tris.append((start[i] + a % n_in, start[i + 1] + b % n_out, start[i + 1] + (b + 1) % n_out))
                b += 1
    mesh = make_mesh(np.array(verts), np.array(tris))

    def rotate(v):
        """Index of vertex v after rotation by one sector."""
        if v == 0:
            return 0
        i = max(k for k in range(1, rings + 1) if start[k] <= v)
        return start[i] + (v - start[i] + i) % (sectors * i)

    return mesh, rotate


@pytest.fixture(scope="session")
def square_mesh():
    d = make_domain([(0, 0), (1, 0), (1, 1), (0, 1)])
    return generate_dense_mesh(d, 0.1), d


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip("."))):
            terminalreporter.write_line(line)
