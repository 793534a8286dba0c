"""Line-oriented text formats for meshes, coordinates, fields, paths and graphs.

Floats are written with ``repr`` (shortest round-trip, locale independent),
so every writer is byte-deterministic and every reader recovers the exact
values.  All indices are 0-based.
"""
from __future__ import annotations

import numpy as np

from .coords import CoordinateField
from .geometry import ParseError, TriMesh, make_mesh
from .planner import DistanceField, PlannedPath
from .routing import AUGMENTED, DELAUNAY, SiteGraph, SiteSet


def _f(x) -> str:
    return repr(float(x))


def _row(values) -> str:
    return " ".join(_f(v) for v in values)


class _Lines:
    """Cursor over non-blank, non-comment lines with header parsing."""

    def __init__(self, text: str):
        self.lines = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.lines.append((no, line.split()))
        self.i = 0

    def done(self) -> bool:
        return self.i >= len(self.lines)

    def peek(self):
        return self.lines[self.i][1] if not self.done() else None

    def next(self, what: str):
        if self.done():
            raise ParseError(f"unexpected end of file, expected {what}")
        no, toks = self.lines[self.i]
        self.i += 1
        return no, toks

    def header(self, keyword: str, nargs: int = 1) -> list[str]:
        no, toks = self.next(f"'{keyword}' header")
        if toks[0] != keyword or len(toks) != nargs + 1:
            raise ParseError(f"line {no}: expected '{keyword}' with {nargs} field(s), got {' '.join(toks)!r}")
        return toks[1:]

    def count(self, tok: str, no_ctx: str) -> int:
        try:
            c = int(tok)
        except ValueError:
            raise ParseError(f"{no_ctx}: bad count {tok!r}") from None
        if c < 0:
            raise ParseError(f"{no_ctx}: negative count")
        return c

    def block(self, rows: int, width: int, dtype, what: str) -> np.ndarray:
        out = np.empty((rows, width), dtype=dtype)
        for r in range(rows):
            no, toks = self.next(what)
            if len(toks) != width:
                raise ParseError(f"line {no}: expected {width} values for {what}")
            try:
                out[r] = [dtype(t) for t in toks]
            except ValueError:
                raise ParseError(f"line {no}: malformed {what}") from None
        return out

    def finish(self):
        if not self.done():
            no, toks = self.lines[self.i]
            raise ParseError(f"line {no}: trailing content {' '.join(toks)!r}")


# -- mesh -------------------------------------------------------------------

def dump_mesh(mesh: TriMesh) -> str:
    out = [f"vertices {mesh.n_vertices}"]
    b = mesh.is_boundary
    out += [f"{_f(x)} {_f(y)} {int(bb)}" for (x, y), bb in zip(mesh.vertices, b)]
    out.append(f"triangles {len(mesh.triangles)}")
    out += [f"{i} {j} {k}" for i, j, k in mesh.triangles]
    for loop in mesh.boundary_loops:
        out.append(f"loop {len(loop)}")
        out += [str(int(v)) for v in loop]
    return "\n".join(out) + "\n"


def load_mesh(text: str) -> TriMesh:
    """Parse a mesh file; loops are re-derived and checked against the file."""
    L = _Lines(text)
    k = L.count(L.header("vertices")[0], "vertices")
    vb = L.block(k, 3, float, "vertex")
    f = L.count(L.header("triangles")[0], "triangles")
    tris = L.block(f, 3, int, "triangle").astype(np.int64)
    if f and (tris.min() < 0 or tris.max() >= k):
        raise ParseError("triangle index out of range")
    loops = []
    while not L.done():
        n = L.count(L.header("loop")[0], "loop")
        loops.append(L.block(n, 1, int, "loop index").ravel())
    mesh = make_mesh(vb[:, :2], tris)
    if sorted(map(tuple, (np.sort(l) for l in loops))) != sorted(
        map(tuple, (np.sort(l) for l in mesh.boundary_loops))
    ):
        raise ParseError("boundary loops do not match the triangles")
    if not np.array_equal(vb[:, 2].astype(bool), mesh.is_boundary):
        raise ParseError("boundary flags do not match the triangles")
    return mesh


# -- coordinates --------------------------------------------------------------

def dump_coords(field: CoordinateField) -> str:
    out = [f"coords {field.k} {field.n} {field.basis}"]
    out += [_row(r) for r in field.values]
    return "\n".join(out) + "\n"


def load_coords(text: str) -> CoordinateField:
    L = _Lines(text)
    k, n, basis = L.header("coords", 3)
    k, n = L.count(k, "coords"), L.count(n, "coords")
    vals = L.block(k, n, float, "coordinate row")
    L.finish()
    return CoordinateField(vals, basis)


def dump_site_coords(field: CoordinateField, sites: SiteSet) -> str:
    """Only the m x n site rows: the payload a routing node needs."""
    rows = field.values[sites.vertices]
    out = [f"sitecoords {len(rows)} {field.n}"]
    out += [_row(r) for r in rows]
    return "\n".join(out) + "\n"


def load_site_coords(text: str) -> np.ndarray:
    L = _Lines(text)
    m, n = L.header("sitecoords", 2)
    vals = L.block(L.count(m, "sitecoords"), L.count(n, "sitecoords"), float, "site row")
    L.finish()
    return vals


# -- fields and paths ----------------------------------------------------------

def dump_field(field: DistanceField) -> str:
    out = [f"field {len(field.values)} {field.target} {field.generator}"]
    out += [_f(v) for v in field.values]
    return "\n".join(out) + "\n"


def load_field(text: str) -> DistanceField:
    L = _Lines(text)
    k, target, gen = L.header("field", 3)
    vals = L.block(L.count(k, "field"), 1, float, "field value").ravel()
    L.finish()
    return DistanceField(int(target), vals, gen)


def dump_path(path: PlannedPath) -> str:
    out = [f"path {path.status} {len(path.vertices)}"]
    out += [str(int(v)) for v in path.vertices]
    return "\n".join(out) + "\n"


def load_path(text: str) -> tuple[str, np.ndarray]:
    L = _Lines(text)
    status, n = L.header("path", 2)
    verts = L.block(L.count(n, "path"), 1, int, "path vertex").ravel()
    L.finish()
    return status, verts


# -- graphs --------------------------------------------------------------------

def dump_graph(graph: SiteGraph, sites: SiteSet) -> str:
    out = []
    if graph.generator is not None:
        out.append(f"generator {graph.generator}")
    out.append(f"sites {sites.m}")
    out += [f"{int(v)} {_f(x)} {_f(y)}" for v, (x, y) in zip(sites.vertices, sites.positions)]
    edges = graph.edges()
    out.append(f"edges {len(edges)}")
    out += [f"{a} {b} {graph.tags[(a, b)]}" for a, b in edges]
    return "\n".join(out) + "\n"


def load_graph(text: str) -> tuple[SiteGraph, SiteSet]:
    L = _Lines(text)
    gen = None
    if L.peek() and L.peek()[0] == "generator":
        gen = L.header("generator")[0]
    m = L.count(L.header("sites")[0], "sites")
    rows = L.block(m, 3, float, "site")
    sites = SiteSet(rows[:, 0].astype(np.int64), rows[:, 1:].copy())
    e = L.count(L.header("edges")[0], "edges")
    graph = SiteGraph.empty(m)
    graph.generator = gen
    for _ in range(e):
        no, toks = L.next("edge")
        if len(toks) != 3 or toks[2] not in (DELAUNAY, AUGMENTED):
            raise ParseError(f"line {no}: expected 'i j delaunay|augmented'")
        a, b = int(toks[0]), int(toks[1])
        if not (0 <= a < m and 0 <= b < m) or a == b:
            raise ParseError(f"line {no}: bad edge {a} {b}")
        graph.add_edge(a, b, toks[2])
    L.finish()
    return graph, sites
