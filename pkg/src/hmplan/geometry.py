"""Planar polygonal domains, constrained Delaunay triangulation and meshing.

Coordinates handed to the triangulator are rescaled to the unit bounding box
before any predicate is evaluated, so the epsilon guards below are uniform
across domains of different size.  Outputs are always in the caller's
original coordinates.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
import shapely
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import Delaunay

EPS = 1e-12
OUTSIDE = -1


class ParseError(ValueError):
    """Malformed domain / mesh text."""


class TopologyError(ValueError):
    """Self-intersecting loops, holes outside the outer loop, etc."""


class TriangulationError(ValueError):
    pass


class MeshError(ValueError):
    pass


def signed_area(loop) -> float:
    loop = np.asarray(loop, dtype=float)
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class DomainSpec:
    """Outer CCW loop plus CW hole loops.

    Use :func:`make_domain` (or :func:`load_domain`) to get a validated,
    correctly oriented instance.
    """

    outer: np.ndarray
    holes: tuple = ()

    @property
    def loops(self) -> list[np.ndarray]:
        return [self.outer, *self.holes]

    @cached_property
    def polygon(self) -> shapely.Polygon:
        return shapely.Polygon(self.outer, [h for h in self.holes])

    @property
    def area(self) -> float:
        return float(self.polygon.area)

    @property
    def diameter(self) -> float:
        lo, hi = self.outer.min(axis=0), self.outer.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    def contains(self, pts) -> np.ndarray:
        """Strict interior test (points on the boundary are outside)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return shapely.contains_xy(self.polygon, pts[:, 0], pts[:, 1])

    def boundary_distance(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return shapely.distance(self.polygon.boundary, shapely.points(pts))


def make_domain(outer, holes=()) -> DomainSpec:
    """Validate loops and fix their orientation (outer CCW, holes CW)."""
    outer = _as_loop(outer, "outer")
    holes = [_as_loop(h, f"hole {i}") for i, h in enumerate(holes)]
    if signed_area(outer) < 0:
        outer = outer[::-1].copy()
    holes = [h[::-1].copy() if signed_area(h) > 0 else h for h in holes]

    if not shapely.LinearRing(outer).is_simple:
        raise TopologyError("outer loop is self-intersecting")
    shell = shapely.Polygon(outer)
    hole_polys = []
    for i, h in enumerate(holes):
        if not shapely.LinearRing(h).is_simple:
            raise TopologyError(f"hole {i} is self-intersecting")
        hp = shapely.Polygon(h)
        if not shell.contains(hp) or shell.exterior.intersects(hp.exterior):
            raise TopologyError(f"hole {i} is not strictly inside the outer loop")
        hole_polys.append(hp)
    for i in range(len(hole_polys)):
        for j in range(i + 1, len(hole_polys)):
            if hole_polys[i].intersects(hole_polys[j]):
                raise TopologyError(f"holes {i} and {j} intersect")
    return DomainSpec(outer=outer, holes=tuple(holes))


def _as_loop(loop, name) -> np.ndarray:
    arr = np.asarray(loop, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
        raise TopologyError(f"{name}: need at least 3 planar vertices")
    if not np.all(np.isfinite(arr)):
        raise TopologyError(f"{name}: non-finite coordinate")
    if np.allclose(arr[0], arr[-1]) and len(arr) > 3:
        arr = arr[:-1]
    if abs(signed_area(arr)) <= EPS * max(1.0, float(np.ptp(arr, axis=0).max()) ** 2):
        raise TopologyError(f"{name}: degenerate (zero-area) loop")
    return arr.copy()


def load_domain(text: str) -> DomainSpec:
    """Parse the line-oriented domain format (``outer n`` / ``hole n`` blocks)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    outer, holes = None, []
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 2 or head[0] not in ("outer", "hole"):
            raise ParseError(f"expected 'outer n' or 'hole n', got {lines[i]!r}")
        try:
            count = int(head[1])
        except ValueError:
            raise ParseError(f"bad vertex count in {lines[i]!r}") from None
        if i + 1 + count > len(lines):
            raise ParseError(f"block {lines[i]!r} truncated")
        pts = []
        for ln in lines[i + 1 : i + 1 + count]:
            parts = ln.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'x y', got {ln!r}")
            try:
                pts.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError(f"non-numeric vertex {ln!r}") from None
        if head[0] == "outer":
            if outer is not None:
                raise ParseError("more than one outer block")
            outer = pts
        else:
            holes.append(pts)
        i += 1 + count
    if outer is None:
        raise ParseError("missing outer block")
    return make_domain(outer, holes)


def dump_domain(domain: DomainSpec) -> str:
    out = [f"outer {len(domain.outer)}"]
    out += [f"{float(x)!r} {float(y)!r}" for x, y in domain.outer]
    for h in domain.holes:
        out.append(f"hole {len(h)}")
        out += [f"{float(x)!r} {float(y)!r}" for x, y in h]
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# triangle meshes


@dataclass(frozen=True)
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loops: tuple = ()
    constrained: frozenset = field(default=frozenset(), compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def is_boundary(self) -> np.ndarray:
        flag = np.zeros(len(self.vertices), dtype=bool)
        for loop in self.boundary_loops:
            flag[list(loop)] = True
        return flag

    @cached_property
    def interior_vertices(self) -> np.ndarray:
        used = np.zeros(len(self.vertices), dtype=bool)
        used[self.triangles.ravel()] = True
        return np.flatnonzero(used & ~self.is_boundary)

    @cached_property
    def edges(self) -> np.ndarray:
        """Sorted unique undirected edges, shape (E, 2)."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        e = self.edges
        k = len(self.vertices)
        data = np.ones(2 * len(e))
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(k, k))

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v] : a.indptr[v + 1]]

    @cached_property
    def mean_edge_length(self) -> float:
        e = self.edges
        return float(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1).mean())

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def boundary_loops_of(triangles: np.ndarray, vertices: np.ndarray) -> tuple:
    """Chain edges used by exactly one triangle into cyclic loops, outer first."""
    directed = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]]
    )
    present = {(int(a), int(b)) for a, b in directed}
    nxt = {}
    for a, b in present:
        if (b, a) not in present:
            if a in nxt:
                raise MeshError(f"non-manifold boundary at vertex {a}")
            nxt[a] = b
    loops = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        v = nxt[start]
        while v != start:
            if v in seen:
                raise MeshError(f"boundary chain through vertex {v} does not close")
            loop.append(v)
            seen.add(v)
            v = nxt[v]
        loops.append(loop)
    areas = [signed_area(vertices[lp]) for lp in loops]
    order = sorted(range(len(loops)), key=lambda i: -areas[i])
    return tuple(tuple(loops[i]) for i in order)


def make_mesh(vertices, triangles, constrained=frozenset()) -> TriMesh:
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    return TriMesh(
        vertices=vertices,
        triangles=triangles,
        boundary_loops=boundary_loops_of(triangles, vertices),
        constrained=frozenset(constrained),
    )


# --------------------------------------------------------------------------
# predicates (points already normalized to the unit box)


def _orient(p, a, b, c) -> float:
    """>0 if a, b, c turn left; zero within a relative epsilon guard."""
    ax, ay = p[a]
    bx, by = p[b]
    cx, cy = p[c]
    l = (bx - ax) * (cy - ay)
    r = (by - ay) * (cx - ax)
    det = l - r
    if abs(det) <= EPS * (abs(l) + abs(r)) + 1e-300:
        return 0.0
    return det


def _incircle(p, a, b, c, d) -> float:
    """>0 if d lies strictly inside the circumcircle of CCW (a, b, c)."""
    dx, dy = p[d]
    adx, ady = p[a][0] - dx, p[a][1] - dy
    bdx, bdy = p[b][0] - dx, p[b][1] - dy
    cdx, cdy = p[c][0] - dx, p[c][1] - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = alift * (bdx * cdy - bdy * cdx)
    t2 = blift * (cdx * ady - cdy * adx)
    t3 = clift * (adx * bdy - ady * bdx)
    det = t1 + t2 + t3
    perm = (
        alift * (abs(bdx * cdy) + abs(bdy * cdx))
        + blift * (abs(cdx * ady) + abs(cdy * adx))
        + clift * (abs(adx * bdy) + abs(ady * bdx))
    )
    if abs(det) <= EPS * perm:
        return 0.0
    return det


def _segments_cross(p, a, b, c, d) -> bool:
    """Proper crossing of segments ab and cd (shared endpoints excluded)."""
    o1, o2 = _orient(p, a, b, c), _orient(p, a, b, d)
    o3, o4 = _orient(p, c, d, a), _orient(p, c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def _on_segment(p, a, b, c) -> bool:
    """c collinear with and strictly between a and b."""
    if _orient(p, a, b, c) != 0.0:
        return False
    (ax, ay), (bx, by), (cx, cy) = p[a], p[b], p[c]
    abx, aby = bx - ax, by - ay
    t = ((cx - ax) * abx + (cy - ay) * aby) / (abx * abx + aby * aby)
    return 0.0 < t < 1.0


class _Triangulation:
    """Mutable triangle soup with a directed-edge index, used only while
    building a CDT."""

    def __init__(self, pts: np.ndarray, tris: np.ndarray):
        # plain tuples: scalar access into numpy arrays dominates otherwise
        self.p = [tuple(map(float, xy)) for xy in pts]
        self.tris: list = [list(map(int, t)) for t in tris]
        self.edge = {}
        self.hint = {}
        for ti, (a, b, c) in enumerate(self.tris):
            for u, v in ((a, b), (b, c), (c, a)):
                self.edge[(u, v)] = ti
                self.hint[u] = v
        self.fixed = set()

    def is_flat(self, ti) -> bool:
        a, b, c = self.tris[ti]
        return _orient(self.p, a, b, c) == 0.0

    def remove(self, ti):
        verts = self.tris[ti]
        a, b, c = verts
        for u, v in ((a, b), (b, c), (c, a)):
            del self.edge[(u, v)]
        self.tris[ti] = None
        for u in verts:
            if (u, self.hint.get(u)) in self.edge:
                continue
            for x in verts:
                if x == u:
                    continue
                if (u, x) in self.edge:
                    self.hint[u] = x
                    break
                w = self.third(x, u)
                if w is not None:
                    self.hint[u] = w
                    break
            else:
                self.hint.pop(u, None)

    def repair_flat(self, candidates):
        """Remove zero-area triangles: drop them on the hull, flip them away
        inside.  Flips only touch the two triangle slots involved, so the
        candidate list stays complete."""
        candidates = list(candidates)
        for _ in range(len(candidates) + 1):
            flats = [i for i in candidates if self.tris[i] is not None and self.is_flat(i)]
            if not flats:
                return
            progress = False
            for ti in flats:
                t = self.tris[ti]
                if t is None or not self.is_flat(ti):
                    continue
                # long edge (a, b) is the one whose opposite vertex lies between
                for k in range(3):
                    a, b, c = t[k], t[(k + 1) % 3], t[(k + 2) % 3]
                    if _on_segment(self.p, a, b, c):
                        break
                else:
                    raise TriangulationError("degenerate triangle with coincident vertices")
                d = self.third(b, a)
                if d is None:
                    self.remove(ti)
                    progress = True
                elif _orient(self.p, b, a, d) > 0:
                    t2 = self.edge[(b, a)]
                    self.flip(a, b)
                    candidates.append(t2)
                    progress = True
            if not progress:
                raise TriangulationError("could not repair flat triangles")
        raise TriangulationError("flat-triangle repair did not terminate")

    def third(self, u, v):
        ti = self.edge.get((u, v))
        if ti is None:
            return None
        a, b, c = self.tris[ti]
        if a != u and a != v:
            return a
        if b != u and b != v:
            return b
        return c

    def has_edge(self, u, v) -> bool:
        return (u, v) in self.edge or (v, u) in self.edge

    def flip(self, a, b):
        """Flip interior edge ab; returns the new diagonal (c, d)."""
        t1 = self.edge[(a, b)]
        t2 = self.edge[(b, a)]
        c = self.third(a, b)
        d = self.third(b, a)
        for u, v in ((a, b), (b, c), (c, a), (b, a), (a, d), (d, b)):
            del self.edge[(u, v)]
        self.tris[t1] = [d, b, c]
        self.tris[t2] = [c, a, d]
        for u, v in ((d, b), (b, c), (c, d)):
            self.edge[(u, v)] = t1
        for u, v in ((c, a), (a, d), (d, c)):
            self.edge[(u, v)] = t2
        self.hint[a], self.hint[b], self.hint[c], self.hint[d] = d, c, d, b
        return c, d

    def flippable(self, a, b) -> bool:
        c, d = self.third(a, b), self.third(b, a)
        if c is None or d is None:
            return False
        return _segments_cross(self.p, a, b, c, d)

    def illegal(self, a, b) -> bool:
        if (min(a, b), max(a, b)) in self.fixed:
            return False
        c, d = self.third(a, b), self.third(b, a)
        if c is None or d is None:
            return False
        if not _segments_cross(self.p, a, b, c, d):
            return False
        s = _incircle(self.p, a, b, c, d)
        if s > 0:
            return True
        if s < 0:
            return False
        # cocircular: keep the diagonal touching the lowest vertex index
        return min(c, d) < min(a, b)

    def legalize(self, edges):
        stack = list(edges)
        while stack:
            a, b = stack.pop()
            if not self.has_edge(a, b):
                continue
            if (a, b) not in self.edge:
                a, b = b, a
            if self.illegal(a, b):
                c, d = self.flip(a, b)
                stack.extend(((a, d), (d, b), (b, c), (c, a)))

    def fan(self, a):
        """Triangles around vertex a as (x, y) pairs with (a, x, y) CCW."""
        start = self.hint[a]
        out = []
        x = start
        while True:
            y = self.third(a, x)
            if y is None:
                break
            out.append((x, y))
            x = y
            if x == start:
                return out
        # hit the hull: walk the other way too
        x = start
        while True:
            z = self.third(x, a)
            if z is None:
                break
            out.append((z, x))
            x = z
        return out

    def insert_segment(self, a, b):
        todo = [(a, b)]
        while todo:
            a, b = todo.pop()
            if self.has_edge(a, b):
                self.fixed.add((min(a, b), max(a, b)))
                continue
            split = self._recover(a, b)
            if split is not None:
                todo.append((split, b))
                todo.append((a, split))

    def _recover(self, a, b):
        p = self.p
        crossed = None
        for x, y in self.fan(a):
            if _on_segment(p, a, b, x):
                return x
            if _on_segment(p, a, b, y):
                return y
            if _orient(p, a, x, b) > 0 and _orient(p, a, y, b) < 0:
                crossed = (x, y)
                break
        if crossed is None:
            raise TriangulationError(f"cannot recover constraint ({a}, {b})")
        # walk the triangles crossed by ab; u is left of ab, v right
        u, v = crossed
        if _orient(p, a, b, u) < 0:
            u, v = v, u
        queue = deque()
        while True:
            if (min(u, v), max(u, v)) in self.fixed:
                raise TriangulationError("constraint segments cross")
            queue.append((u, v))
            # near triangle holds v->u, so the far one holds u->v
            w = self.third(u, v)
            if w is None:
                raise TriangulationError(f"constraint ({a}, {b}) leaves the hull")
            if w == b:
                break
            if _on_segment(p, a, b, w):
                return w
            if _orient(p, a, b, w) > 0:
                u = w
            else:
                v = w
        new_edges = []
        guard = 0
        limit = 50 * (len(queue) + 1) ** 2
        while queue:
            guard += 1
            if guard > limit:
                raise TriangulationError(f"constraint ({a}, {b}) recovery did not converge")
            u, v = queue.popleft()
            if not self.has_edge(u, v):
                continue
            if (u, v) not in self.edge:
                u, v = v, u
            if not self.flippable(u, v):
                queue.append((u, v))
                continue
            c, d = self.flip(u, v)
            if {c, d} == {a, b}:
                continue
            if _segments_cross(p, a, b, c, d):
                queue.append((c, d))
            else:
                new_edges.append((c, d))
        if not self.has_edge(a, b):
            raise TriangulationError(f"constraint ({a}, {b}) not recovered")
        self.fixed.add((min(a, b), max(a, b)))
        self.legalize(new_edges)
        return None


def constrained_delaunay(points, segments=()) -> TriMesh:
    """Constrained Delaunay triangulation of ``points``.

    Every segment in ``segments`` (pairs of point indices) is an edge of the
    result; all other edges pass the empty-circumcircle test.  Cocircular
    configurations take the diagonal incident to the lowest vertex index.
    The triangulation covers the convex hull; culling to a domain is left to
    the caller.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise TriangulationError("points must be an (N, 2) array")
    if len(pts) < 3:
        raise TriangulationError("need at least 3 points")
    if len(np.unique(pts, axis=0)) != len(pts):
        raise TriangulationError("duplicate points")
    lo = pts.min(axis=0)
    scale = float(np.ptp(pts, axis=0).max())
    if scale == 0.0:
        raise TriangulationError("all points coincide")
    q = (pts - lo) / scale

    segs = [(int(a), int(b)) for a, b in segments]
    for a, b in segs:
        if not (0 <= a < len(pts) and 0 <= b < len(pts)) or a == b:
            raise TriangulationError(f"bad segment ({a}, {b})")
    _check_segments_disjoint(q, segs)

    try:
        dt = Delaunay(q)
    except Exception as exc:  # Qhull raises on all-collinear input
        raise TriangulationError(f"fewer than 3 non-collinear points ({exc})") from None
    if len(dt.coplanar):
        raise TriangulationError("degenerate point set (coplanar points dropped by Qhull)")
    tris, flat = _orient_simplices(q, dt.simplices.astype(np.int64))
    tri = _Triangulation(q, tris)
    tri.repair_flat(np.flatnonzero(flat))
    all_edges = {(min(u, v), max(u, v)) for u, v in tri.edge}
    tri.legalize(sorted(all_edges))
    for a, b in segs:
        tri.insert_segment(a, b)
    out = np.array([t for t in tri.tris if t is not None], dtype=np.int64)
    return make_mesh(pts, out, constrained=tri.fixed)


def _orient_simplices(q, tris):
    """CCW-orient Qhull simplices.  Flat (collinear) ones, which Qhull emits
    along collinear hull runs, get whichever orientation agrees with their
    neighbours."""
    d1 = q[tris[:, 1]] - q[tris[:, 0]]
    d2 = q[tris[:, 2]] - q[tris[:, 0]]
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    scale = np.hypot(*d1.T) * np.hypot(*d2.T)
    flat = np.abs(cross) <= EPS * scale
    tris = tris.copy()
    neg = (cross < 0) & ~flat
    tris[neg] = tris[neg][:, [0, 2, 1]]
    directed = {
        (int(u), int(v))
        for a, b, c in tris[~flat]
        for u, v in ((a, b), (b, c), (c, a))
    }
    for i in np.flatnonzero(flat):
        a, b, c = map(int, tris[i])
        fwd = {(a, b), (b, c), (c, a)}
        if fwd & directed:
            tris[i] = (a, c, b)
            fwd = {(a, c), (c, b), (b, a)}
            if fwd & directed:
                raise TriangulationError("inconsistent degenerate simplex from Qhull")
        directed |= fwd
    return tris, flat


def _check_segments_disjoint(q, segs):
    """Raise if two constraint segments cross or overlap (grid bucketing)."""
    if len(segs) < 2:
        return
    cell = max(1.0 / math.sqrt(len(segs)), 1e-6)
    buckets: dict = {}
    for si, (a, b) in enumerate(segs):
        (x0, y0), (x1, y1) = q[a], q[b]
        i0, i1 = int(min(x0, x1) / cell), int(max(x0, x1) / cell)
        j0, j1 = int(min(y0, y1) / cell), int(max(y0, y1) / cell)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                buckets.setdefault((i, j), []).append(si)
    checked = set()
    for members in buckets.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                s1, s2 = members[x], members[y]
                if (s1, s2) in checked:
                    continue
                checked.add((s1, s2))
                a, b = segs[s1]
                c, d = segs[s2]
                shared = {a, b} & {c, d}
                if len(shared) == 2:
                    raise TriangulationError(f"duplicate constraint ({a}, {b})")
                if _segments_cross(q, a, b, c, d):
                    raise TriangulationError(f"constraints ({a}, {b}) and ({c}, {d}) cross")
                for e in {c, d} - shared:
                    if _on_segment(q, a, b, e) and shared:
                        raise TriangulationError("overlapping constraints")
                for e in {a, b} - shared:
                    if _on_segment(q, c, d, e) and shared:
                        raise TriangulationError("overlapping constraints")


# --------------------------------------------------------------------------
# dense meshing


def resample_loop(loop: np.ndarray, h: float) -> np.ndarray:
    """Insert equally spaced points on every edge so spacing is <= h."""
    out = []
    for i in range(len(loop)):
        a, b = loop[i], loop[(i + 1) % len(loop)]
        pieces = max(1, math.ceil(np.linalg.norm(b - a) / h - 1e-9))
        t = np.arange(pieces)[:, None] / pieces
        out.append(a + t * (b - a))
    return np.concatenate(out)


def generate_dense_mesh(domain: DomainSpec, h: float, clearance: float = 0.5) -> TriMesh:
    """Grid-seeded CDT of ``domain`` with target edge length ``h``.

    Boundary loops are resampled at spacing <= h; an axis-aligned grid of
    spacing h is kept where it lies at least ``clearance * h`` inside the
    domain; triangles with centroids outside the domain are dropped.
    """
    if not h > 0:
        raise MeshError("h must be positive")
    smallest = min(float(np.ptp(lp, axis=0).max()) for lp in domain.loops)
    if h >= domain.diameter or h >= smallest:
        raise MeshError(
            f"h={h} too large to resolve the boundary (smallest loop extent {smallest:.4g})"
        )

    rings = [resample_loop(lp, h) for lp in domain.loops]
    boundary = np.concatenate(rings)
    segments = []
    offset = 0
    for r in rings:
        idx = np.arange(len(r)) + offset
        segments += list(zip(idx, np.roll(idx, -1)))
        offset += len(r)

    lo, hi = domain.outer.min(axis=0), domain.outer.max(axis=0)
    xs = np.arange(lo[0] + h, hi[0], h)
    ys = np.arange(lo[1] + h, hi[1], h)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    if len(grid):
        keep = domain.contains(grid)
        grid = grid[keep]
    if len(grid):
        grid = grid[domain.boundary_distance(grid) >= clearance * h]

    pts = np.concatenate([boundary, grid]) if len(grid) else boundary
    cdt = constrained_delaunay(pts, segments)
    centroids = pts[cdt.triangles].mean(axis=1)
    tris = cdt.triangles[domain.contains(centroids)]
    if len(tris) == 0:
        raise MeshError("no triangles inside the domain")

    used = np.zeros(len(pts), dtype=bool)
    used[tris.ravel()] = True
    remap = -np.ones(len(pts), dtype=np.int64)
    remap[used] = np.arange(used.sum())
    fixed = {(int(remap[a]), int(remap[b])) for a, b in cdt.constrained if used[a] and used[b]}
    fixed = {(min(a, b), max(a, b)) for a, b in fixed}
    mesh = make_mesh(pts[used], remap[tris], constrained=fixed)

    ncomp, _ = csgraph.connected_components(mesh.adjacency, directed=False)
    if ncomp != 1:
        raise MeshError(f"mesh has {ncomp} connected components")
    if len(mesh.boundary_loops) != len(domain.loops):
        raise MeshError(
            f"mesh has {len(mesh.boundary_loops)} boundary loops, domain has {len(domain.loops)}"
        )
    return mesh


def point_location(mesh: TriMesh, p) -> int:
    """Index of a triangle containing ``p`` (lowest index on ties) or OUTSIDE."""
    p = np.asarray(p, dtype=float)
    tri = mesh.vertices[mesh.triangles]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]

    def cross(u, v, w):
        return (v[:, 0] - u[:, 0]) * (w[1] - u[:, 1]) - (v[:, 1] - u[:, 1]) * (w[0] - u[:, 0])

    scale = np.abs(mesh.triangle_areas) * 2
    tol = EPS * np.maximum(scale, 1e-300)
    inside = (cross(a, b, p) >= -tol) & (cross(b, c, p) >= -tol) & (cross(c, a, p) >= -tol)
    hits = np.flatnonzero(inside)
    return int(hits[0]) if len(hits) else OUTSIDE


def barycentric(mesh: TriMesh, t: int, p) -> np.ndarray:
    a, b, c = mesh.vertices[mesh.triangles[t]]
    m = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
    l1, l2 = np.linalg.solve(m, np.asarray(p, dtype=float) - a)
    return np.array([1.0 - l1 - l2, l1, l2])
