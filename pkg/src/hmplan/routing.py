"""Greedy routing graphs over sampled sites.

``D[s, t]`` is the reduced divergence with ``s`` as first argument and the
target ``t`` second.  A graph is greedy when every site ``s`` has, for every
other site ``t``, a neighbour ``u`` with ``D[u, t] < D[s, t]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy.sparse import csgraph
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .coords import CoordinateField
from .divergence import pairwise_divergence, divergence_from
from .geometry import DomainSpec, TriMesh, constrained_delaunay
from .planner import generator_name, resolve_generator

log = logging.getLogger(__name__)

DELAUNAY = "delaunay"
AUGMENTED = "augmented"


class SamplingError(RuntimeError):
    pass


class GreedyViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class SiteSet:
    vertices: np.ndarray
    positions: np.ndarray
    seed: int | None = None

    @property
    def m(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    generator: str

    @property
    def m(self) -> int:
        return len(self.values)


@dataclass
class SiteGraph:
    """Undirected adjacency over sites; each edge tagged delaunay/augmented."""

    m: int
    neighbors: list = field(default_factory=list)
    tags: dict = field(default_factory=dict)
    generator: str | None = None

    @classmethod
    def empty(cls, m: int) -> "SiteGraph":
        return cls(m, [set() for _ in range(m)], {})

    def add_edge(self, a: int, b: int, tag: str) -> None:
        if a == b:
            raise ValueError("self loops are not allowed")
        a, b = int(a), int(b)
        self.neighbors[a].add(b)
        self.neighbors[b].add(a)
        self.tags.setdefault((min(a, b), max(a, b)), tag)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.neighbors[a]

    def edges(self, tag: str | None = None) -> list:
        return sorted(e for e, t in self.tags.items() if tag is None or t == tag)

    def neighbor_array(self, s: int) -> np.ndarray:
        return np.array(sorted(self.neighbors[s]), dtype=np.int64)


def sample_sites(
    mesh: TriMesh, m: int, seed=0, domain: DomainSpec | None = None,
    clearance: float | None = None, separation: float = 0.7,
) -> SiteSet:
    """Draw ``m`` interior mesh vertices by rejection.

    Candidates closer than ``clearance`` (default: mean mesh edge length) to
    the boundary are excluded; accepted sites keep a minimum pairwise
    distance of ``separation * sqrt(area / m)``.
    """
    if m < 2:
        raise SamplingError("need at least 2 sites")
    rng = np.random.default_rng(seed)
    if clearance is None:
        clearance = mesh.mean_edge_length
    cand = mesh.interior_vertices
    if domain is not None:
        bd = domain.boundary_distance(mesh.vertices[cand])
        area = domain.area
    else:
        bd = _mesh_boundary_distance(mesh, cand)
        area = float(mesh.triangle_areas.sum())
    cand = cand[bd >= clearance - 1e-12]
    if len(cand) < m:
        raise SamplingError(f"only {len(cand)} interior vertices meet the clearance")
    min_sep = separation * math.sqrt(area / m)
    pts = mesh.vertices
    chosen: list[int] = []
    chosen_pts = np.empty((0, 2))
    attempts = 0
    while len(chosen) < m:
        attempts += 1
        if attempts > 100 * m:
            raise SamplingError(f"placed {len(chosen)} of {m} sites in {100 * m} attempts")
        v = int(cand[rng.integers(len(cand))])
        if len(chosen) and np.min(np.linalg.norm(chosen_pts - pts[v], axis=1)) < min_sep:
            continue
        chosen.append(v)
        chosen_pts = np.vstack([chosen_pts, pts[v]])
    vs = np.array(chosen, dtype=np.int64)
    return SiteSet(vs, pts[vs].copy(), seed)


def _mesh_boundary_distance(mesh: TriMesh, idx) -> np.ndarray:
    bpts = mesh.vertices[mesh.is_boundary]
    p = mesh.vertices[idx]
    return np.min(np.linalg.norm(p[:, None, :] - bpts[None, :, :], axis=2), axis=1)


def distance_matrix(coords: CoordinateField | np.ndarray, sites: SiteSet | None, g) -> DistanceMatrix:
    """m x m matrix of d(site_s, site_t); ``coords`` may already be site rows."""
    rows = coords.values if isinstance(coords, CoordinateField) else np.asarray(coords, dtype=float)
    if sites is not None:
        rows = rows[sites.vertices]
    gen = resolve_generator(g)
    D = pairwise_divergence(rows, rows, gen)
    np.fill_diagonal(D, 0.0)
    return DistanceMatrix(D, generator_name(gen))


def _values(D):
    return D.values if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=float)


def local_voronoi_violators(graph: SiteGraph, D, s: int) -> list[int]:
    """Sites t != s with D[s, t] < D[r, t] for every neighbour r of s."""
    Dv = _values(D)
    nb = graph.neighbor_array(s)
    if len(nb) == 0:
        mask = np.ones(len(Dv), dtype=bool)
    else:
        mask = Dv[s] < Dv[nb].min(axis=0)
    mask[s] = False
    return [int(t) for t in np.flatnonzero(mask)]


def delaunay_site_graph(sites: SiteSet, domain: DomainSpec | None = None) -> SiteGraph:
    """CDT of the sites, constrained by the domain's polygon edges.

    Polygon vertices join the triangulation so its edges can be enforced;
    only site-site edges inside the domain are kept.
    """
    P = np.asarray(sites.positions, dtype=float)
    m = len(P)
    graph = SiteGraph.empty(m)
    if m == 2:
        graph.add_edge(0, 1, DELAUNAY)
        return graph
    if domain is None:
        mesh = constrained_delaunay(P)
        tris = mesh.triangles
    else:
        loops = domain.loops
        pts = np.concatenate([P, *loops])
        segs = []
        off = m
        for lp in loops:
            idx = np.arange(len(lp)) + off
            segs += list(zip(idx, np.roll(idx, -1)))
            off += len(lp)
        mesh = constrained_delaunay(pts, segs)
        cen = pts[mesh.triangles].mean(axis=1)
        tris = mesh.triangles[domain.contains(cen)]
    for t in tris:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if a < m and b < m:
                graph.add_edge(a, b, DELAUNAY)
    return graph


def augment_to_greedy(sites: SiteSet, domain: DomainSpec | None, D, graph: SiteGraph | None = None) -> SiteGraph:
    """Add edges to the site CDT until the greedy routing property holds.

    Sites are swept in index order; while a site has violators it gains an
    edge to its Euclidean-nearest non-neighbour.  Sweeps repeat until one
    adds nothing.
    """
    Dv = _values(D)
    m = len(Dv)
    if graph is None:
        graph = delaunay_site_graph(sites, domain)
    P = np.asarray(sites.positions, dtype=float)
    by_distance = [
        np.argsort(np.linalg.norm(P - P[s], axis=1), kind="stable") for s in range(m)
    ]
    sweeps = 0
    while True:
        sweeps += 1
        added = 0
        for s in range(m):
            cursor = 0
            order = by_distance[s]
            while local_voronoi_violators(graph, Dv, s):
                while cursor < m and (order[cursor] == s or graph.has_edge(s, order[cursor])):
                    cursor += 1
                if cursor >= m:
                    raise GreedyViolation(f"site {s} is adjacent to every site but still has violators")
                graph.add_edge(s, int(order[cursor]), AUGMENTED)
                added += 1
        log.debug("sweep %d added %d edges", sweeps, added)
        if added == 0:
            break
    if isinstance(D, DistanceMatrix):
        graph.generator = D.generator
    _warn_ties(Dv)
    return graph


def _warn_ties(Dv):
    # only ties within a target column affect hop choice
    cols = np.sort(Dv, axis=0)
    if np.any(np.diff(cols[1:], axis=0) == 0):
        log.warning("distance matrix has exact ties; lowest site index wins")


def is_greedy(graph: SiteGraph, D) -> bool:
    """Exhaustive check: every ordered pair has a strictly improving neighbour."""
    Dv = _values(D)
    for s in range(len(Dv)):
        nb = graph.neighbor_array(s)
        if len(nb) == 0:
            return len(Dv) == 1
        best = Dv[nb].min(axis=0)
        ok = best < Dv[s]
        ok[s] = True
        if not ok.all():
            return False
    return True


def _next_hop(graph: SiteGraph, Dv, s: int, t: int) -> int:
    nb = graph.neighbor_array(s)
    if len(nb) == 0:
        return -1
    col = Dv[nb, t]
    best = col.min()
    if not best < Dv[s, t]:
        return -1
    return int(nb[col == best].min())


def greedy_route(graph: SiteGraph, D, s: int, t: int) -> list[int]:
    """Route from s to t, always to the neighbour closest to t."""
    Dv = _values(D)
    path = [int(s)]
    cur = int(s)
    while cur != t:
        if len(path) > len(Dv):
            raise GreedyViolation(f"route {s}->{t} exceeded {len(Dv) - 1} hops")
        nxt = _next_hop(graph, Dv, cur, t)
        if nxt < 0:
            raise GreedyViolation(f"no strictly improving neighbour at site {cur} towards {t}")
        cur = nxt
        path.append(cur)
    return path


def routing_tree(graph: SiteGraph, D, t: int) -> np.ndarray:
    """next_hop[s] towards t for every site (-1 at t)."""
    Dv = _values(D)
    nxt = np.full(len(Dv), -1, dtype=np.int64)
    for s in range(len(Dv)):
        if s == t:
            continue
        h = _next_hop(graph, Dv, s, t)
        if h < 0:
            raise GreedyViolation(f"no strictly improving neighbour at site {s} towards {t}")
        nxt[s] = h
    return nxt


def local_voronoi_region(mesh: TriMesh, coords: CoordinateField, graph: SiteGraph, sites: SiteSet, s: int, g) -> np.ndarray:
    """Mesh vertices z with d(site_s, z) < d(site_r, z) for all neighbours r."""
    gen = resolve_generator(g)
    rows = coords.values
    own = divergence_from(rows[sites.vertices[s]], rows, gen)
    mask = np.ones(coords.k, dtype=bool)
    for r in graph.neighbor_array(s):
        mask &= own < divergence_from(rows[sites.vertices[r]], rows, gen)
    return np.flatnonzero(mask)


def region_components(mesh: TriMesh, region: np.ndarray) -> int:
    """Connected components of a vertex subset in the mesh graph."""
    if len(region) == 0:
        return 0
    sub = mesh.adjacency[region][:, region]
    n, _ = csgraph.connected_components(sub, directed=False)
    return int(n)


class GreedyRoutingGraph(BaseEstimator):
    """Augmented Delaunay graph over sites with greedy routing.

    ``fit(X, positions, domain)`` takes the (m, n) site coordinate rows and
    (m, 2) site positions.  ``predict`` maps (source, target) site pairs to
    routes.
    """

    def __init__(self, generator="kl"):
        self.generator = generator

    def fit(self, X, positions, domain: DomainSpec | None = None):
        X = check_array(X, ensure_min_samples=2)
        positions = check_array(positions)
        if len(positions) != len(X):
            raise ValueError("one position per site row required")
        sites = SiteSet(np.arange(len(X)), positions)
        self.distances_ = distance_matrix(X, None, self.generator)
        self.sites_ = sites
        self.graph_ = augment_to_greedy(sites, domain, self.distances_)
        self.n_augmented_ = len(self.graph_.edges(AUGMENTED))
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "graph_")
        X = np.asarray(X, dtype=np.int64).reshape(-1, 2)
        return [greedy_route(self.graph_, self.distances_, int(s), int(t)) for s, t in X]

    def routing_tree(self, t: int) -> np.ndarray:
        check_is_fitted(self, "graph_")
        return routing_tree(self.graph_, self.distances_, t)
