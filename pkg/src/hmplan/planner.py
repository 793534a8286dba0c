"""Gradient-descent path planning on the vertex graph of a triangle mesh."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .coords import CoordinateField
from .divergence import ConvexGenerator, divergence_to, make_generator
from .geometry import TriMesh

REACHED = "reached"
STUCK = "stuck"
NO_HOP = -1


class PlanningError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceField:
    target: int
    values: np.ndarray
    generator: str


@dataclass(frozen=True)
class PlannedPath:
    vertices: tuple
    status: str
    distances: tuple

    def __len__(self) -> int:
        return len(self.vertices)


def resolve_generator(g) -> ConvexGenerator | None:
    """Accept a generator, a generator name, or 'l2' (returns None)."""
    if g is None or isinstance(g, ConvexGenerator):
        return g
    if g == "l2":
        return None
    return make_generator(g)


def generator_name(g) -> str:
    g = resolve_generator(g)
    return "l2" if g is None else g.name


def distance_field(coords: CoordinateField, target: int, g, mesh: TriMesh | None = None) -> DistanceField:
    """d(coords[v], coords[target]) for every vertex v."""
    target = int(target)
    if not 0 <= target < coords.k:
        raise PlanningError(f"target {target} out of range")
    y = coords.values[target]
    if mesh is not None and mesh.is_boundary[target]:
        raise PlanningError(f"target {target} is a boundary vertex")
    if np.any(y <= 0):
        raise PlanningError(f"target {target} has zero coordinates (boundary vertex?)")
    gen = resolve_generator(g)
    vals = divergence_to(coords.values, y, gen)
    vals[target] = 0.0
    if not np.all(np.isfinite(vals)):
        raise PlanningError("distance field has non-finite values")
    return DistanceField(target, vals, generator_name(gen))


def _best_neighbor(adj, values, v):
    nb = adj.indices[adj.indptr[v] : adj.indptr[v + 1]]
    if len(nb) == 0:
        return NO_HOP
    vals = values[nb]
    best = vals.min()
    if not best < values[v]:
        return NO_HOP
    return int(nb[vals == best].min())


def path_tree(mesh: TriMesh, field: DistanceField) -> np.ndarray:
    """next_hop[v]: steepest strictly improving neighbour, or -1."""
    adj = mesh.adjacency
    vals = field.values
    nxt = np.full(mesh.n_vertices, NO_HOP, dtype=np.int64)
    for v in range(mesh.n_vertices):
        if v != field.target:
            nxt[v] = _best_neighbor(adj, vals, v)
    return nxt


def descend(mesh: TriMesh, field: DistanceField, source: int) -> PlannedPath:
    """Follow steepest strict decrease from ``source``; ties go to the lowest index."""
    adj = mesh.adjacency
    vals = field.values
    v = int(source)
    path = [v]
    for _ in range(mesh.n_vertices):
        if v == field.target:
            break
        u = _best_neighbor(adj, vals, v)
        if u == NO_HOP:
            break
        v = u
        path.append(v)
    status = REACHED if path[-1] == field.target else STUCK
    return PlannedPath(tuple(path), status, tuple(float(vals[p]) for p in path))


def count_stuck(mesh: TriMesh, field: DistanceField, vertices=None) -> int:
    """Number of listed vertices (default: all interior) that are local minima
    other than the target."""
    nxt = path_tree(mesh, field)
    if vertices is None:
        vertices = mesh.interior_vertices
    vertices = np.asarray(vertices)
    return int(np.sum((nxt[vertices] == NO_HOP) & (vertices != field.target)))


class GradientPathPlanner(BaseEstimator):
    """Mesh-vertex planner over a precomputed coordinate field.

    ``fit(mesh, coords)`` stores the inputs; ``predict`` plans one path per
    (source, target) row.
    """

    def __init__(self, generator="kl"):
        self.generator = generator

    def fit(self, X: TriMesh, y: CoordinateField):
        if y.k != X.n_vertices:
            raise ValueError("coordinate field does not match the mesh")
        self.mesh_ = X
        self.coords_ = y
        self._fields = {}
        return self

    def field(self, target: int) -> DistanceField:
        check_is_fitted(self, "mesh_")
        if target not in self._fields:
            self._fields[target] = distance_field(self.coords_, target, self.generator, self.mesh_)
        return self._fields[target]

    def predict(self, X):
        """X: (N, 2) integer array of (source, target) vertex pairs."""
        X = np.asarray(X, dtype=np.int64).reshape(-1, 2)
        return [descend(self.mesh_, self.field(int(t)), int(s)) for s, t in X]
