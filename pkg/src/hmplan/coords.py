"""Reduced harmonic-measure coordinates on a triangle mesh.

The boundary is cut into ``n`` segments; coordinate ``j`` is the discrete
harmonic function equal to the j-th boundary basis vector on the boundary.
All ``n`` Dirichlet problems share one cotangent Laplacian, which is
factored once and reused for every right-hand side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .geometry import OUTSIDE, DomainSpec, TriMesh, barycentric, point_location

log = logging.getLogger(__name__)

BASIS_KINDS = ("box", "tent", "gaussian")
DEFAULT_CLAMP = 1e-12
RESIDUAL_TOL = 1e-8


class PartitionError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryPartition:
    """Breakpoints per boundary loop.

    ``breaks[l]`` holds positions into ``mesh.boundary_loops[l]`` (strictly
    increasing); ``arcs[l]`` the matching arc-length offsets from the loop's
    first vertex.  Segment order is loop by loop, breakpoint by breakpoint.
    """

    breaks: tuple
    arcs: tuple
    basis: str = "box"

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.breaks)

    def with_basis(self, basis: str) -> "BoundaryPartition":
        if basis not in BASIS_KINDS:
            raise ValueError(f"unknown basis {basis!r}")
        return BoundaryPartition(self.breaks, self.arcs, basis)

    def breakpoint_vertices(self, mesh: TriMesh) -> np.ndarray:
        return np.concatenate(
            [np.asarray(mesh.boundary_loops[l])[b] for l, b in enumerate(self.breaks)]
        )


def loop_arclength(mesh: TriMesh, l: int) -> tuple[np.ndarray, float]:
    """Cumulative arc length at each vertex of loop ``l`` and the loop length."""
    pts = mesh.vertices[list(mesh.boundary_loops[l])]
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)[:-1]])
    return s, float(seg.sum())


def _snap(s: np.ndarray, total: float, target: float) -> int:
    d = np.abs(s - target % total)
    d = np.minimum(d, total - d)
    return int(np.argmin(d))


def _match_loops(mesh: TriMesh, domain: DomainSpec) -> list[int]:
    """Mesh loop index for each domain loop (outer first)."""
    out = []
    for loop in domain.loops:
        best, best_d = None, np.inf
        for l, mloop in enumerate(mesh.boundary_loops):
            d = np.min(np.linalg.norm(mesh.vertices[list(mloop)] - loop[0], axis=1))
            if d < best_d:
                best, best_d = l, d
        out.append(best)
    if sorted(out) != list(range(len(mesh.boundary_loops))):
        raise PartitionError("domain loops do not match the mesh boundary loops")
    return out


def _finish(mesh, per_loop, basis) -> BoundaryPartition:
    breaks, arcs = [], []
    for l in range(len(mesh.boundary_loops)):
        pos = sorted(per_loop.get(l, []))
        if len(set(pos)) != len(pos):
            raise PartitionError(
                f"loop {l}: two breakpoints snap to the same vertex "
                "(segments shorter than the boundary mesh spacing)"
            )
        if not pos:
            raise PartitionError(f"loop {l} has no breakpoint")
        s, _ = loop_arclength(mesh, l)
        breaks.append(np.array(pos, dtype=np.int64))
        arcs.append(s[pos])
    part = BoundaryPartition(tuple(breaks), tuple(arcs), basis)
    if part.n < 3:
        raise PartitionError(f"need at least 3 segments, got {part.n}")
    return part


def partition_boundary(
    mesh: TriMesh, domain: DomainSpec, max_seg_len: float = math.inf, basis: str = "box"
) -> BoundaryPartition:
    """One breakpoint per polygon vertex; long polygon edges split evenly
    until every segment is at most ``max_seg_len`` long."""
    if not max_seg_len > 0:
        raise PartitionError("max_seg_len must be positive")
    per_loop: dict[int, list[int]] = {}
    for dl, ml in enumerate(_match_loops(mesh, domain)):
        loop_pts = mesh.vertices[list(mesh.boundary_loops[ml])]
        s, total = loop_arclength(mesh, ml)
        corners = [
            int(np.argmin(np.linalg.norm(loop_pts - c, axis=1))) for c in domain.loops[dl]
        ]
        pos = []
        for i, c0 in enumerate(corners):
            c1 = corners[(i + 1) % len(corners)]
            length = (s[c1] - s[c0]) % total
            if len(corners) == 1:
                length = total
            pieces = 1 if not math.isfinite(max_seg_len) else max(
                1, math.ceil(length / max_seg_len - 1e-9)
            )
            pos.append(c0)
            for p in range(1, pieces):
                pos.append(_snap(s, total, s[c0] + length * p / pieces))
        per_loop[ml] = pos
    return _finish(mesh, per_loop, basis)


def uniform_partition(
    mesh: TriMesh, counts, start_points=None, basis: str = "box"
) -> BoundaryPartition:
    """``counts[l]`` equal-arc-length segments on loop ``l``.

    An int applies to the outer loop; every other loop then gets a single
    segment.  ``start_points[l]`` picks the first breakpoint as the loop
    vertex nearest to that point (default: the loop's first vertex).
    """
    nloops = len(mesh.boundary_loops)
    if np.isscalar(counts):
        counts = [int(counts)] + [1] * (nloops - 1)
    if len(counts) != nloops:
        raise PartitionError("one count per boundary loop required")
    per_loop = {}
    for l, c in enumerate(counts):
        if c < 1:
            raise PartitionError("each loop needs at least one segment")
        s, total = loop_arclength(mesh, l)
        start = 0.0
        if start_points is not None and start_points[l] is not None:
            pts = mesh.vertices[list(mesh.boundary_loops[l])]
            start = s[int(np.argmin(np.linalg.norm(pts - np.asarray(start_points[l]), axis=1)))]
        per_loop[l] = [_snap(s, total, start + total * i / c) for i in range(c)]
    return _finish(mesh, per_loop, basis)


def basis_vectors(mesh: TriMesh, partition: BoundaryPartition) -> np.ndarray:
    """Boundary data for each coordinate as a (k, n) array (zero on interior
    vertices).  Rows of boundary vertices sum to one for every basis kind."""
    k = mesh.n_vertices
    B = np.zeros((k, partition.n))
    col = 0
    for l, brk in enumerate(partition.breaks):
        loop = np.asarray(mesh.boundary_loops[l])
        s, total = loop_arclength(mesh, l)
        m = len(brk)
        cols = np.arange(col, col + m)
        if partition.basis == "box":
            # half-open [t_j, t_{j+1}): a breakpoint starts its segment
            owner = np.searchsorted(brk, np.arange(len(loop)), side="right") - 1
            owner[owner < 0] = m - 1
            B[loop, cols[owner]] = 1.0
        elif partition.basis == "tent":
            B[loop[:, None], cols[None, :]] = _tent(s, total, s[brk])
        elif partition.basis == "gaussian":
            B[loop[:, None], cols[None, :]] = _gauss(s, total, s[brk])
        else:
            raise ValueError(f"unknown basis {partition.basis!r}")
        col += m
    return B


def _tent(s, total, t):
    m = len(t)
    if m == 1:
        return np.ones((len(s), 1))
    out = np.zeros((len(s), m))
    for j in range(m):
        fwd = (t[(j + 1) % m] - t[j]) % total or total
        back = (t[j] - t[(j - 1) % m]) % total or total
        ahead = (s - t[j]) % total  # ccw distance from t_j
        behind = (t[j] - s) % total
        up = np.where(ahead < fwd, 1.0 - ahead / fwd, 0.0)
        down = np.where(behind < back, 1.0 - behind / back, 0.0)
        out[:, j] = np.maximum(up, down)
    if m == 2:
        # both neighbours are the same breakpoint; tents overlap from both sides
        out[:, 1] = 1.0 - out[:, 0]
    return out


def _gauss(s, total, t):
    m = len(t)
    lengths = np.array([((t[(j + 1) % m] - t[j]) % total) or total for j in range(m)])
    mids = t + lengths / 2.0
    d = np.abs(s[:, None] - mids[None, :]) % total
    d = np.minimum(d, total - d)
    sigma = lengths / 2.0
    out = np.exp(-(d**2) / (2.0 * sigma[None, :] ** 2))
    return out / out.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class LaplaceSystem:
    """Cotangent Laplacian restricted to interior vertices, factored once."""

    weights: sparse.csr_matrix
    A: sparse.csc_matrix
    coupling: sparse.csr_matrix
    interior: np.ndarray
    boundary: np.ndarray
    factor: object = field(repr=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.factor.solve(rhs)


def cotangent_weights(mesh: TriMesh) -> sparse.csr_matrix:
    """Symmetric k x k matrix of edge weights (cot a + cot b) / 2."""
    V, T = mesh.vertices, mesh.triangles
    rows, cols, vals = [], [], []
    for i in range(3):
        o = T[:, i]
        u = T[:, (i + 1) % 3]
        w = T[:, (i + 2) % 3]
        e1 = V[u] - V[o]
        e2 = V[w] - V[o]
        dot = (e1 * e2).sum(axis=1)
        cross = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        half_cot = 0.5 * dot / cross
        rows += [u, w]
        cols += [w, u]
        vals += [half_cot, half_cot]
    k = mesh.n_vertices
    W = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(k, k)
    ).tocsr()
    W.sum_duplicates()
    return W


def assemble_laplacian(mesh: TriMesh) -> LaplaceSystem:
    W = cotangent_weights(mesh)
    k = mesh.n_vertices
    L = sparse.diags(np.asarray(W.sum(axis=1)).ravel()) - W
    interior = mesh.interior_vertices
    boundary = np.flatnonzero(mesh.is_boundary)
    if len(interior) == 0:
        raise SolverError("mesh has no interior vertices")
    L = L.tocsr()
    A = L[interior][:, interior].tocsc()
    coupling = W[interior][:, boundary].tocsr()
    # diagonal pivoting with a symmetric ordering: U's diagonal holds the
    # Cholesky pivots, so a non-positive one means A is not positive definite
    lu = spla.splu(
        A,
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options={"SymmetricMode": True},
    )
    piv = lu.U.diagonal()
    bad = np.flatnonzero(piv <= 0)
    if len(bad):
        row = int(interior[lu.perm_c[bad[0]]])
        raise SolverError(
            f"Laplacian not positive definite: pivot {piv[bad[0]]:.3e} at mesh vertex {row}"
        )
    log.debug("factored %d x %d cotangent system (k=%d)", A.shape[0], A.shape[1], k)
    return LaplaceSystem(W, A, coupling, interior, boundary, lu)


@dataclass(frozen=True)
class CoordinateField:
    """(k, n) reduced coordinates, one row per mesh vertex."""

    values: np.ndarray
    basis: str = "box"
    clamp: float = DEFAULT_CLAMP
    partition: BoundaryPartition | None = field(default=None, compare=False)
    raw_min: float = field(default=0.0, compare=False)

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def rows(self, idx) -> np.ndarray:
        return self.values[np.asarray(idx)]


def solve_coordinates(
    system: LaplaceSystem, basis: np.ndarray, clamp: float = DEFAULT_CLAMP,
    partition: BoundaryPartition | None = None, kind: str = "box",
) -> CoordinateField:
    """Solve all n Dirichlet problems against the shared factorization.

    Interior values are floored at ``clamp`` and rows renormalized; boundary
    rows keep their basis values.
    """
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2:
        raise ValueError("basis must be a (k, n) array")
    if basis.shape[1] < 3:
        raise ValueError("need at least 3 coordinates")
    rhs = system.coupling @ basis[system.boundary]
    phi = system.solve(rhs)
    res = system.A @ phi - rhs
    scale = np.maximum(np.linalg.norm(rhs, axis=0), 1e-300)
    rel = np.linalg.norm(res, axis=0) / scale
    worst = int(np.argmax(rel))
    if rel[worst] > RESIDUAL_TOL:
        raise SolverError(f"coordinate {worst}: relative residual {rel[worst]:.2e}")

    raw_min = float(phi.min()) if phi.size else 0.0
    phi = np.maximum(phi, clamp)
    phi /= phi.sum(axis=1, keepdims=True)
    values = basis.copy()
    values[system.interior] = phi
    return CoordinateField(values, kind if partition is None else partition.basis, clamp, partition, raw_min)


def harmonic_extension(system: LaplaceSystem, boundary_values: np.ndarray) -> np.ndarray:
    """Unclamped discrete harmonic extension of (k, c) boundary data."""
    out = np.array(boundary_values, dtype=float, copy=True)
    rhs = system.coupling @ out[system.boundary]
    out[system.interior] = system.solve(rhs)
    return out


class ReducedCoordinates(TransformerMixin, BaseEstimator):
    """Map planar points to reduced harmonic-measure coordinates.

    ``fit`` takes a :class:`TriMesh` (plus the domain when partitioning by
    polygon edges) and solves for the coordinate of every mesh vertex;
    ``transform`` interpolates them linearly at arbitrary points.

    Parameters
    ----------
    max_seg_len : float or None
        Partition by polygon edges, splitting edges longer than this.
        Requires ``domain`` at fit time.
    n_segments : int or None
        Uniform arc-length partition of the outer loop instead.
    basis : {'box', 'tent', 'gaussian'}
    clamp : float
        Floor applied to interior coordinates before renormalizing.
    """

    def __init__(self, max_seg_len=None, n_segments=None, basis="box", clamp=DEFAULT_CLAMP):
        self.max_seg_len = max_seg_len
        self.n_segments = n_segments
        self.basis = basis
        self.clamp = clamp

    def fit(self, X: TriMesh, y=None, domain: DomainSpec | None = None):
        if not isinstance(X, TriMesh):
            raise TypeError("ReducedCoordinates.fit expects a TriMesh")
        if self.basis not in BASIS_KINDS:
            raise ValueError(f"basis must be one of {BASIS_KINDS}")
        if self.n_segments is not None:
            part = uniform_partition(X, int(self.n_segments), basis=self.basis)
        else:
            if domain is None:
                raise ValueError("partitioning by polygon edges needs the domain")
            seg = math.inf if self.max_seg_len is None else float(self.max_seg_len)
            part = partition_boundary(X, domain, seg, basis=self.basis)
        self.mesh_ = X
        self.partition_ = part
        self.system_ = assemble_laplacian(X)
        self.field_ = solve_coordinates(
            self.system_, basis_vectors(X, part), clamp=self.clamp, partition=part
        )
        self.coordinates_ = self.field_.values
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "coordinates_")
        X = check_array(X, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValueError("expected planar points, shape (N, 2)")
        out = np.empty((len(X), self.coordinates_.shape[1]))
        T = self.mesh_.triangles
        for i, p in enumerate(X):
            t = point_location(self.mesh_, p)
            if t == OUTSIDE:
                raise ValueError(f"point {tuple(p)} lies outside the mesh")
            out[i] = barycentric(self.mesh_, t, p) @ self.coordinates_[T[t]]
        return out

    def fit_transform(self, X, y=None, **fit_params):
        """Fit on a mesh and return the per-vertex coordinate field."""
        return self.fit(X, y, **fit_params).coordinates_
