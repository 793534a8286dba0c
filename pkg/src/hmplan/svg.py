"""Minimal SVG rendering of meshes, distance fields, paths and site graphs.

Colours follow one convention throughout: mesh edges thin gray, Delaunay
site edges black, augmented edges red, breakpoints blue, paths thick black,
targets red, sources green.  Field colours are linear in the value and
normalized per figure.
"""
from __future__ import annotations

import numpy as np

from .coords import CoordinateField
from .geometry import TriMesh
from .routing import AUGMENTED, DELAUNAY, SiteGraph

MESH_GRAY = "#b0b0b0"


def _fmt(x: float) -> str:
    return f"{x:.5g}"


class Figure:
    """Accumulates SVG elements in world coordinates (y up)."""

    def __init__(self, vertices, width: int = 800, pad: float = 0.03):
        v = np.asarray(vertices, dtype=float)
        lo, hi = v.min(axis=0), v.max(axis=0)
        span = max(float((hi - lo).max()), 1e-12)
        self.lo = lo - pad * span
        self.scale = width / (span * (1 + 2 * pad))
        ext = (hi - lo + 2 * pad * span) * self.scale
        self.width, self.height = float(ext[0]), float(ext[1])
        self.unit = span / 400.0
        self.parts: list[str] = []

    def xy(self, p) -> tuple[float, float]:
        x = (p[0] - self.lo[0]) * self.scale
        y = self.height - (p[1] - self.lo[1]) * self.scale
        return x, y

    def _pts(self, pts) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(self.xy, pts))

    def polygon(self, pts, fill: str, stroke: str = "none", width: float = 0.0):
        self.parts.append(
            f'<polygon points="{self._pts(pts)}" fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(width)}"/>'
        )

    def polyline(self, pts, stroke: str, width: float):
        self.parts.append(
            f'<polyline points="{self._pts(pts)}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(width)}" stroke-linejoin="round"/>'
        )

    def segments(self, a, b, stroke: str, width: float):
        if len(a) == 0:
            return
        d = " ".join(
            f"M{_fmt(x0)} {_fmt(y0)}L{_fmt(x1)} {_fmt(y1)}"
            for (x0, y0), (x1, y1) in zip(map(self.xy, a), map(self.xy, b))
        )
        self.parts.append(f'<path d="{d}" stroke="{stroke}" stroke-width="{_fmt(width)}" fill="none"/>')

    def circle(self, p, r: float, fill: str):
        x, y = self.xy(p)
        self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}"/>')

    def to_string(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">'
        )
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.parts, "</svg>"]) + "\n"


def field_colors(values) -> list[str]:
    """Linear white-to-orange ramp over [min, max] of the finite ``values``;
    non-finite entries get the top colour."""
    v = np.asarray(values, dtype=float)
    ok = np.isfinite(v)
    lo, hi = (float(v[ok].min()), float(v[ok].max())) if ok.any() else (0.0, 0.0)
    t = np.ones_like(v)
    t[ok] = (v[ok] - lo) / (hi - lo) if hi > lo else 0.0
    low, high = np.array([255, 255, 255]), np.array([230, 110, 20])
    rgb = np.rint(low + np.outer(t, high - low)).astype(int)
    return [f"#{r:02x}{g:02x}{b:02x}" for r, g, b in rgb]


def breakpoints_from_coords(mesh: TriMesh, coords: CoordinateField) -> np.ndarray:
    """Recover breakpoint vertices from the boundary rows.

    box: where the owning segment changes along a loop.  tent: vertices
    whose row is an indicator.  gaussian: none (no sharp breakpoints).
    """
    out = []
    for loop in mesh.boundary_loops:
        loop = np.asarray(loop)
        rows = coords.values[loop]
        if coords.basis == "box":
            owner = rows.argmax(axis=1)
            out.append(loop[owner != np.roll(owner, 1)])
        elif coords.basis == "tent":
            out.append(loop[rows.max(axis=1) >= 1.0 - 1e-12])
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def render(
    mesh: TriMesh, field=None, coords: CoordinateField | None = None, paths=(),
    graph: SiteGraph | None = None, site_positions=None, target=None, sources=(),
    show_mesh: bool = True, width: int = 800,
) -> str:
    """Compose a figure; every argument except ``mesh`` is optional.

    ``target`` and ``sources`` are mesh vertex indices; ``paths`` are lists of
    mesh vertex indices or (N, 2) position arrays.
    """
    fig = Figure(mesh.vertices, width)
    V = mesh.vertices
    u = fig.unit * fig.scale
    if field is not None:
        vals = np.asarray(getattr(field, "values", field), dtype=float)
        for tri, col in zip(mesh.triangles, field_colors(vals[mesh.triangles].mean(axis=1))):
            fig.polygon(V[tri], col, col, 0.3)
    if show_mesh:
        e = mesh.edges
        fig.segments(V[e[:, 0]], V[e[:, 1]], MESH_GRAY, 0.25 * u)
    for loop in mesh.boundary_loops:
        fig.polyline(V[list(loop) + [loop[0]]], "black", 0.8 * u)
    if graph is not None:
        P = np.asarray(site_positions, dtype=float)
        for tag, col, w in ((DELAUNAY, "black", 0.6), (AUGMENTED, "red", 0.8)):
            ed = np.array(graph.edges(tag), dtype=np.int64).reshape(-1, 2)
            fig.segments(P[ed[:, 0]], P[ed[:, 1]], col, w * u)
        for p in P:
            fig.circle(p, 1.5 * u, "black")
    if coords is not None:
        for b in breakpoints_from_coords(mesh, coords):
            fig.circle(V[b], 2.5 * u, "blue")
    for path in paths:
        pts = np.asarray(path)
        if pts.ndim == 1:
            pts = V[pts.astype(np.int64)]
        if len(pts) > 1:
            fig.polyline(pts, "black", 2.0 * u)
    for s in sources:
        fig.circle(V[int(s)], 3.0 * u, "green")
    if target is not None:
        fig.circle(V[int(target)], 3.5 * u, "red")
    return fig.to_string()
