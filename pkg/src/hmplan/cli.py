"""Command-line pipeline: mesh -> coords -> field -> plan, graph -> route.

Every stage reads and writes the text formats in :mod:`hmplan.formats`, so
the output of one subcommand is accepted unchanged by the next.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import formats, svg
from .coords import BASIS_KINDS, DEFAULT_CLAMP, ReducedCoordinates
from .geometry import dump_domain, generate_dense_mesh, load_domain
from .planner import descend, distance_field, generator_name
from .routing import AUGMENTED, augment_to_greedy, distance_matrix, greedy_route, sample_sites
from .verify import run_disk_suite

GENERATORS = ("kl", "hellinger", "tv", "l2")

log = logging.getLogger("hmplan")


class StageError(RuntimeError):
    def __init__(self, stage: str, msg: str):
        super().__init__(f"{stage}: {msg}")
        self.stage = stage


def _read(path, what: str) -> str:
    if path is None:
        raise ValueError(f"--{what} is required")
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"{what} file {str(p)!r} does not exist")
    return p.read_text()


def _write(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _positive(kind):
    def parse(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {s}")
        return v

    return parse


def _nonneg_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative index, got {s}")
    return v


# -- subcommands ---------------------------------------------------------------

def cmd_mesh(a) -> int:
    domain = load_domain(_read(a.domain, "domain"))
    h = a.h if a.h is not None else domain.diameter / 50.0
    mesh = generate_dense_mesh(domain, h)
    _write(a.out, formats.dump_mesh(mesh))
    if a.svg:
        Path(a.svg).write_text(svg.render(mesh))
    log.info("mesh: %d vertices, %d triangles", mesh.n_vertices, len(mesh.triangles))
    return 0


def cmd_coords(a) -> int:
    mesh = formats.load_mesh(_read(a.mesh, "mesh"))
    domain = load_domain(_read(a.domain, "domain"))
    seg = math.inf if a.max_seg_len is None else a.max_seg_len
    est = ReducedCoordinates(max_seg_len=seg, basis=a.basis, clamp=a.clamp).fit(mesh, domain=domain)
    _write(a.out, formats.dump_coords(est.field_))
    if a.svg:
        Path(a.svg).write_text(svg.render(mesh, coords=est.field_))
    log.info("coords: n = %d segments", est.field_.n)
    return 0


def _load_field(a, mesh=None):
    if a.field:
        return formats.load_field(_read(a.field, "field"))
    coords = formats.load_coords(_read(a.coords, "coords"))
    if a.target is None:
        raise ValueError("--target is required")
    return distance_field(coords, a.target, a.f, mesh)


def cmd_field(a) -> int:
    mesh = formats.load_mesh(_read(a.mesh, "mesh")) if a.mesh else None
    coords = formats.load_coords(_read(a.coords, "coords"))
    if a.target is None:
        raise ValueError("--target is required")
    fld = distance_field(coords, a.target, a.f, mesh)
    _write(a.out, formats.dump_field(fld))
    if a.svg:
        if mesh is None:
            raise ValueError("--svg needs --mesh")
        Path(a.svg).write_text(svg.render(mesh, field=fld, target=fld.target))
    return 0


def cmd_plan(a) -> int:
    mesh = formats.load_mesh(_read(a.mesh, "mesh"))
    fld = _load_field(a, mesh)
    if len(fld.values) != mesh.n_vertices:
        raise ValueError("field does not match the mesh")
    if a.source is None:
        raise ValueError("--source is required")
    if not 0 <= a.source < mesh.n_vertices:
        raise ValueError(f"source {a.source} out of range")
    path = descend(mesh, fld, a.source)
    _write(a.out, formats.dump_path(path))
    if a.svg:
        Path(a.svg).write_text(
            svg.render(mesh, field=fld, paths=[list(path.vertices)], target=fld.target, sources=[a.source])
        )
    log.info("plan: %s after %d steps", path.status, len(path) - 1)
    return 0


def cmd_graph(a) -> int:
    mesh = formats.load_mesh(_read(a.mesh, "mesh"))
    coords = formats.load_coords(_read(a.coords, "coords"))
    domain = load_domain(_read(a.domain, "domain")) if a.domain else None
    if coords.k != mesh.n_vertices:
        raise ValueError("coordinates do not match the mesh")
    sites = sample_sites(mesh, a.m, a.seed, domain)
    D = distance_matrix(coords, sites, a.f)
    graph = augment_to_greedy(sites, domain, D)
    _write(a.out, formats.dump_graph(graph, sites))
    if a.site_coords:
        Path(a.site_coords).write_text(formats.dump_site_coords(coords, sites))
    if a.svg:
        Path(a.svg).write_text(
            svg.render(mesh, graph=graph, site_positions=sites.positions, show_mesh=False)
        )
    log.info("graph: %d sites, %d augmented edges", sites.m, len(graph.edges(AUGMENTED)))
    return 0


def cmd_route(a) -> int:
    graph, sites = formats.load_graph(_read(a.graph, "graph"))
    want = generator_name(a.f)
    if graph.generator is not None and graph.generator != want:
        raise ValueError(f"graph was built with generator {graph.generator!r}, not {want!r}")
    coords = formats.load_coords(_read(a.coords, "coords"))
    if sites.vertices.max(initial=-1) >= coords.k:
        raise ValueError("graph sites do not index into the coordinates")
    if a.source is None or a.target is None:
        raise ValueError("--source and --target are required (site indices)")
    for v in (a.source, a.target):
        if not 0 <= v < sites.m:
            raise ValueError(f"site {v} out of range (m = {sites.m})")
    D = distance_matrix(coords, sites, a.f)
    route = greedy_route(graph, D, a.source, a.target)
    _write(a.out, " ".join(map(str, route)) + "\n")
    if a.svg:
        mesh = formats.load_mesh(_read(a.mesh, "mesh"))
        Path(a.svg).write_text(svg.render(
            mesh, graph=graph, site_positions=sites.positions, paths=[sites.positions[route]],
            target=sites.vertices[a.target], sources=[sites.vertices[a.source]], show_mesh=False,
        ))
    return 0


def cmd_verify_disk(a) -> int:
    checks = run_disk_suite(a.scale)
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


def cmd_render(a) -> int:
    if not a.svg:
        raise ValueError("--svg is required")
    mesh = formats.load_mesh(_read(a.mesh, "mesh"))
    coords = formats.load_coords(_read(a.coords, "coords")) if a.coords else None
    fld = formats.load_field(_read(a.field, "field")) if a.field else None
    paths, sources = [], []
    if a.path:
        _, verts = formats.load_path(_read(a.path, "path"))
        paths.append(verts)
        sources.append(int(verts[0]))
    graph = positions = None
    if a.graph:
        graph, sites = formats.load_graph(_read(a.graph, "graph"))
        positions = sites.positions
    target = fld.target if fld is not None else a.target
    Path(a.svg).write_text(svg.render(
        mesh, field=fld, coords=coords, paths=paths, graph=graph, site_positions=positions,
        target=target, sources=sources, show_mesh=graph is None,
    ))
    return 0


def cmd_domain(a) -> int:
    # normalizes orientation; handy for checking a hand-written file
    _write(a.out, dump_domain(load_domain(_read(a.domain, "domain"))))
    return 0


COMMANDS = {
    "mesh": cmd_mesh,
    "coords": cmd_coords,
    "field": cmd_field,
    "plan": cmd_plan,
    "graph": cmd_graph,
    "route": cmd_route,
    "verify-disk": cmd_verify_disk,
    "render": cmd_render,
    "domain": cmd_domain,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hmplan", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, *flags):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        common = {
            "domain": lambda: sp.add_argument("--domain", help="domain file"),
            "mesh": lambda: sp.add_argument("--mesh", help="mesh file"),
            "coords": lambda: sp.add_argument("--coords", help="coordinate cache file"),
            "graph": lambda: sp.add_argument("--graph", help="graph file"),
            "field": lambda: sp.add_argument("--field", help="distance field file"),
            "path": lambda: sp.add_argument("--path", help="path file"),
            "f": lambda: sp.add_argument("--f", choices=GENERATORS, default="kl", help="distance generator"),
            "source": lambda: sp.add_argument("--source", type=_nonneg_int),
            "target": lambda: sp.add_argument("--target", type=_nonneg_int),
            "out": lambda: sp.add_argument("--out", help="output file (default stdout)"),
            "svg": lambda: sp.add_argument("--svg", help="also write an SVG figure"),
        }
        for f in flags:
            common[f]()
        return sp

    sp = add("mesh", "dense triangulation of a domain", "domain", "out", "svg")
    sp.add_argument("--h", type=_positive(float), help="target edge length (default diameter/50)")
    sp = add("coords", "reduced coordinates of every mesh vertex", "mesh", "domain", "out", "svg")
    sp.add_argument("--max-seg-len", type=_positive(float), help="split polygon edges longer than this")
    sp.add_argument("--basis", choices=BASIS_KINDS, default="box")
    sp.add_argument("--clamp", type=_positive(float), default=DEFAULT_CLAMP)
    add("field", "distance field to a target vertex", "coords", "mesh", "target", "f", "out", "svg")
    add("plan", "steepest-descent path on the mesh", "mesh", "field", "coords", "target", "f", "source", "out", "svg")
    sp = add("graph", "greedy routing graph over sampled sites", "mesh", "coords", "domain", "f", "out", "svg")
    sp.add_argument("--m", type=_positive(int), default=200, help="number of sites")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--site-coords", help="also write the m x n site coordinate rows")
    add("route", "greedy route between two sites", "graph", "coords", "mesh", "f", "source", "target", "out", "svg")
    sp = add("verify-disk", "certify the closed-form disk formulas")
    sp.add_argument("--scale", type=_positive(float), default=1.0, help="sample-count multiplier")
    add("render", "SVG of any combination of artifacts", "mesh", "coords", "field", "path", "graph", "target", "svg")
    add("domain", "validate and re-orient a domain file", "domain", "out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[a.command](a)
    except Exception as exc:  # every failure is reported with its stage
        err = StageError(a.command, str(exc) or type(exc).__name__)
        print(f"hmplan {err}", file=sys.stderr)
        if a.verbose:
            raise
        return 2


if __name__ == "__main__":
    sys.exit(main())
