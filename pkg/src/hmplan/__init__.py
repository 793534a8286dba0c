"""Path planning and greedy routing with reduced harmonic-measure coordinates.

A planar polygonal domain is meshed, its boundary split into n segments, and
every mesh vertex gets the n harmonic measures of those segments.  Distances
between such coordinate rows are f-divergences; descending the distance to
a target along mesh edges gives a path, and an augmented Delaunay graph over
sampled sites supports greedy routing with the same distances.
"""
from .coords import (
    BoundaryPartition,
    CoordinateField,
    ReducedCoordinates,
    assemble_laplacian,
    basis_vectors,
    partition_boundary,
    solve_coordinates,
    uniform_partition,
)
from .divergence import (
    HELLINGER,
    KL,
    TV,
    TV_SMOOTHED,
    ConvexGenerator,
    dual,
    euclidean_sq,
    make_generator,
    pairwise_divergence,
    reduced_divergence,
)
from .geometry import (
    DomainSpec,
    TriMesh,
    constrained_delaunay,
    generate_dense_mesh,
    load_domain,
    make_domain,
    point_location,
)
from .planner import DistanceField, GradientPathPlanner, PlannedPath, descend, distance_field, path_tree
from .routing import (
    GreedyRoutingGraph,
    SiteGraph,
    SiteSet,
    augment_to_greedy,
    distance_matrix,
    greedy_route,
    local_voronoi_region,
    local_voronoi_violators,
    routing_tree,
    sample_sites,
)

__version__ = "0.1.0"
