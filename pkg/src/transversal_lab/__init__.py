"""Transversal and piercing computations for families of convex (and compound) bodies."""

from .errors import *  # noqa: F401,F403
from .geometry import (
    AxisBox,
    Ball,
    CompoundBody,
    Cone,
    ConvexPolygon2,
    Interval,
    KFlat,
    OrientedRect2,
    Polyline,
    Polytope,
    RayRegion,
    Triangle2,
    body_distance,
    central_projection,
    cone_contains,
    dist_body_flat,
    dist_point_flat,
    family_sigma,
    m_growth,
    radii,
    ray_region_contains,
)
from .transversal import (
    DependenceCertificate,
    TransversalAnswer,
    axis_flat_transversal,
    common_point,
    flat_transversal,
    has_pq_property,
    is_k_dependent,
    line_transversal_2d,
    pierces,
    transversal,
)
from .stabbing import (
    DisjointChain,
    box_point_transversal,
    extend_disjoint_chain,
    find_nested_disjoint_pair,
    heterochromatic_disjoint_boxes,
    heterochromatic_disjoint_intervals,
    max_disjoint_intervals,
    min_piercing_number,
    min_point_stab_intervals,
    set_cover_exact,
)
from .sequences import FamilyStream, build_exclusion_cone, build_independent, extend_independent, greedy_disjoint_heterochromatic

__version__ = "0.1.0"
