"""Reactive recomposition of drone delivery routes on skyway networks."""
from .network import (
    DroneProfile,
    Edge,
    FailedEdgeView,
    GenParams,
    Node,
    SkywayNetwork,
    generate_network,
    load_network,
    save_network,
    with_failed_edge,
)
from .geometry import (
    Circle,
    ConvexPolygonRegion,
    Density,
    SquareUnion,
    WholeNetwork,
    build_cell_grid,
    build_circle,
    build_partial_areas,
    build_rhombus_regions,
    nodes_in_region,
)
from .pathfind import Path, SearchStats, astar, bellman_ford, brute_force_shortest, dijkstra
from .reactive import (
    Algorithm,
    FailureType,
    RecompositionResult,
    analyze_stage_skipping,
    cell_density_recompose,
    global_recompose,
    radius_recompose,
    recompose,
    two_phased_recompose,
)
from .service import (
    CompositionPlan,
    CustomerDeliveryRequest,
    DroneDeliveryService,
    FailureEvent,
    compose_initial,
    handle_failure,
    make_failure,
    splice_plan,
)

__version__ = "0.1.0"

__all__ = [
    "DroneProfile",
    "Edge",
    "FailedEdgeView",
    "GenParams",
    "Node",
    "SkywayNetwork",
    "generate_network",
    "load_network",
    "save_network",
    "with_failed_edge",
    "Circle",
    "ConvexPolygonRegion",
    "Density",
    "SquareUnion",
    "WholeNetwork",
    "build_cell_grid",
    "build_circle",
    "build_partial_areas",
    "build_rhombus_regions",
    "nodes_in_region",
    "Path",
    "SearchStats",
    "astar",
    "bellman_ford",
    "brute_force_shortest",
    "dijkstra",
    "Algorithm",
    "FailureType",
    "RecompositionResult",
    "analyze_stage_skipping",
    "cell_density_recompose",
    "global_recompose",
    "radius_recompose",
    "recompose",
    "two_phased_recompose",
    "CompositionPlan",
    "CustomerDeliveryRequest",
    "DroneDeliveryService",
    "FailureEvent",
    "compose_initial",
    "handle_failure",
    "make_failure",
    "splice_plan",
]
