"""Blocking-probability analytics and simulation for elastic optical
networks with spectrum-conversion-capable cross-connects."""

from .analyzer import (
    AnalysisConfig,
    AnalysisResult,
    demand_blocking,
    fixed_point,
    network_blocking,
    phi_update,
)
from .errors import InputError, SimulatorFault, UnreachableError
from .lightpath import (
    FULL,
    SHARE_PER_LINK,
    SHARE_PER_NODE,
    SIMPLE,
    ArchitectureMap,
    LinkFreeProbs,
    NodeArchitecture,
    blocking_full_at,
    blocking_full_conversion,
    blocking_without_conversion,
    converter_layout,
    exact_layout_success,
    layout_availability,
    layout_power_set,
    lightpath_blocking,
    load_architectures,
    node_mean_free_prob,
    segment_success_prob,
    share_per_link_availability,
    share_per_node_availability,
    uniform_architectures,
)
from .placement import (
    PlacementResult,
    effective_converters,
    place_brute_force,
    place_heuristic,
    rank_inventory,
)
from .runprob import RunProbTable, ramp, run_probability, run_probability_bruteforce
from .simulator import (
    NetworkState,
    SimConfig,
    SimResult,
    admit,
    release,
    simulate,
)
from .topology import (
    CrossingStats,
    DemandSpec,
    Link,
    NetworkGraph,
    RoutedPath,
    crossing_stats,
    load_demands,
    load_topology,
    network_traffic,
    route_all,
    shortest_path,
)

__version__ = "0.1.0"
