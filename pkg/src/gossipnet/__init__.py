"""gossipnet: expected gossip audiences on social graphs.

Computes how many of an actor's neighbors learn about an act (exactly,
by Monte-Carlo sampling, or through a random-neighborhood analytic
approximation), grows networks by trust-weighted and friend-of-friend
attachment, ingests plain-text edge lists, and reproduces structural
statistics.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND, derive_seed
from .audience import (
    AudienceEstimate,
    AudienceRow,
    EnumerationCapError,
    GossipParams,
    audience_analytic,
    audience_analytic_edge,
    audience_exact,
    audience_mc,
    audience_small_p,
    audience_table,
    compute_audience,
    global_audience_analytic,
    global_audience_mc,
    global_percolation_audience,
    mean_outgoing_audience,
    percolation_threshold,
)
from .generators import (
    GenConfig,
    gen_ba,
    gen_er,
    gen_fof,
    gen_gaussian,
    gen_tba,
    gen_ws,
    generate,
)
from .graph import (
    Graph,
    NeighborhoodView,
    PathLength,
    build_graph,
    embeddedness,
    induced_subgraph,
    largest_component,
    local_clustering,
    mean_shortest_path,
    neighborhood_view,
    node_embeddedness,
    reachable_set,
)
from .ingest import (
    CommunityLabeling,
    label_propagation,
    parse_edge_list,
    subsample,
    write_edge_list,
)
from .reliability import ReliabilityTable, reliability_connected, two_terminal
from .stats import (
    PowerLawFit,
    StatsReport,
    SweepResult,
    ks_distance,
    power_law_slope,
    summarize,
    sweep,
)

__all__ = [
    "AudienceEstimate",
    "AudienceRow",
    "BACKEND",
    "CommunityLabeling",
    "EnumerationCapError",
    "GenConfig",
    "GossipParams",
    "Graph",
    "NeighborhoodView",
    "PathLength",
    "PowerLawFit",
    "ReliabilityTable",
    "StatsReport",
    "SweepResult",
    "audience_analytic",
    "audience_analytic_edge",
    "audience_exact",
    "audience_mc",
    "audience_small_p",
    "audience_table",
    "build_graph",
    "compute_audience",
    "derive_seed",
    "embeddedness",
    "gen_ba",
    "gen_er",
    "gen_fof",
    "gen_gaussian",
    "gen_tba",
    "gen_ws",
    "generate",
    "global_audience_analytic",
    "global_audience_mc",
    "global_percolation_audience",
    "induced_subgraph",
    "ks_distance",
    "label_propagation",
    "largest_component",
    "local_clustering",
    "mean_outgoing_audience",
    "mean_shortest_path",
    "neighborhood_view",
    "node_embeddedness",
    "parse_edge_list",
    "percolation_threshold",
    "power_law_slope",
    "reachable_set",
    "reliability_connected",
    "subsample",
    "summarize",
    "sweep",
    "two_terminal",
    "write_edge_list",
]
