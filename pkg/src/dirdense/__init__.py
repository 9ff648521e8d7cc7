"""Approximate directed densest subgraphs under streaming and round limits.

The directed density of a pair of vertex sets (S, T) is
|E(S,T)| / sqrt(|S| |T|).  Everything here works on the bipartite view of a
directed multigraph (an edge u->v joins left-u to right-v) and sweeps a
geometric grid of density and size-ratio guesses:

- ``peel_grid``: fixed-threshold peeling with a stopping rule that caps the
  iteration count logarithmically.
- ``run_stream_grid`` / ``run_stream_source``: one pass over the edges with
  4n machine integers per guess cell, plus an offline recount of the chosen
  answers.
- ``run_mpc``: simulated low-memory rounds via degree sampling and
  freezing, with explicit round accounting.
- ``baseline_grid``: classic average-degree peeling for comparison.
- ``exact_densest``: brute-force ground truth for desk-size graphs.
"""

from .baselines import BaselineCell, BaselineResult, baseline_grid, baseline_peel
from .graph import (
    BipartiteGraph,
    DensityValue,
    DirectedEdgeList,
    VertexPair,
    compare_density,
    density,
    pair_edge_count,
    to_bipartite,
)
from .ingest import (
    IngestError,
    IngestStats,
    StreamOrder,
    load_or_parse,
    order_stream,
    parse_snap,
    pull_source,
    read_cache,
    write_cache,
)
from .mpc import (
    MpcParams,
    MpcResult,
    RoundAccounting,
    audit_neighborhoods,
    mpc_phase,
    run_mpc,
    sample_edges,
    sampling_rate,
)
from .oracle import SizeCapExceeded, exact_densest
from .peel import (
    GuessGrid,
    PeelGridResult,
    PeelResult,
    Thresholds,
    peel,
    peel_grid,
    unguarded_peel,
)
from .streaming import (
    GridStreamState,
    StreamGridResult,
    ZChoice,
    level_cap,
    query_anytime,
    run_stream_grid,
    run_stream_source,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineCell",
    "BaselineResult",
    "BipartiteGraph",
    "DensityValue",
    "DirectedEdgeList",
    "GridStreamState",
    "GuessGrid",
    "IngestError",
    "IngestStats",
    "MpcParams",
    "MpcResult",
    "PeelGridResult",
    "PeelResult",
    "RoundAccounting",
    "SizeCapExceeded",
    "StreamGridResult",
    "StreamOrder",
    "Thresholds",
    "VertexPair",
    "ZChoice",
    "audit_neighborhoods",
    "baseline_grid",
    "baseline_peel",
    "compare_density",
    "density",
    "exact_densest",
    "level_cap",
    "load_or_parse",
    "mpc_phase",
    "order_stream",
    "pair_edge_count",
    "parse_snap",
    "peel",
    "peel_grid",
    "pull_source",
    "query_anytime",
    "read_cache",
    "run_mpc",
    "run_stream_grid",
    "run_stream_source",
    "sample_edges",
    "sampling_rate",
    "to_bipartite",
    "unguarded_peel",
    "write_cache",
    "__version__",
]
