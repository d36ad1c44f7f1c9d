"""Certified stable-set / induced-subdivision dichotomy.

For a graph G and parameters (t, k), extract() produces either a stable set
or an induced subdivision of the complete graph on t vertices, with every
connecting path of total length between 3 and floor(log2(n))^2. Both outcome
variants are plain data and are re-checked by independent verifiers that
share no code with the construction.
"""

from ._kernels import BACKEND
from .certificates import (
    CertificateSchemaError,
    DerivedConstants,
    Outcome,
    StableReport,
    StableSetCertificate,
    SubdivisionCertificate,
    SubdivisionReport,
    big_constant,
    bound_clique_free,
    bound_main,
    bound_no_degree,
    certificate_from_json,
    certificate_to_json,
    floor_log2_sq,
    general_h_order,
    verify_stable,
    verify_subdivision,
)
from .extractor import (
    FaithfulInvariantError,
    LayerState,
    ObstructionContext,
    Params,
    StarSystem,
    build_star_system,
    check_star_system,
    extract,
    sparsify_star_system,
    star_semi_sparsity,
    star_sparsity,
)
from .generators import chordal, gnp, planted_subdivision
from .graph import (
    Graph,
    GraphFormatError,
    Path,
    VertexSet,
    bfs_layers,
    closed_neighborhood,
    degree,
    degree_into,
    format_graph_text,
    greedy_stable,
    is_stable,
    load_graph,
    max_degree,
    parse_graph_text,
    path_is_induced,
    path_is_valid,
    save_graph,
    shortest_pair_path,
)
from .oracle import (
    OracleBudgetError,
    exact_max_stable,
    exhaustive_subdivision_search,
    induced_cycle_in_range,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CertificateSchemaError",
    "DerivedConstants",
    "FaithfulInvariantError",
    "Graph",
    "GraphFormatError",
    "LayerState",
    "ObstructionContext",
    "OracleBudgetError",
    "Outcome",
    "Params",
    "Path",
    "StableReport",
    "StableSetCertificate",
    "StarSystem",
    "SubdivisionCertificate",
    "SubdivisionReport",
    "VertexSet",
    "bfs_layers",
    "big_constant",
    "bound_clique_free",
    "bound_main",
    "bound_no_degree",
    "build_star_system",
    "certificate_from_json",
    "certificate_to_json",
    "check_star_system",
    "chordal",
    "closed_neighborhood",
    "degree",
    "degree_into",
    "exact_max_stable",
    "exhaustive_subdivision_search",
    "extract",
    "floor_log2_sq",
    "format_graph_text",
    "general_h_order",
    "gnp",
    "greedy_stable",
    "induced_cycle_in_range",
    "is_stable",
    "load_graph",
    "max_degree",
    "parse_graph_text",
    "path_is_induced",
    "path_is_valid",
    "planted_subdivision",
    "save_graph",
    "shortest_pair_path",
    "sparsify_star_system",
    "star_semi_sparsity",
    "star_sparsity",
    "verify_stable",
    "verify_subdivision",
]
