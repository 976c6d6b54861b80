from .types import *  # noqa: F401, F403
from .constant import *  # noqa: F401, F403
from .graph import (  # noqa: F401
    HostGraph,
    HostDigraph,
    gen_random_graph,
    gen_random_digraph,
    neighbors_into,
    edges_between,
    read_edge_list,
    write_edge_list,
)
from .cycles import (  # noqa: F401
    validate_spec,
    enumerate_bounded_family,
    classify,
    sum_representation,
    balanced_sum_representation,
    reduce_long_cycles,
)
from .expansion import expands_into, is_expander, split_expanding, star_matching, generalized_matching  # noqa: F401
from .connector import divide, connect_single_pair, connect_pairs, verify_bundle  # noqa: F401
from .template import build_flexible_template, verify_template  # noqa: F401
from .absorber import (  # noqa: F401
    build_absorbers,
    build_robust_set,
    query_robust_set,
    connect_pairs_spanning,
)
from .embedder import (  # noqa: F401
    ExposureLayers,
    make_layers,
    find_cycle_factor,
    embed_bounded,
    embed_h1,
    embed_h2,
    embed,
    verify_embedding,
    audit_provenance,
)
from .oracle import brute_force_embed, exhaustive_universality  # noqa: F401
from .lab import generate_specs, run_sweep, estimate_threshold, regress_exponent, plot_script  # noqa: F401
