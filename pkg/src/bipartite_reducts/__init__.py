"""Side-preserving reducts of the random bipartite graph, made executable at finite scale."""

from .analysis import AnalysisStage, AnalysisTrace, find_uniform_subset, mn_analysis, verify_trace
from .classify import (
    ReductClass,
    SwitchDecomposition,
    classify,
    decompose,
    preserves_1x2_parity,
    preserves_2x1_parity,
    preserves_2x2_parity,
)
from .errors import (
    DimensionMismatch,
    DuplicateTarget,
    NoExtension,
    NotDecomposable,
    NotFound,
    NotInSLR,
    OutOfRange,
    ParseError,
    ReductError,
    TooLarge,
    TooSmall,
    ZeroSide,
)
from .graph import (
    BipartiteGraph,
    CrossEdge,
    CrossType,
    Side,
    SidedMap,
    VertexRef,
    cross_type,
    find_isomorphisms,
    induced_subgraph,
    new_graph,
)
from .oracle import OracleReport, group_closure_check, oracle_class, verify_equivalence
from .random_lab import (
    ThetaWitness,
    bound_tail_sum,
    build_chain,
    check_theta,
    estimate_theta_failure,
    extend_partial_iso,
    failure_bound_term,
    sample_graph,
)
from .switching import FlipMatrix, SwitchPattern, apply_switch, compose_patterns, flip_matrix, pattern_flip_matrix

__version__ = "0.1.0"
