"""Perfect matchings in k-partite k-uniform hypergraphs."""

from .absorption import (
    AbsorbingFamily,
    AbsorptionConfig,
    AbsorptionFailure,
    absorb,
    count_absorbing,
    is_absorbing,
    sample_absorbing_family,
)
from .constructions import (
    ExtremalTemplate,
    TemplateRule,
    ThresholdValue,
    build_counterexample6,
    build_H,
    build_Hk,
    build_Hprime,
    build_Hstar,
    d3_threshold,
    delta1_Hstar_formula,
    delta_l_formula,
    threshold_exact,
)
from .experiments import threshold_sweep, verify_thresholds
from .hypergraph import (
    KPartiteHypergraph,
    LinkGraph,
    Matching,
    VertexRef,
    build_hypergraph,
    degree,
    link_graph,
    min_l_degree,
)
from .matching import (
    BudgetExhausted,
    CoverWitness,
    PMStatus,
    SearchBudget,
    SearchMode,
    augment_local,
    balanced_cover_check,
    brute_force_threshold,
    check_degree_bound_after_removal,
    greedy_matching,
    has_perfect_matching,
    is_intersecting_family,
    max_matching_exact,
)
from .solver import (
    ExtremalFailure,
    SolveOutcome,
    SolverConfig,
    SolverMode,
    SolveStatus,
    extremal_solve,
    solve_perfect_matching,
)
from .structure import (
    ClosenessReport,
    EdgeType,
    GoodnessReport,
    MatchingGraph,
    classify_good_vertices,
    closeness,
    edge_pair_type,
    i_connections,
    matching_graph,
    peel_subgraph,
)

__version__ = "0.1.0"
