"""Low-adaptivity submodular maximization under a cardinality constraint.

Library layout:

* :mod:`fastsubmod.oracle` — black-box objective interface, query/round
  accounting, lazy bound cache, parallel batch evaluation.
* :mod:`fastsubmod.graphs` — seeded graph generators and edge-list loading.
* :mod:`fastsubmod.objectives` — the five benchmark objectives.
* :mod:`fastsubmod.fast` — the adaptive-sequencing maximizers.
* :mod:`fastsubmod.baselines` — greedy variants, random sets, brute force.
* :mod:`fastsubmod.bench` — benchmark harness and the ``bench`` CLI.
"""

from .baselines import (
    LtlgConfig,
    brute_force_opt,
    lazy_greedy,
    parallel_ltlg,
    random_baseline,
    reference_greedy,
)
from .bench import (
    ExperimentSpec,
    ResultRow,
    emit_results,
    parse_results,
    parse_spec_file,
    preset,
    run_experiment,
)
from .fast import (
    FastConfig,
    FastTrace,
    RunResult,
    adaptive_sequencing_vanilla,
    binary_search_max,
    fast,
    fast_full,
    geometric,
    position_ladder,
    sample_complexity,
)
from .graphs import (
    Graph,
    build_graph,
    gen_ba,
    gen_er,
    gen_sbm,
    gen_ws,
    load_edge_list,
    make_rng,
)
from .objectives import (
    InfluenceObjective,
    MaxCoverObjective,
    MovieRecommendationObjective,
    RatingsMatrix,
    RevenueObjective,
    WeightedDirectedCoverObjective,
    draw_uniform_weights,
    influence,
    load_ratings,
    max_cover,
    movie_recommendation,
    revenue,
    weighted_directed_cover,
)
from .oracle import (
    VALUE_TOL,
    LazyBoundCache,
    Objective,
    ObjectiveHandle,
    QueryLedger,
    SolutionSet,
    WorkerPool,
    batch_marginals,
    marginal,
    singleton_values,
    top_k_singleton_sum,
    value,
)

__version__ = "0.1.0"
