"""Multilevel explanation trees for black-box tabular models.

The pipeline: sample perturbation neighborhoods around each training
instance, query the black box, fit sparse local surrogates (leaves), then
solve a fused-regression path that progressively ties explanations together
along a prior graph, yielding a dendrogram from per-instance leaves to a
single global root with a representative explanation per node.
"""

from ._kernels import available_backends, get_backend
from .baselines import (
    SpLimeSelection,
    TwoStepPath,
    feature_importance,
    feature_importance_multilevel,
    sp_lime_pick,
    two_step_medians,
    two_step_path,
)
from .data import (
    Dataset,
    FeatureStats,
    RunConfig,
    Split,
    feature_stats,
    load_csv,
    save_csv,
    split_dataset,
)
from .errors import (
    ConvergenceError,
    MameError,
    OracleError,
    OracleTransportError,
    ParseError,
)
from .evaluation import (
    ArExactReport,
    FidelityCurve,
    ar_exact_study,
    generalized_fidelity,
    kendall_tau,
    nearest_training,
)
from .graph import (
    Incidence,
    PriorGraph,
    incidence,
    load_side_info,
    prediction_chain_graph,
    side_info_graph,
)
from .lasso import LeafFit, fit_leaves
from .neighborhood import (
    CoordinateMap,
    KernelConfig,
    Neighborhood,
    build_neighborhoods,
    kernel_weights,
    sample_neighborhood,
)
from .oracles import (
    Oracle,
    make_remote_oracle,
    make_synthetic_blackbox,
    predict_batch,
)
from .solver import (
    AdmmState,
    PathSolution,
    QuadProblem,
    build_problem,
    dual_update,
    run_ar_path,
    run_exact_path,
    theta_update,
    u_update,
    v_update,
)
from .tree import (
    DisjointSet,
    ExplanationTree,
    LevelView,
    MergeEvent,
    build_tree,
    fit_representatives,
    record_merge,
    select_level,
    tree_to_dot,
    tree_to_json,
)

__version__ = "0.1.0"
