"""Joint alignment of discrete labels from noisy modulo-k pairwise differences."""

from ._accel import backend
from .core import Assignment, InfeasibleParams, RecoveryParams, canonicalize, offset_error_rate
from .markov import (
    WalkSpectrum,
    plurality_gap,
    t_step_closed_form,
    t_step_matrix_power,
    transition_matrix,
)
from .oracle import (
    BiasedTowardZero,
    GeneralIID,
    NoiseModel,
    Oracle,
    QueryGraph,
    SimplePlusMinus,
    build_query_graph,
    min_degree_check,
    sample_answer,
)
from .pathweaver import PathFamily, almost_edge_disjoint_paths, grow_tree, validate_family
from .recovery import (
    PairEstimate,
    estimate_pair,
    path_difference,
    path_sign_product,
    plurality_vote,
    recover_assignment,
    spanning_tree_baseline,
)

__version__ = "0.1.0"
