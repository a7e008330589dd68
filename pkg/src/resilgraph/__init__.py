"""resilgraph: measure, attack, and restore the resilience of attributed graphs.

The toolkit condenses a graph's perturbation behavior into low-dimensional
surrogate dynamics, analyzes their equilibria and frequency-domain
stability, and closes the loop experimentally with structural attacks,
similarity-guided purification, spectral diagnostics, and a from-scratch
GCN evaluator.
"""

from .attacks import ATTACK_KINDS, AttackSpec, attack, attack_budget
from .diagnostics import (
    SmoothnessHistogram,
    degree_assortativity,
    numerical_rank,
    singular_values,
    smoothness_histogram,
)
from .dynamics import (
    CondensedState,
    GammaSums,
    Trajectory,
    accumulate,
    condense_1d,
    gamma_sums,
    phi,
    summarize,
)
from .errors import (
    BoundsError,
    ComputationError,
    ConfigError,
    DegenerateInputError,
    DivergenceError,
    DomainError,
    InputError,
    InsufficientDataError,
    NumericError,
    ParseError,
    ResilError,
    ScaleError,
    ShapeError,
    SingularityError,
)
from .gcn import (
    GcnModel,
    Split,
    TrainConfig,
    evaluate,
    forward,
    init_model,
    loss_and_grads,
    make_split,
    normalize_adjacency,
    predict,
    train,
)
from .graph_core import (
    Graph,
    NodeStats,
    SbmSpec,
    edge_distinctions,
    feature_distinction,
    generate_sbm,
    load_graph,
    load_graph_dir,
    node_stats,
    save_graph,
)
from .purify import (
    PurifyConfig,
    PurifyReport,
    cosine,
    fused_similarity,
    jaccard,
    neighborhood_set,
    purify,
    two_hop_set,
)
from .stability import (
    GeneralSystem,
    Model1D,
    Model2D,
    Root,
    SectorBound,
    SprResult,
    StabilityVerdict,
    SurfaceRow,
    boundary_k,
    equilibrium_closed_form,
    equilibrium_numeric,
    equilibrium_theta,
    integrate,
    jacobian_2d,
    rhs_1d,
    rhs_2d,
    sector_intervals,
    spr_check_1d,
    surface_sweep,
    theorem1_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
