"""Bayesian structure learning for Gaussian AMP chain graphs.

Latent chain graphs (mixed directed/undirected edges without semi-directed
cycles) are inferred from i.i.d. multivariate observations with an adaptive
tempered sequential Monte Carlo sampler: graph-mutation and random-walk
Metropolis kernels, a Dirichlet-marginal edge prior, a G-Wishart prior on
the precision matrix, and Gaussian priors on regression coefficients.
"""

from .backend import BACKEND
from .errors import (
    CgsmcError,
    ConfigError,
    IngestionError,
    InitializationError,
    InvalidAdjacencyError,
    NotChainGraphError,
    NotPositiveDefiniteError,
    ScheduleCapError,
    SingularMatrixError,
    StructuralZeroError,
)
from .graphs import (
    ChainGraph,
    EdgeCode,
    as_adjacency,
    chain_components,
    is_chain_graph,
    parents,
    upper_to_full,
)
from .kernels import (
    KernelConfig,
    MoveStats,
    apply_kernel,
    graph_move,
    rw_update_coef,
    rw_update_prec,
)
from .model import (
    ModelParams,
    implied_covariance,
    is_pd,
    log_likelihood,
)
from .priors import (
    Hyperparams,
    default_hyperparams,
    log_coef_prior,
    log_edge_prior,
    log_graph_prior,
    log_gwishart_norm_const,
    log_gwishart_unnorm,
    log_target,
    sample_gwishart,
)
from .simulate import (
    SimSpec,
    center_columns,
    random_chain_graph,
    simulate_data,
    standardize_columns,
)
from .smc import (
    Population,
    RunResult,
    SmcConfig,
    ess,
    incremental_log_weight,
    init_particles,
    next_phi,
    resample,
    run,
    systematic_ancestors,
)
from .state import Particle, build_particle
from .summary import (
    EdgeProbTensor,
    edge_probabilities,
    export_dot,
    map_graph,
    top_particle,
)

__version__ = "0.1.0"
