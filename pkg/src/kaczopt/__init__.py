"""Randomized Kaczmarz with optimized row-selection distributions."""

from .bounds import RatePair, classical_rate, envelope, kappa, rate_pair
from .errors import (
    ConvergenceFailure,
    DimensionMismatchError,
    InvalidDistributionError,
    NonPositiveTError,
    NotPositiveDefiniteError,
    NumericalError,
    RankDeficientError,
    ZeroDesignError,
    ZeroRowError,
    ZeroVectorError,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    MseCurve,
    emit_csv,
    generate_system,
    run_experiment,
)
from .kaczmarz import (
    Cyclic,
    Randomized,
    TrajectoryRecord,
    cyclic_index,
    one_step_expected_factor,
    project_row,
    row_norm_distribution,
    run_solver,
)
from .linalg import (
    NormalizedSystem,
    eig_extremes,
    jacobi_eigh,
    logdet,
    row_normalize,
    solve_spd,
    weighted_gram,
)
from .optimizers import (
    OptimizerResult,
    kappa_optimal_rescaling,
    optimize_dopt,
    optimize_lp,
    optimize_maximin,
    p_from_q,
    q_from_p,
)
from .sampling import RowSampler, build_sampler, make_rng

__version__ = "0.1.0"
