"""Strategic network formation with misclassified links.

Solves symmetric equilibrium beliefs, simulates latent and recorded
networks, corrects the observed statistics for misclassification, and
inverts a quadratic-form test into confidence sets for the structural
parameters.  A semiparametric membership checker and a Monte Carlo harness
round out the toolkit.
"""

from .equilibrium import (
    BeliefMatrix,
    SolverConfig,
    best_response,
    extended_stats_from_beliefs,
    network_stats_from_beliefs,
    simulate_true_network,
    solve_equilibrium,
)
from .estimation import (
    CellEstimates,
    Dataset,
    MomentEvaluator,
    cell_estimates,
    moment,
    moment_variance,
    stat_influence,
    moment_statistic,
)
from .exceptions import (
    ConfigError,
    DegenerateVariance,
    EmptyCell,
    EmptySet,
    FileFormatError,
    InvalidRates,
    MisnetError,
    NonConvergence,
    TooManyFailures,
)
from .inference import (
    ConfidenceSet,
    ThetaGrid,
    chi2_quantile,
    confidence_set,
    projection_intervals,
)
from .misclassification import (
    CorrectionMaps,
    apply_misclassification,
    correction_maps,
    observed_beliefs_from_true,
    pair_belief_stats,
    true_beliefs_from_observed,
)
from .model import (
    BeliefStats,
    CovariateSupport,
    Network,
    PairCovariates,
    Theta,
    decide_link,
    total_utility,
    utility_index,
)
from .semiparametric import CellSummary, cell_summary, identified_set, membership

__version__ = "0.1.0"

__all__ = [
    "BeliefMatrix",
    "BeliefStats",
    "CellEstimates",
    "CellSummary",
    "ConfidenceSet",
    "ConfigError",
    "CorrectionMaps",
    "CovariateSupport",
    "Dataset",
    "DegenerateVariance",
    "EmptyCell",
    "EmptySet",
    "FileFormatError",
    "InvalidRates",
    "MisnetError",
    "MomentEvaluator",
    "Network",
    "NonConvergence",
    "PairCovariates",
    "SolverConfig",
    "Theta",
    "ThetaGrid",
    "TooManyFailures",
    "apply_misclassification",
    "best_response",
    "cell_estimates",
    "cell_summary",
    "chi2_quantile",
    "confidence_set",
    "correction_maps",
    "decide_link",
    "extended_stats_from_beliefs",
    "identified_set",
    "membership",
    "moment",
    "moment_variance",
    "network_stats_from_beliefs",
    "observed_beliefs_from_true",
    "pair_belief_stats",
    "projection_intervals",
    "simulate_true_network",
    "solve_equilibrium",
    "stat_influence",
    "moment_statistic",
    "total_utility",
    "true_beliefs_from_observed",
    "utility_index",
]
