"""gmis: generalized multiple importance sampling toolkit.

Sampling procedures, weighting options, the six named MIS schemes,
estimators with closed-form variance oracles, partition and adaptive
variants, and a config-driven experiment harness.
"""

from .adaptive import (AdaptiveConfig, AdaptiveResult, ProposalHistory,
                       adaptive_estimates, adaptive_weights, lais_adapt,
                       pmc_adapt, run_adaptive)
from .errors import (ConfigError, DimensionMismatchError, InputError,
                     UnsupportedQueryError)
from .estimators import (Estimand, IDENTITY, Partition, estimate_Z,
                         estimate_self_normalized, estimate_unnormalized,
                         partition_log_weights)
from .indexing import IndexSequence, SamplingMode, conditional_pmf, select_indexes
from .proposals import Proposal, ProposalPool, uniform_locations
from .replicates import (simulate_direct_means, simulate_estimates,
                         simulate_partition_estimates)
from .schemes import (NAMED_SCHEMES, SCHEME_OF_PAIR, SchemeSpec,
                      WeightedSampleSet, evaluation_counts, run_scheme)
from .targets import TargetDensity, equal_gaussian_mixture_1d
from .variance import (RunningExampleConfig, VarianceEntry,
                       analytic_variance_Z, analytic_variance_mean,
                       check_theorem_ordering, direct_sampling_mse_oracle,
                       empirical_mse, mse_entry)
from .weights import WeightingOption, denominator_subset, log_weight

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig", "AdaptiveResult", "ProposalHistory",
    "adaptive_estimates", "adaptive_weights", "lais_adapt", "pmc_adapt",
    "run_adaptive",
    "ConfigError", "DimensionMismatchError", "InputError",
    "UnsupportedQueryError",
    "Estimand", "IDENTITY", "Partition", "estimate_Z",
    "estimate_self_normalized", "estimate_unnormalized",
    "partition_log_weights",
    "IndexSequence", "SamplingMode", "conditional_pmf", "select_indexes",
    "Proposal", "ProposalPool", "uniform_locations",
    "simulate_direct_means", "simulate_estimates",
    "simulate_partition_estimates",
    "NAMED_SCHEMES", "SCHEME_OF_PAIR", "SchemeSpec", "WeightedSampleSet",
    "evaluation_counts", "run_scheme",
    "TargetDensity", "equal_gaussian_mixture_1d",
    "RunningExampleConfig", "VarianceEntry", "analytic_variance_Z",
    "analytic_variance_mean", "check_theorem_ordering",
    "direct_sampling_mse_oracle", "empirical_mse", "mse_entry",
    "WeightingOption", "denominator_subset", "log_weight",
    "__version__",
]
