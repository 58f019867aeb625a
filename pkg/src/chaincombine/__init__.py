"""Combine subposterior MCMC samples from sharded data sets.

When a data set is too large to analyze whole, it can be split across M
machines, each of which samples the posterior of its own shard (with the
prior tempered to a 1/M share).  This package merges those per-machine
draws back into samples approximating the full-data posterior, offers a
relative L2 distance for scoring the result against a full-data chain,
and ships a simulation harness plus a batch CLI so the whole pipeline
runs self-contained.
"""

__version__ = "0.1.0"

from .core import (
    CombinedSamples,
    SubposteriorBundle,
    shuffle_within_machines,
    validate_bundle,
)
from .combiners import (
    DpeChainState,
    DpeConfig,
    MachineSummary,
    PooledSummary,
    bandwidth_schedule,
    compute_machine_summary,
    compute_pooled_summary,
    consensus_covariance,
    consensus_independent,
    sample_average,
    semiparametric_dpe,
)
from .density import (
    DensityEstimate,
    density_pair,
    kde_1d,
    relative_l2_distance,
    silverman_bandwidth,
)
from .harness import (
    GammaProblem,
    LogisticProblem,
    MhConfig,
    adaptive_random_walk,
    gaussian_product_oracle,
    partition_rows,
    sample_gamma_posterior,
    sample_logistic_posterior,
    simulate_gamma_data,
    simulate_logistic_data,
    split_logistic_rows,
)
from .errors import (
    ChainCombineError,
    DegenerateChain,
    DimensionMismatch,
    FileMissing,
    NonConvergenceWarning,
    NonFiniteValue,
    NonPositiveBandwidth,
    NonPositiveData,
    NumericalError,
    ParseError,
    SingularCovariance,
    TooManyShards,
    ValidationError,
)

__all__ = [
    "__version__",
    "SubposteriorBundle",
    "CombinedSamples",
    "validate_bundle",
    "shuffle_within_machines",
    "MachineSummary",
    "PooledSummary",
    "DpeConfig",
    "DpeChainState",
    "sample_average",
    "consensus_independent",
    "consensus_covariance",
    "compute_machine_summary",
    "compute_pooled_summary",
    "bandwidth_schedule",
    "semiparametric_dpe",
    "DensityEstimate",
    "silverman_bandwidth",
    "kde_1d",
    "density_pair",
    "relative_l2_distance",
    "LogisticProblem",
    "GammaProblem",
    "MhConfig",
    "simulate_logistic_data",
    "sample_logistic_posterior",
    "split_logistic_rows",
    "simulate_gamma_data",
    "sample_gamma_posterior",
    "partition_rows",
    "gaussian_product_oracle",
    "adaptive_random_walk",
    "ChainCombineError",
    "ValidationError",
    "NumericalError",
    "DimensionMismatch",
    "NonFiniteValue",
    "DegenerateChain",
    "NonPositiveBandwidth",
    "NonPositiveData",
    "TooManyShards",
    "FileMissing",
    "ParseError",
    "SingularCovariance",
    "NonConvergenceWarning",
]
