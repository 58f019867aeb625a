"""Exception hierarchy shared by all chaincombine modules.

Two error families matter for callers: validation failures (bad shapes,
non-finite values, degenerate inputs) and numerical failures (matrices
that stay singular after regularization).  The CLI maps them to distinct
exit codes.
"""


class ChainCombineError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2


class ValidationError(ChainCombineError):
    """Input data or arguments violate a documented precondition."""

    exit_code = 2


class DimensionMismatch(ValidationError):
    """Array sizes disagree with the claimed (d, T, M) dimensions."""


class NonFiniteValue(ValidationError):
    """A NaN or infinity was found where finite reals are required."""


class DegenerateChain(ValidationError):
    """A chain (or component) has zero variance where spread is required."""


class NonPositiveBandwidth(ValidationError):
    """A kernel bandwidth was zero or negative."""


class NonPositiveData(ValidationError):
    """Data values must be strictly positive for this model."""


class TooManyShards(ValidationError):
    """More shards requested than there are data rows."""


class FileMissing(ValidationError):
    """A file referenced by a manifest does not exist."""


class ParseError(ValidationError):
    """A matrix file could not be parsed; reports file, line and column."""


class NumericalError(ChainCombineError):
    """Linear algebra failed beyond what regularization can repair."""

    exit_code = 3


class SingularCovariance(NumericalError):
    """A covariance matrix is singular even after eigenvalue flooring."""


class NonConvergenceWarning(UserWarning):
    """An MCMC chain shows signs of poor mixing (acceptance rate off-target)."""
