"""Self-contained test problems: simulate data, shard it, sample shards.

Two models are provided end to end.  A five-covariate logistic
regression with flat priors on the coefficients, and a Gamma model
reparameterized in terms of its mean and standard deviation (which
decorrelates the shape and rate) with wide uniform priors.  Both are
sampled with an adaptive random-walk Metropolis chain whose proposal
scale is tuned during burn-in only, so the retained draws come from a
fixed kernel.

The exact product-of-Gaussians moments live here too; they are the
independent oracle the combiners are tested against.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, gammaln

from .errors import (
    DegenerateChain,
    NonConvergenceWarning,
    NonPositiveData,
    SingularCovariance,
    TooManyShards,
)

GAMMA_PRIOR_LO = 1e-4
GAMMA_PRIOR_HI = 1e4

# Roberts-Rosenthal targets for random-walk Metropolis.
TARGET_ACCEPT_SCALAR = 0.44
TARGET_ACCEPT_MULTIVARIATE = 0.234

ACCEPTANCE_HEALTHY = (0.1, 0.6)


@dataclass(frozen=True)
class LogisticProblem:
    """Simulated logistic-regression data with the generating coefficients."""

    x: np.ndarray          # (n, d) covariates
    y: np.ndarray          # (n,) outcomes in {0, 1}
    beta_true: np.ndarray  # (d,)

    def data_matrix(self):
        """Rows of [y, x_1, ..., x_d], the shardable representation."""
        return np.column_stack([self.y, self.x])


def split_logistic_rows(rows):
    """Inverse of :meth:`LogisticProblem.data_matrix` for one shard."""
    rows = np.asarray(rows, dtype=float)
    return rows[:, 1:], rows[:, 0]


@dataclass(frozen=True)
class GammaProblem:
    """Simulated Gamma(alpha, beta) observations (shape/rate convention)."""

    y: np.ndarray
    alpha_true: float
    beta_true: float

    @property
    def mean(self):
        return self.alpha_true / self.beta_true

    @property
    def sd(self):
        return np.sqrt(self.alpha_true) / self.beta_true


@dataclass(frozen=True)
class MhConfig:
    """Chain length and tuning for the random-walk Metropolis samplers.

    ``iterations`` counts retained draws after ``burnin`` discarded ones.
    With ``thin`` > 1 the chain advances ``thin`` Metropolis steps per
    retained draw; random-walk chains decorrelate over roughly 2-4x the
    parameter count in steps, so thinning buys near-independent retained
    draws at proportional cost.  ``target_accept`` defaults to 0.44 for
    one-parameter targets and 0.234 otherwise.
    """

    iterations: int = 50_000
    burnin: int = 2_000
    seed: int = 0
    target_accept: float | None = None
    thin: int = 1

    def __post_init__(self):
        if self.iterations < 2:
            raise ValueError("iterations must be >= 2")
        if self.burnin < 0:
            raise ValueError("burnin must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.target_accept is not None and not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")

    def resolved_target(self, d):
        if self.target_accept is not None:
            return self.target_accept
        return TARGET_ACCEPT_SCALAR if d == 1 else TARGET_ACCEPT_MULTIVARIATE


def simulate_logistic_data(n, beta, seed):
    """Draw covariates i.i.d. standard normal and Bernoulli outcomes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    beta = np.asarray(beta, dtype=float)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, beta.size))
    p = expit(x @ beta)
    y = (rng.uniform(size=n) < p).astype(float)
    return LogisticProblem(x=x, y=y, beta_true=beta)


def simulate_gamma_data(n, alpha, beta, seed):
    """Draw n observations from Gamma(alpha, beta) with rate beta."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be positive")
    rng = np.random.default_rng(seed)
    y = rng.gamma(shape=alpha, scale=1.0 / beta, size=n)
    return GammaProblem(y=y, alpha_true=float(alpha), beta_true=float(beta))


def partition_rows(data, n_shards, seed):
    """Randomly split data rows into ``n_shards`` disjoint blocks.

    Rows are permuted once, then cut into contiguous blocks whose sizes
    differ by at most one.  The union of the shards is exactly the input
    row multiset.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    n = data.shape[0]
    if n_shards < 1:
        raise TooManyShards("shard count must be >= 1")
    if n_shards > n:
        raise TooManyShards(f"cannot split {n} rows into {n_shards} shards")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return [chunk.copy() for chunk in np.array_split(data[perm], n_shards)]


def gaussian_product_oracle(means, covs):
    """Exact moments of the normalized product of Gaussian densities.

    Independent of the combiner implementations on purpose: plain
    precision sums with ``np.linalg.inv``, no regularization.
    """
    means = [np.atleast_1d(np.asarray(m, dtype=float)) for m in means]
    covs = [np.atleast_2d(np.asarray(c, dtype=float)) for c in covs]
    for cov in covs:
        if np.any(np.linalg.eigvalsh(0.5 * (cov + cov.T)) <= 0.0):
            raise SingularCovariance("oracle requires positive definite covariances")
    precisions = [np.linalg.inv(c) for c in covs]
    cov_star = np.linalg.inv(np.sum(precisions, axis=0))
    mean_star = cov_star @ np.sum(
        [p @ m for p, m in zip(precisions, means)], axis=0
    )
    return mean_star, cov_star


def _finite_difference_hessian(log_density, x, rel_step=1e-4):
    """Central-difference Hessian, used to shape the proposal covariance."""
    x = np.asarray(x, dtype=float)
    d = x.size
    steps = rel_step * np.maximum(np.abs(x), 1.0)
    hess = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            ei = np.zeros(d)
            ej = np.zeros(d)
            ei[i] = steps[i]
            ej[j] = steps[j]
            fpp = log_density(x + ei + ej)
            fpm = log_density(x + ei - ej)
            fmp = log_density(x - ei + ej)
            fmm = log_density(x - ei - ej)
            hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j])
    return hess


def _proposal_cholesky(log_density, center):
    """Cholesky factor of the local inverse-curvature at ``center``.

    Falls back to the identity scaled by |center| when the curvature is
    not usable (flat directions, numerical noise).
    """
    d = center.size
    hess = _finite_difference_hessian(log_density, center)
    cov = None
    try:
        eigval, eigvec = np.linalg.eigh(-0.5 * (hess + hess.T))
        if np.all(eigval > 0.0) and np.all(np.isfinite(eigval)):
            cov = (eigvec / eigval) @ eigvec.T
    except np.linalg.LinAlgError:
        cov = None
    if cov is None:
        scale = np.maximum(np.abs(center), 1.0)
        cov = np.diag(scale**2)
    return np.linalg.cholesky(cov)


def adaptive_random_walk(log_density, start, config, support=None, proposal_chol=None):
    """Random-walk Metropolis with burn-in-only scale adaptation.

    The proposal is ``scale * L z`` with ``L`` the local curvature
    factor at the start point (or ``proposal_chol`` when given).  During
    burn-in the global ``scale`` follows a Robbins-Monro recursion
    toward the target acceptance rate and is frozen afterwards.
    Proposals outside ``support`` are rejected without evaluating the
    density.

    Returns ``(draws, acceptance_rate)`` with ``draws`` of shape (d, T)
    and the rate measured over all post-burn-in steps.  A rate outside
    [0.1, 0.6] triggers a :class:`NonConvergenceWarning`.
    """
    start = np.asarray(start, dtype=float)
    d = start.size
    target = config.resolved_target(d)
    rng = np.random.default_rng(config.seed)
    chol = proposal_chol if proposal_chol is not None else _proposal_cholesky(log_density, start)

    x = start.copy()
    log_p = log_density(x)
    scale = 2.38 / np.sqrt(d)
    draws = np.empty((d, config.iterations))
    total_steps = config.burnin + config.iterations * config.thin
    accept_sum = 0.0
    for k in range(total_steps):
        step = scale * (chol @ rng.standard_normal(d))
        proposal = x + step
        if support is not None and not support(proposal):
            accept_prob = 0.0
        else:
            log_p_prop = log_density(proposal)
            accept_prob = min(1.0, np.exp(min(0.0, log_p_prop - log_p)))
            if rng.uniform() < accept_prob:
                x = proposal
                log_p = log_p_prop
        if k < config.burnin:
            scale *= np.exp((k + 1.0) ** -0.6 * (accept_prob - target))
        else:
            kept = k - config.burnin
            if kept % config.thin == config.thin - 1:
                draws[:, kept // config.thin] = x
            accept_sum += accept_prob
    rate = accept_sum / (config.iterations * config.thin)
    if not ACCEPTANCE_HEALTHY[0] <= rate <= ACCEPTANCE_HEALTHY[1]:
        warnings.warn(
            f"post-burn-in acceptance rate {rate:.3f} outside "
            f"{ACCEPTANCE_HEALTHY}; chain may be poorly mixed",
            NonConvergenceWarning,
            stacklevel=2,
        )
    return draws, rate


def _logistic_log_likelihood(x, y):
    """Closure returning the flat-prior log posterior for coefficients."""
    yx = y @ x  # sufficient statistic for the linear term

    def log_density(beta):
        logits = x @ beta
        return yx @ beta - np.logaddexp(0.0, logits).sum()

    return log_density


def _logistic_mode(x, y):
    """Maximum-likelihood coefficients, the chain's starting point."""
    log_density = _logistic_log_likelihood(x, y)

    def negative(beta):
        return -log_density(beta)

    def gradient(beta):
        p = expit(x @ beta)
        return -(x.T @ (y - p))

    result = minimize(negative, np.zeros(x.shape[1]), jac=gradient, method="BFGS")
    return result.x


def sample_logistic_posterior(x, y, config):
    """Posterior draws for logistic-regression coefficients on one shard.

    Flat priors make the log posterior equal the log likelihood up to a
    constant.  Returns a (d, T) matrix of retained draws.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[0] != y.size or x.shape[0] == 0:
        raise ValueError("x and y must be nonempty with matching row counts")
    log_density = _logistic_log_likelihood(x, y)
    start = _logistic_mode(x, y)
    draws, _ = adaptive_random_walk(log_density, start, config)
    return draws


def _gamma_log_posterior(y):
    """Log posterior on (mean, sd) for Gamma data with uniform priors."""
    n = y.size
    sum_y = y.sum()
    sum_log_y = np.log(y).sum()

    def log_density(params):
        mean, sd = params
        var = sd * sd
        alpha = mean * mean / var
        beta = mean / var
        return (
            n * (alpha * np.log(beta) - gammaln(alpha))
            + (alpha - 1.0) * sum_log_y
            - beta * sum_y
        )

    return log_density


def _gamma_support(params):
    return bool(np.all(params > GAMMA_PRIOR_LO) and np.all(params < GAMMA_PRIOR_HI))


def sample_gamma_posterior(y, config, return_mean_sd=False):
    """Posterior draws of (alpha, beta) for Gamma data on one shard.

    The chain walks the (mean, sd) parameterization under
    Uniform(0.0001, 10000) priors on each coordinate; proposals outside
    the prior box are rejected outright.  Draws are reported as shape
    and rate: alpha = mean^2/sd^2, beta = mean/sd^2.

    With ``return_mean_sd`` the underlying (mean, sd) chain is returned
    as well.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise NonPositiveData("shard is empty")
    if np.any(y <= 0.0):
        raise NonPositiveData("Gamma observations must be strictly positive")
    log_density = _gamma_log_posterior(y)
    start = np.array([y.mean(), y.std(ddof=1)])
    if start[1] == 0.0:
        raise DegenerateChain("data has zero variance; Gamma fit is degenerate")
    draws, _ = adaptive_random_walk(log_density, start, config, support=_gamma_support)
    mean, sd = draws[0], draws[1]
    var = sd * sd
    alpha_beta = np.vstack([mean * mean / var, mean / var])
    if return_mean_sd:
        return alpha_beta, draws
    return alpha_beta
