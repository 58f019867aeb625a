"""The four subposterior-combination algorithms.

Three linear combiners pool draws across machines within each iteration:
plain averaging, per-component inverse-variance weighting, and full
covariance weighting.  The fourth method samples from a semiparametric
density-product estimate of the pooled posterior with an independent
Metropolis-within-Gibbs chain over kernel mixture components.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .core import CombinedSamples
from .errors import DegenerateChain, NonPositiveBandwidth, SingularCovariance
from .gaussians import diag_mvn_logpdf, mvn_logpdf_chol, spd_cholesky, spd_inverse

__all__ = [
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
]


@dataclass(frozen=True)
class MachineSummary:
    """Gaussian moment estimates of one machine's subposterior draws."""

    mean: np.ndarray        # (d,)
    covariance: np.ndarray  # (d, d), symmetric
    variances: np.ndarray   # (d,) diagonal of covariance

    def __post_init__(self):
        cov = self.covariance
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-10):
            raise ValueError("covariance must be symmetric to 1e-10")
        if np.any(self.variances < 0.0):
            raise ValueError("variances must be nonnegative")

    @property
    def is_degenerate(self):
        """True when some component has exactly zero sample variance."""
        return bool(np.any(self.variances == 0.0))


@dataclass(frozen=True)
class PooledSummary:
    """Moments of the product of the machines' Gaussian approximations."""

    pooled_mean: np.ndarray        # (d,)
    pooled_covariance: np.ndarray  # (d, d)


@dataclass(frozen=True)
class DpeConfig:
    """Settings for the density-product estimator sampler.

    ``bandw`` is the starting kernel bandwidth per component (scalar or
    length-d vector; default 1.0 for every component).  With ``anneal``
    the bandwidth shrinks as ``bandw * t**(-1/(4+d))`` over iterations t;
    otherwise it stays fixed.
    """

    bandw: object = None
    anneal: bool = True
    seed: int = 0

    def resolved_bandwidths(self, d):
        """The (d,) starting-bandwidth vector, validated positive."""
        if self.bandw is None:
            return np.ones(d)
        bandw = np.atleast_1d(np.asarray(self.bandw, dtype=float))
        if bandw.size == 1:
            bandw = np.full(d, bandw[0])
        if bandw.shape != (d,):
            raise NonPositiveBandwidth(
                f"bandw must be a scalar or length-{d} vector, got shape {bandw.shape}"
            )
        if not np.all(np.isfinite(bandw)) or np.any(bandw <= 0.0):
            raise NonPositiveBandwidth(f"bandwidths must be positive, got {bandw}")
        return bandw


@dataclass
class DpeChainState:
    """Snapshot of the mixture-component chain inside the DPE sampler.

    ``indices`` holds one selected draw index per machine; everything
    else is derived from it: the mean of the selected draws, the two log
    mixture-weight pieces, and the Gaussian the output draw came from.
    """

    indices: np.ndarray         # (M,) int, each in [0, T)
    theta_bar: np.ndarray       # (d,) mean of the selected draws
    log_w: float                # log of the kernel clustering weight
    log_weight: float           # log of the full mixture weight
    component_mean: np.ndarray  # (d,)
    component_cov: np.ndarray   # (d, d)
    bandwidth: np.ndarray       # (d,) bandwidth the weights were computed at


def _weighted_mean_over_machines(values, weights):
    """Weighted average over the machine axis of a (d, T, M) array.

    ``weights`` has shape (d, M).  Weights are normalized by their
    per-component maximum first; besides guarding against overflow this
    makes the equal-weight case reduce to the plain average bitwise.
    """
    norm = weights / weights.max(axis=1, keepdims=True)
    numer = np.einsum("dtm,dm->dt", values, norm)
    denom = norm.sum(axis=1)
    return numer / denom[:, None]


def sample_average(bundle):
    """Pool draws by averaging across machines within each iteration.

    Component covariances are ignored entirely; every machine gets the
    same weight.
    """
    if bundle.M == 1:
        return CombinedSamples(bundle.values[:, :, 0])
    weights = np.ones((bundle.d, bundle.M))
    return CombinedSamples(_weighted_mean_over_machines(bundle.values, weights))


def _require_positive_variances(bundle):
    mask = bundle.zero_variance
    if mask.any():
        m, i = np.argwhere(mask)[0]
        raise DegenerateChain(
            f"machine {m} component {i} has zero variance; "
            "consensus weighting would divide by zero"
        )


def consensus_independent(bundle):
    """Consensus pooling that treats parameter components as independent.

    Each component of each machine is weighted by the reciprocal of that
    machine's sample variance for the component.
    """
    if bundle.M == 1:
        return CombinedSamples(bundle.values[:, :, 0])
    if bundle.T < 2:
        raise DegenerateChain("consensus weighting needs at least 2 draws per machine")
    _require_positive_variances(bundle)
    variances = bundle.values.var(axis=1, ddof=1)  # (d, M)
    return CombinedSamples(
        _weighted_mean_over_machines(bundle.values, 1.0 / variances)
    )


def consensus_covariance(bundle):
    """Consensus pooling with full covariance weights.

    Machine m is weighted by the inverse of its sample covariance; the
    pooled draw solves (sum of precisions) x = (precision-weighted sum of
    draws), so no matrix is inverted in the apply step.
    """
    if bundle.M == 1:
        return CombinedSamples(bundle.values[:, :, 0])
    if bundle.T < 2:
        raise DegenerateChain("consensus weighting needs at least 2 draws per machine")
    _require_positive_variances(bundle)
    weights = np.stack(
        [
            spd_inverse(compute_machine_summary(bundle, m).covariance)
            for m in range(bundle.M)
        ]
    )
    total = weights.sum(axis=0)
    per_machine = np.moveaxis(bundle.values, 2, 0)  # (M, d, T)
    weighted = np.einsum("mij,mjt->it", weights, per_machine)
    try:
        pooled = np.linalg.solve(total, weighted)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance(
            "sum of machine precisions is singular"
        ) from exc
    return CombinedSamples(pooled)


def compute_machine_summary(bundle, m):
    """Sample mean and unbiased sample covariance of machine ``m``."""
    if bundle.T < 2:
        raise DegenerateChain("covariance estimation needs at least 2 draws")
    draws = bundle.values[:, :, m]
    mean = draws.mean(axis=1)
    dev = draws - mean[:, None]
    cov = (dev @ dev.T) / (bundle.T - 1)
    cov = 0.5 * (cov + cov.T)
    return MachineSummary(mean=mean, covariance=cov, variances=np.diag(cov).copy())


def compute_pooled_summary(summaries):
    """Moments of the product of the machines' Gaussian fits.

    The pooled covariance is the inverse of the summed machine
    precisions and the pooled mean is the precision-weighted mean.
    """
    precisions = [spd_inverse(s.covariance) for s in summaries]
    total = np.sum(precisions, axis=0)
    pooled_cov = spd_inverse(total)
    weighted = np.sum([p @ s.mean for p, s in zip(precisions, summaries)], axis=0)
    return PooledSummary(pooled_mean=pooled_cov @ weighted, pooled_covariance=pooled_cov)


def bandwidth_schedule(step, d, bandw, anneal=True):
    """Kernel bandwidths used at iteration ``step`` (1-based).

    Annealing shrinks the starting bandwidths by ``step**(-1/(4+d))`` so
    early iterations explore broadly and later ones tighten the mixture.
    """
    bandw = np.asarray(bandw, dtype=float)
    if not anneal:
        return bandw.copy()
    return bandw * float(step) ** (-1.0 / (4.0 + d))


class _DpeContext:
    """Precomputed quantities the DPE sampler evaluates weights against."""

    def __init__(self, bundle):
        d, T, M = bundle.d, bundle.T, bundle.M
        self.values = bundle.values
        self.d, self.T, self.M = d, T, M
        summaries = [compute_machine_summary(bundle, m) for m in range(M)]
        self.precisions = [spd_inverse(s.covariance) for s in summaries]
        self.pooled_prec = np.sum(self.precisions, axis=0)
        self.pooled_cov = spd_inverse(self.pooled_prec)
        self.prec_mean = np.sum(
            [p @ s.mean for p, s in zip(self.precisions, summaries)], axis=0
        )
        self.pooled_mean = self.pooled_cov @ self.prec_mean
        # log N(draw | machine mean, machine covariance) for every draw,
        # the denominator of every mixture weight; shape (T, M).
        self.log_fit = np.empty((T, M))
        for m, summary in enumerate(summaries):
            chol = spd_cholesky(summary.covariance)
            self.log_fit[:, m] = mvn_logpdf_chol(
                self.values[:, :, m].T, summary.mean, chol
            )

    def selected_draws(self, indices):
        return self.values[:, indices, np.arange(self.M)]

    def log_kernel_weight(self, selected, theta_bar, hsq):
        """Log product of Gaussian kernels tying the selected draws together."""
        return float(diag_mvn_logpdf(selected.T, theta_bar, hsq).sum())

    def log_mixture_weight(self, selected, theta_bar, log_fit_sum, hsq, chol_w):
        """Log mixture weight of one component at bandwidths sqrt(hsq)."""
        log_w = self.log_kernel_weight(selected, theta_bar, hsq)
        log_compat = mvn_logpdf_chol(theta_bar, self.pooled_mean, chol_w)
        return log_w, log_w + log_compat - log_fit_sum

    def compat_cholesky(self, hsq):
        """Factor of pooled covariance widened by the kernel term."""
        widened = self.pooled_cov + np.diag(hsq / self.M)
        return spd_cholesky(widened)

    def component_gaussian(self, theta_bar, hsq):
        """Mean and precision factor of the output-draw Gaussian."""
        prec = self.pooled_prec + np.diag(self.M / hsq)
        chol = np.linalg.cholesky(prec)
        rhs = (self.M / hsq) * theta_bar + self.prec_mean
        half = solve_triangular(chol, rhs, lower=True)
        mean = solve_triangular(chol.T, half, lower=False)
        return mean, chol

    def state_from_indices(self, indices, bandwidths):
        """Recompute a full chain state from scratch (test/check path)."""
        hsq = bandwidths**2
        selected = self.selected_draws(indices)
        theta_bar = selected.mean(axis=1)
        log_fit_sum = self.log_fit[indices, np.arange(self.M)].sum()
        chol_w = self.compat_cholesky(hsq)
        log_w, log_weight = self.log_mixture_weight(
            selected, theta_bar, log_fit_sum, hsq, chol_w
        )
        mean, chol = self.component_gaussian(theta_bar, hsq)
        cov = spd_inverse(chol @ chol.T)
        return DpeChainState(
            indices=indices.copy(),
            theta_bar=theta_bar,
            log_w=log_w,
            log_weight=log_weight,
            component_mean=mean,
            component_cov=cov,
            bandwidth=bandwidths.copy(),
        )


def semiparametric_dpe(bundle, config=None, return_state=False):
    """Sample the pooled posterior via the semiparametric density product.

    Each machine's subposterior density is modeled as a Gaussian fit
    times a kernel correction; the product across machines is a mixture
    of T^M Gaussians.  An independent Metropolis-within-Gibbs chain walks
    over mixture components: per iteration one machine's selected draw
    index is re-proposed uniformly and accepted by the mixture-weight
    ratio, then one pooled draw is emitted from the selected component.

    All weight arithmetic stays in log space.  When annealing is on,
    both the current and the proposed weight are recomputed at the
    iteration's bandwidth so the acceptance ratio is always formed at a
    single common bandwidth.

    Parameters
    ----------
    bundle : SubposteriorBundle
        Needs T >= 2 and machine covariances invertible after flooring.
    config : DpeConfig, optional
        Bandwidths, annealing flag and seed; defaults match
        ``DpeConfig()``.
    return_state : bool, optional
        Also return the final :class:`DpeChainState` (used by tests to
        cross-check the incrementally maintained quantities).
    """
    if config is None:
        config = DpeConfig()
    d, T, M = bundle.d, bundle.T, bundle.M
    bandw = config.resolved_bandwidths(d)
    ctx = _DpeContext(bundle)
    rng = np.random.default_rng(config.seed)

    indices = rng.integers(0, T, size=M)
    selected = ctx.selected_draws(indices)
    theta_bar = selected.mean(axis=1)
    log_fit_sum = ctx.log_fit[indices, np.arange(M)].sum()

    if not config.anneal:
        fixed_h = bandwidth_schedule(1, d, bandw, anneal=False)
        fixed_hsq = fixed_h**2
        fixed_chol_w = ctx.compat_cholesky(fixed_hsq)

    out = np.empty((d, T))
    log_w = log_weight = np.nan
    for step in range(1, T + 1):
        if config.anneal:
            h = bandwidth_schedule(step, d, bandw, anneal=True)
            hsq = h**2
            chol_w = ctx.compat_cholesky(hsq)
        else:
            h, hsq, chol_w = fixed_h, fixed_hsq, fixed_chol_w

        log_w, log_weight = ctx.log_mixture_weight(
            selected, theta_bar, log_fit_sum, hsq, chol_w
        )

        machine = rng.integers(M)
        proposal = rng.integers(T)
        new_draw = ctx.values[:, proposal, machine]
        theta_bar_prop = theta_bar + (new_draw - selected[:, machine]) / M
        selected_prop = selected.copy()
        selected_prop[:, machine] = new_draw
        log_fit_prop = (
            log_fit_sum
            - ctx.log_fit[indices[machine], machine]
            + ctx.log_fit[proposal, machine]
        )
        log_w_prop, log_weight_prop = ctx.log_mixture_weight(
            selected_prop, theta_bar_prop, log_fit_prop, hsq, chol_w
        )

        if np.log(rng.uniform()) < log_weight_prop - log_weight:
            indices[machine] = proposal
            selected = selected_prop
            theta_bar = theta_bar_prop
            log_fit_sum = log_fit_prop
            log_w, log_weight = log_w_prop, log_weight_prop

        mean, chol = ctx.component_gaussian(theta_bar, hsq)
        noise = solve_triangular(chol.T, rng.standard_normal(d), lower=False)
        out[:, step - 1] = mean + noise

    combined = CombinedSamples(out)
    if not return_state:
        return combined
    state = DpeChainState(
        indices=indices.copy(),
        theta_bar=theta_bar.copy(),
        log_w=log_w,
        log_weight=log_weight,
        component_mean=mean,
        component_cov=spd_inverse(chol @ chol.T),
        bandwidth=h.copy(),
    )
    return combined, state
