"""Sample-bundle data model shared by every combination method.

A bundle holds the MCMC draws produced on M separate machines, each of
which sampled the posterior of its own data shard.  The array layout is
``values[i, t, m]`` = component i of draw t on machine m, i.e. shape
(d, T, M).  Combined output is a (d, T) matrix.
"""

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue


class SubposteriorBundle:
    """Validated, immutable container of per-machine MCMC draws.

    Parameters
    ----------
    values : array_like, shape (d, T, M)
        Draws indexed by [parameter, iteration, machine].

    Notes
    -----
    Machines whose chain is constant in some component (zero variance)
    are tagged in ``zero_variance`` rather than rejected here: simple
    averaging tolerates them, whereas the precision-weighted combiners
    refuse to divide by a zero variance and raise at call time.
    """

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 3:
            raise DimensionMismatch(
                f"bundle must be a (d, T, M) array, got shape {values.shape}"
            )
        d, T, M = values.shape
        if d < 1 or T < 1 or M < 1:
            raise DimensionMismatch(
                f"bundle dimensions must all be >= 1, got (d={d}, T={T}, M={M})"
            )
        _check_finite(values)
        values = values.copy()
        values.setflags(write=False)
        self.values = values

    @property
    def d(self):
        return self.values.shape[0]

    @property
    def T(self):
        return self.values.shape[1]

    @property
    def M(self):
        return self.values.shape[2]

    @property
    def zero_variance(self):
        """(M, d) boolean mask of machine components with constant chains."""
        v = self.values
        return (v.max(axis=1) == v.min(axis=1)).T

    @property
    def has_degenerate_chain(self):
        return bool(self.zero_variance.any())

    def machine_draws(self, m):
        """The (d, T) draw matrix of machine ``m``."""
        return self.values[:, :, m]

    def __repr__(self):
        return f"SubposteriorBundle(d={self.d}, T={self.T}, M={self.M})"


class CombinedSamples:
    """A (d, T) matrix of pooled posterior draws."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch(
                f"combined samples must be a (d, T) matrix, got shape {values.shape}"
            )
        _check_finite(values)
        values = values.copy()
        values.setflags(write=False)
        self.values = values

    @property
    def d(self):
        return self.values.shape[0]

    @property
    def T(self):
        return self.values.shape[1]

    def __repr__(self):
        return f"CombinedSamples(d={self.d}, T={self.T})"


def _check_finite(values):
    if not np.isfinite(values).all():
        idx = np.argwhere(~np.isfinite(values))[0]
        pos = ", ".join(str(k) for k in idx)
        raise NonFiniteValue(f"non-finite value at index ({pos})")


def validate_bundle(raw, d=None, T=None, M=None):
    """Build a :class:`SubposteriorBundle` from a raw array.

    ``raw`` may already have shape (d, T, M), in which case the claimed
    dimensions (if given) are cross-checked, or it may be flat, in which
    case all three dimensions are required and the data is interpreted
    in C order.

    Raises
    ------
    DimensionMismatch
        If the element count differs from d*T*M.
    NonFiniteValue
        On the first NaN or infinity, reporting its index.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 3:
        claimed = (d, T, M)
        for axis, want in enumerate(claimed):
            if want is not None and raw.shape[axis] != want:
                raise DimensionMismatch(
                    f"claimed dims (d={d}, T={T}, M={M}) do not match "
                    f"array shape {raw.shape}"
                )
        return SubposteriorBundle(raw)
    if d is None or T is None or M is None:
        raise DimensionMismatch("flat input requires explicit d, T and M")
    if raw.size != d * T * M:
        raise DimensionMismatch(
            f"expected {d * T * M} values for (d={d}, T={T}, M={M}), got {raw.size}"
        )
    return SubposteriorBundle(raw.reshape(d, T, M))


def shuffle_within_machines(bundle, seed):
    """Independently permute the draw order of every machine.

    Each d-dimensional draw moves as a unit, so per-machine draw
    multisets are preserved exactly; only the pairing of draws across
    machines changes.  This breaks spurious correlation between
    same-index draws on different machines.
    """
    rng = np.random.default_rng(seed)
    shuffled = np.empty_like(bundle.values)
    for m in range(bundle.M):
        perm = rng.permutation(bundle.T)
        shuffled[:, :, m] = bundle.values[:, perm, m]
    return SubposteriorBundle(shuffled)
