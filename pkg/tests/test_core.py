"""Bundle validation and the per-machine shuffle."""

import numpy as np
import pytest

from chaincombine import (
    DimensionMismatch,
    NonFiniteValue,
    SubposteriorBundle,
    shuffle_within_machines,
    validate_bundle,
)


class TestValidateBundle:
    def test_well_formed_flat_input(self):
        raw = np.arange(12.0)
        bundle = validate_bundle(raw, d=2, T=3, M=2)
        assert (bundle.d, bundle.T, bundle.M) == (2, 3, 2)
        np.testing.assert_array_equal(bundle.values, raw.reshape(2, 3, 2))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            validate_bundle(np.arange(11.0), d=2, T=3, M=2)

    def test_nan_reports_index(self):
        raw = np.zeros((2, 3, 2))
        raw[1, 2, 0] = np.nan
        with pytest.raises(NonFiniteValue, match=r"\(1, 2, 0\)"):
            validate_bundle(raw)

    def test_infinity_rejected(self):
        raw = np.zeros((1, 2, 1))
        raw[0, 0, 0] = np.inf
        with pytest.raises(NonFiniteValue):
            SubposteriorBundle(raw)

    def test_shaped_input_cross_checks_claimed_dims(self):
        raw = np.zeros((2, 3, 2))
        assert validate_bundle(raw, d=2, T=3, M=2).T == 3
        with pytest.raises(DimensionMismatch):
            validate_bundle(raw, d=3, T=3, M=2)

    def test_flat_input_requires_dims(self):
        with pytest.raises(DimensionMismatch):
            validate_bundle(np.arange(12.0))

    def test_zero_variance_tagged_not_rejected(self):
        raw = np.zeros((2, 3, 2))
        raw[0, :, 0] = 5.0            # constant chain
        raw[1, :, 0] = [1.0, 2.0, 3.0]
        raw[:, :, 1] = np.arange(6.0).reshape(2, 3)
        bundle = validate_bundle(raw)
        assert bundle.has_degenerate_chain
        assert bundle.zero_variance[0, 0]
        assert not bundle.zero_variance[0, 1]
        assert not bundle.zero_variance[1].any()

    def test_values_are_immutable(self):
        bundle = validate_bundle(np.zeros((1, 2, 1)))
        with pytest.raises(ValueError):
            bundle.values[0, 0, 0] = 1.0


class TestShuffleWithinMachines:
    def test_single_machine_two_draws_preserves_multiset(self):
        values = np.array([[1.0, 3.0], [2.0, 4.0]]).reshape(2, 2, 1)
        bundle = validate_bundle(values)
        shuffled = shuffle_within_machines(bundle, seed=7)
        drawn = sorted(map(tuple, shuffled.values[:, :, 0].T))
        assert drawn == [(1.0, 2.0), (3.0, 4.0)]

    def test_same_seed_same_output(self):
        rng = np.random.default_rng(3)
        bundle = validate_bundle(rng.standard_normal((3, 20, 4)))
        a = shuffle_within_machines(bundle, seed=11)
        b = shuffle_within_machines(bundle, seed=11)
        np.testing.assert_array_equal(a.values, b.values)

    def test_per_machine_sorted_draws_unchanged(self):
        # Sort-and-compare oracle: a permutation of draw positions leaves
        # each machine's lexicographically sorted draw list unchanged.
        rng = np.random.default_rng(5)
        bundle = validate_bundle(rng.standard_normal((2, 5, 3)))
        shuffled = shuffle_within_machines(bundle, seed=13)
        for m in range(bundle.M):
            before = np.sort(bundle.values[:, :, m].T.tolist(), axis=0)
            after = np.sort(shuffled.values[:, :, m].T.tolist(), axis=0)
            np.testing.assert_array_equal(before, after)

    def test_draw_vectors_move_as_units(self):
        # Components of one draw stay together: tag each draw by an exact
        # linear relation between its components and check it survives.
        t = np.arange(10.0)
        values = np.stack([t, 2.0 * t], axis=0).reshape(2, 10, 1)
        shuffled = shuffle_within_machines(validate_bundle(values), seed=2)
        np.testing.assert_array_equal(
            shuffled.values[1, :, 0], 2.0 * shuffled.values[0, :, 0]
        )

    def test_distinct_seeds_usually_differ(self):
        # Statistical smoke test, not a hard guarantee: with T=12 the
        # chance of two seeds agreeing is 1/12!.
        rng = np.random.default_rng(9)
        bundle = validate_bundle(rng.standard_normal((1, 12, 2)))
        a = shuffle_within_machines(bundle, seed=1)
        b = shuffle_within_machines(bundle, seed=2)
        assert not np.array_equal(a.values, b.values)
