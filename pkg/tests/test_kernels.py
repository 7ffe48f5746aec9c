import numpy as np
import pytest

from kerndep.errors import AllPointsIdentical, DimensionMismatch
from kerndep.kernels import (
    LINEAR,
    RBF,
    GramMatrix,
    KernelSpec,
    center,
    cross_gram,
    gram,
    median_heuristic_bandwidth,
)


def scratch_sq_dists(x):
    x = np.asarray(x, dtype=np.float64)
    return ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=-1)


class TestKernelSpec:
    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown kernel kind"):
            KernelSpec("polynomial")

    def test_linear_takes_no_bandwidth(self):
        with pytest.raises(ValueError):
            KernelSpec(LINEAR, 1.0)

    @pytest.mark.parametrize("bw", [0.0, -1.0, np.nan, np.inf])
    def test_rejects_bad_bandwidth(self, bw):
        with pytest.raises(ValueError):
            KernelSpec(RBF, bw)

    def test_json_round_trip(self):
        for spec in (KernelSpec(RBF, 2.5), KernelSpec(RBF), KernelSpec(LINEAR)):
            assert KernelSpec.from_json(spec.to_json()) == spec

    def test_from_json_rejects_extra_keys(self):
        with pytest.raises(ValueError, match="malformed"):
            KernelSpec.from_json({"kind": "rbf", "bandwidth": 1.0, "x": 2})


class TestGramMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            GramMatrix(np.zeros((2, 3)), KernelSpec(LINEAR))

    def test_rejects_nan(self):
        values = np.eye(3)
        values[0, 1] = values[1, 0] = np.nan
        with pytest.raises(ValueError, match="NaN"):
            GramMatrix(values, KernelSpec(LINEAR))

    def test_rejects_asymmetry(self):
        values = np.eye(3)
        values[0, 1] = 0.5
        with pytest.raises(ValueError, match="symmetric"):
            GramMatrix(values, KernelSpec(LINEAR))

    def test_n_property(self):
        assert GramMatrix(np.eye(4), KernelSpec(LINEAR)).n == 4


class TestMedianHeuristic:
    def test_two_points(self):
        assert median_heuristic_bandwidth([[0.0], [2.0]]) == 2.0

    def test_three_points(self):
        # distances 1, 2, 3; the middle one is 2
        assert median_heuristic_bandwidth([[0.0], [1.0], [3.0]]) == 2.0

    @pytest.mark.parametrize("n", [4, 5, 16, 33, 80])
    def test_matches_median_of_all_pairs(self, n, rng):
        x = rng.normal(size=(n, 3))
        d = np.sqrt(scratch_sq_dists(x))
        expected = float(np.median(d[np.triu_indices(n, k=1)]))
        got = median_heuristic_bandwidth(x)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_identical_points_raise(self):
        with pytest.raises(AllPointsIdentical):
            median_heuristic_bandwidth(np.ones((5, 2)))

    def test_majority_duplicates_raise(self):
        # 4 of 5 rows equal: 6 of the 10 pairwise distances are zero, so
        # the median is zero even though the rows are not all identical.
        x = np.zeros((5, 2))
        x[4] = [1.0, 1.0]
        with pytest.raises(AllPointsIdentical):
            median_heuristic_bandwidth(x)


class TestGram:
    def test_linear_outer_product(self):
        g = gram([1.0, 2.0, 3.0], KernelSpec(LINEAR))
        assert np.array_equal(g.values, [[1, 2, 3], [2, 4, 6], [3, 6, 9]])

    def test_rbf_matches_direct_formula(self, rng):
        x = rng.normal(size=(20, 4))
        sigma = 1.3
        g = gram(x, KernelSpec(RBF, sigma))
        expected = np.exp(-scratch_sq_dists(x) / (2.0 * sigma * sigma))
        assert np.allclose(g.values, expected, rtol=1e-12, atol=1e-14)
        assert np.array_equal(np.diag(g.values), np.ones(20))

    def test_median_bandwidth_is_resolved_into_spec(self, rng):
        x = rng.normal(size=(15, 2))
        g = gram(x, KernelSpec(RBF))
        assert g.spec.bandwidth == median_heuristic_bandwidth(x)
        # reusing the resolved spec reproduces the matrix exactly
        again = gram(x, g.spec)
        assert np.array_equal(again.values, g.values)

    def test_requires_kernel_spec(self):
        with pytest.raises(TypeError):
            gram(np.eye(3), "rbf")


class TestCrossGram:
    def test_linear(self, rng):
        x = rng.normal(size=(6, 3))
        c = rng.normal(size=(4, 3))
        assert np.allclose(cross_gram(x, c, KernelSpec(LINEAR)), x @ c.T)

    def test_rbf_matches_direct_formula(self, rng):
        x = rng.normal(size=(6, 3))
        c = rng.normal(size=(4, 3))
        d2 = ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1)
        got = cross_gram(x, c, KernelSpec(RBF, 0.9))
        assert np.allclose(got, np.exp(-d2 / (2 * 0.81)), rtol=1e-12)

    def test_diagonal_block_agrees_with_gram(self, rng):
        x = rng.normal(size=(8, 2))
        spec = KernelSpec(RBF, 1.1)
        assert np.allclose(cross_gram(x, x, spec), gram(x, spec).values,
                           rtol=1e-12, atol=1e-14)

    def test_needs_resolved_bandwidth(self, rng):
        x = rng.normal(size=(4, 2))
        with pytest.raises(ValueError, match="bandwidth"):
            cross_gram(x, x, KernelSpec(RBF))

    def test_feature_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            cross_gram(rng.normal(size=(4, 2)), rng.normal(size=(4, 3)),
                       KernelSpec(LINEAR))


class TestCenter:
    def test_worked_example(self):
        g = gram([1.0, 2.0, 3.0], KernelSpec(LINEAR))
        expected = [[1.0, 0.0, -1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 1.0]]
        assert np.allclose(center(g), expected, atol=1e-12)

    def test_equals_projection_sandwich(self, rng):
        g = rng.normal(size=(9, 9))
        g = g + g.T
        n = g.shape[0]
        h = np.eye(n) - np.ones((n, n)) / n
        assert np.allclose(center(g), h @ g @ h, rtol=1e-12, atol=1e-12)

    def test_row_and_column_means_vanish(self, rng):
        g = rng.normal(size=(11, 11))
        c = center(g + g.T)
        assert np.abs(c.mean(axis=0)).max() < 1e-12
        assert np.abs(c.mean(axis=1)).max() < 1e-12

    def test_symmetric_input_stays_bitwise_symmetric(self, rng):
        g = rng.normal(size=(13, 13))
        c = center(g + g.T)
        assert np.array_equal(c, c.T)

    def test_rejects_non_square_plain_array(self):
        with pytest.raises(ValueError, match="square"):
            center(np.zeros((2, 3)))
