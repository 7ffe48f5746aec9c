import numpy as np
import pytest

from kerndep.errors import (
    DegenerateInput,
    DimensionMismatch,
    EstimateOutOfRange,
    InstanceTooLarge,
)
from kerndep.hsic import (
    HSIC_NORMALIZED,
    DependenceEstimate,
    hsic_brute_force,
    hsic_normalized,
    hsic_unnormalized,
    permutation_test,
)
from kerndep.kernels import LINEAR, RBF, KernelSpec, gram

LIN = KernelSpec(LINEAR)


def test_worked_example_unnormalized():
    # x = (1, 2, 3) with linear kernels on both sides: the centered Gram
    # is [[1,0,-1],[0,0,0],[-1,0,1]], tr(Kc Lc) = 4, so HSIC = 4/(3-1)^2.
    g = gram([1.0, 2.0, 3.0], LIN)
    est = hsic_unnormalized(g, g)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.n == 3


def test_self_dependence_is_one(rng):
    x = rng.normal(size=(40, 3))
    g = gram(x, KernelSpec(RBF))
    assert hsic_normalized(g, g).value == pytest.approx(1.0, abs=1e-12)


def test_normalized_range(rng):
    for _ in range(20):
        x = rng.normal(size=(30, 2))
        y = rng.normal(size=(30, 2))
        v = hsic_normalized(gram(x, KernelSpec(RBF)), gram(y, KernelSpec(RBF))).value
        assert 0.0 <= v <= 1.0


def test_linear_1d_equals_squared_correlation(rng):
    # For 1-D variables under linear kernels the normalized statistic is
    # exactly the squared Pearson correlation.
    for _ in range(10):
        x = rng.normal(size=50)
        y = 0.6 * x + 0.8 * rng.normal(size=50)
        rho = np.corrcoef(x, y)[0, 1]
        v = hsic_normalized(gram(x, LIN), gram(y, LIN)).value
        assert v == pytest.approx(rho ** 2, abs=1e-10)


@pytest.mark.parametrize("kx,ky", [
    (KernelSpec(RBF), KernelSpec(RBF)),
    (KernelSpec(RBF, 0.7), KernelSpec(LINEAR)),
    (KernelSpec(LINEAR), KernelSpec(LINEAR)),
    (KernelSpec(RBF, 2.0), KernelSpec(RBF)),
])
def test_matches_brute_force_oracle(kx, ky, rng):
    x = rng.normal(size=(23, 3))
    y = x[:, :2] + 0.3 * rng.normal(size=(23, 2))
    fast = hsic_unnormalized(gram(x, kx), gram(y, ky)).value
    slow = hsic_brute_force(x, y, kx, ky)
    assert fast == pytest.approx(slow, abs=1e-10)


def test_brute_force_caps_n(rng):
    x = rng.normal(size=(7, 1))
    with pytest.raises(InstanceTooLarge):
        hsic_brute_force(x, x, LIN, LIN, max_n=6)


def test_brute_force_sample_count_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        hsic_brute_force(rng.normal(size=(5, 1)), rng.normal(size=(6, 1)), LIN, LIN)


def test_constant_variable_is_degenerate():
    x = np.ones((10, 2))
    y = np.arange(10.0)
    k = gram(x, KernelSpec(RBF, 1.0))  # all-ones Gram, zero after centering
    with pytest.raises(DegenerateInput):
        hsic_normalized(k, gram(y, KernelSpec(RBF, 1.0)))


def test_accepts_plain_arrays(rng):
    x = rng.normal(size=(12, 2))
    k = gram(x, KernelSpec(RBF, 1.0)).values
    est = hsic_normalized(k, k)
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.kernel_x is None  # plain arrays carry no spec


def test_rejects_mismatched_gram_sizes(rng):
    a = gram(rng.normal(size=(8, 1)), LIN)
    b = gram(rng.normal(size=(9, 1)), LIN)
    with pytest.raises(DimensionMismatch):
        hsic_unnormalized(a, b)


def test_rejects_non_square_plain_array():
    with pytest.raises(ValueError, match="square"):
        hsic_unnormalized(np.zeros((3, 4)), np.zeros((3, 3)))


def test_estimate_range_is_enforced():
    with pytest.raises(EstimateOutOfRange):
        DependenceEstimate(1.5, HSIC_NORMALIZED, 10)


def test_estimate_to_json():
    est = DependenceEstimate(0.25, HSIC_NORMALIZED, 10, KernelSpec(RBF, 1.0), None)
    out = est.to_json()
    assert out == {"estimator": "hsic_normalized", "value": 0.25, "n": 10,
                   "kernel_x": {"kind": "rbf", "bandwidth": 1.0},
                   "kernel_y": None}


class TestPermutationTest:
    def test_requires_99_permutations(self, rng):
        x = rng.normal(size=(20, 1))
        with pytest.raises(ValueError, match="99"):
            permutation_test(x, x, LIN, LIN, num_permutations=50)

    def test_deterministic_in_seed(self, rng):
        x = rng.normal(size=(40, 1))
        y = rng.normal(size=(40, 1))
        a = permutation_test(x, y, KernelSpec(RBF), KernelSpec(RBF), 99, seed=7)
        b = permutation_test(x, y, KernelSpec(RBF), KernelSpec(RBF), 99, seed=7)
        assert a == b

    def test_statistic_matches_normalized_hsic(self, rng):
        x = rng.normal(size=(30, 2))
        y = rng.normal(size=(30, 2))
        result = permutation_test(x, y, KernelSpec(RBF), KernelSpec(RBF), 99)
        direct = hsic_normalized(gram(x, KernelSpec(RBF)),
                                 gram(y, KernelSpec(RBF))).value
        assert result.statistic == pytest.approx(direct, abs=1e-12)

    def test_detects_strong_dependence(self, rng):
        x = rng.normal(size=(60, 1))
        y = x + 0.05 * rng.normal(size=(60, 1))
        result = permutation_test(x, y, KernelSpec(RBF), KernelSpec(RBF), 199)
        assert result.p_value == pytest.approx(1 / 200)  # nothing beats observed

    def test_independent_data_not_significant(self, rng):
        x = rng.normal(size=(60, 1))
        y = rng.normal(size=(60, 1))
        result = permutation_test(x, y, KernelSpec(RBF), KernelSpec(RBF), 199,
                                  seed=11)
        assert result.p_value > 0.05

    def test_to_json(self, rng):
        x = rng.normal(size=(20, 1))
        y = rng.normal(size=(20, 1))
        out = permutation_test(x, y, LIN, LIN, 99, seed=3).to_json()
        assert set(out) == {"statistic", "p_value", "num_permutations", "seed"}
        assert out["num_permutations"] == 99
        assert out["seed"] == 3
