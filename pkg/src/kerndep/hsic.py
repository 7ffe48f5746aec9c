"""Empirical HSIC estimators and permutation significance testing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import (
    AllPointsIdentical,
    DegenerateInput,
    DimensionMismatch,
    EstimateOutOfRange,
    InstanceTooLarge,
)
from .kernels import LINEAR, GramMatrix, KernelSpec, gram
from .samples import as_samples

HSIC_UNNORMALIZED = "hsic_unnormalized"
HSIC_NORMALIZED = "hsic_normalized"
SMI = "smi"
SMI_FIXED_THETA = "smi_fixed_theta"

# Normalized estimates may poke past [0, 1] by accumulated rounding; more
# than this is treated as a bug, not noise.
RANGE_SLACK = 1e-9

# A centered Gram whose Frobenius norm falls below n * eps-ish * scale is a
# constant variable plus float noise; dependence is undefined there.
_DEGENERATE_FACTOR = 1e-14


@dataclass(frozen=True)
class DependenceEstimate:
    """A scalar dependence value plus enough context to reproduce it."""

    value: float
    estimator: str
    n: int
    kernel_x: KernelSpec | None = None
    kernel_y: KernelSpec | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"estimate is not finite: {self.value!r}")
        if self.estimator in (HSIC_NORMALIZED, SMI_FIXED_THETA):
            lo, hi = (0.0, 1.0) if self.estimator == HSIC_NORMALIZED else (-1.0, 0.0)
            if not lo <= self.value <= hi:
                raise EstimateOutOfRange(
                    f"{self.estimator} value {self.value!r} outside [{lo}, {hi}]"
                )

    def to_json(self) -> dict:
        return {
            "estimator": self.estimator,
            "value": self.value,
            "n": self.n,
            "kernel_x": self.kernel_x.to_json() if self.kernel_x else None,
            "kernel_y": self.kernel_y.to_json() if self.kernel_y else None,
        }


@dataclass(frozen=True)
class PermutationTestResult:
    statistic: float
    p_value: float
    num_permutations: int
    seed: int

    def to_json(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "num_permutations": self.num_permutations,
            "seed": self.seed,
        }


def _gram_values(g):
    if isinstance(g, GramMatrix):
        return g.values, g.spec
    arr = np.ascontiguousarray(g, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square Gram matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Gram matrix contains NaN or infinity")
    return arr, None


def _paired(k, l):
    kv, ks = _gram_values(k)
    lv, ls = _gram_values(l)
    if kv.shape[0] != lv.shape[0]:
        raise DimensionMismatch(
            f"Gram matrices disagree on sample count: {kv.shape[0]} vs {lv.shape[0]}"
        )
    return kv, ks, lv, ls


def _degenerate_tol(values):
    n = values.shape[0]
    return _DEGENERATE_FACTOR * n * max(1.0, float(np.abs(values).max()))


def centered_pair(k, l):
    """Center both Gram matrices and compute their Frobenius norms, raising
    DegenerateInput when either centered matrix is numerically zero.
    """
    kv, ks, lv, ls = _paired(k, l)
    kc = _backend.center(kv)
    lc = _backend.center(lv)
    nk = _backend.fro_norm(kc)
    nl = _backend.fro_norm(lc)
    if nk <= _degenerate_tol(kv):
        raise DegenerateInput("first variable is constant under its kernel")
    if nl <= _degenerate_tol(lv):
        raise DegenerateInput("second variable is constant under its kernel")
    return kc, lc, nk, nl, ks, ls


def _clamped_unit(value):
    if value < -RANGE_SLACK or value > 1.0 + RANGE_SLACK:
        raise EstimateOutOfRange(f"normalized statistic {value!r} outside [0, 1]")
    return min(max(value, 0.0), 1.0)


def hsic_unnormalized(k, l) -> DependenceEstimate:
    """Biased empirical HSIC: tr(K H L H) / (n - 1)^2."""
    kv, ks, lv, ls = _paired(k, l)
    n = kv.shape[0]
    cross, _, _ = _backend.centered_stats(kv, lv)
    value = cross / float(n - 1) ** 2
    return DependenceEstimate(value, HSIC_UNNORMALIZED, n, ks, ls)


def hsic_normalized(k, l) -> DependenceEstimate:
    """Normalized HSIC in [0, 1]: the cosine of the angle between the two
    centered Gram matrices, tr(K H L H) / (|HKH|_F |HLH|_F).
    """
    kv, ks, lv, ls = _paired(k, l)
    cross, fro_k, fro_l = _backend.centered_stats(kv, lv)
    nk, nl = math.sqrt(fro_k), math.sqrt(fro_l)
    if nk <= _degenerate_tol(kv):
        raise DegenerateInput("first variable is constant under its kernel")
    if nl <= _degenerate_tol(lv):
        raise DegenerateInput("second variable is constant under its kernel")
    value = _clamped_unit(cross / (nk * nl))
    return DependenceEstimate(value, HSIC_NORMALIZED, kv.shape[0], ks, ls)


# ---------------------------------------------------------------------------
# Brute-force oracle


def _scalar_rbf(a, b, sigma):
    s = 0.0
    for u, v in zip(a, b):
        d = u - v
        s += d * d
    return math.exp(-s / (2.0 * sigma * sigma))


def _scalar_linear(a, b):
    s = 0.0
    for u, v in zip(a, b):
        s += u * v
    return s


def _scalar_median_bandwidth(rows):
    dists = []
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            s = 0.0
            for u, v in zip(rows[i], rows[j]):
                d = u - v
                s += d * d
            dists.append(math.sqrt(s))
    dists.sort()
    m = len(dists)
    med = dists[m // 2] if m % 2 else 0.5 * (dists[m // 2 - 1] + dists[m // 2])
    if med <= 0.0:
        raise AllPointsIdentical("median pairwise distance is zero")
    return med


def hsic_brute_force(x, y, kernel_x: KernelSpec, kernel_y: KernelSpec,
                     max_n: int = 200) -> float:
    """Unnormalized HSIC by direct expansion, in pure scalar arithmetic.

    Every kernel entry is evaluated with Python floats and the statistic is
    accumulated as

        sum_ij K_ij L_ij - (2/n) sum_i rowK_i rowL_i + (sumK sumL) / n^2

    all divided by (n - 1)^2. No ndarray algebra is involved, so this path
    cannot share a vectorization bug with hsic_unnormalized. It is O(n^2 d)
    in interpreted code and guarded by max_n; raise the cap knowingly.
    """
    x = as_samples(x)
    y = as_samples(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n > max_n:
        raise InstanceTooLarge(f"n={n} exceeds the brute-force cap of {max_n}")

    def entry_fn(rows, spec):
        if spec.kind == LINEAR:
            return lambda a, b: _scalar_linear(a, b)
        sigma = spec.bandwidth
        if sigma is None:
            sigma = _scalar_median_bandwidth(rows)
        return lambda a, b: _scalar_rbf(a, b, sigma)

    xr = [list(map(float, row)) for row in x]
    yr = [list(map(float, row)) for row in y]
    kf = entry_fn(xr, kernel_x)
    lf = entry_fn(yr, kernel_y)

    k_rows = [[kf(xr[i], xr[j]) for j in range(n)] for i in range(n)]
    l_rows = [[lf(yr[i], yr[j]) for j in range(n)] for i in range(n)]

    cross = 0.0
    row_k = [0.0] * n
    row_l = [0.0] * n
    for i in range(n):
        ki = k_rows[i]
        li = l_rows[i]
        for j in range(n):
            cross += ki[j] * li[j]
            row_k[i] += ki[j]
            row_l[i] += li[j]
    mixed = 0.0
    for i in range(n):
        mixed += row_k[i] * row_l[i]
    total_k = sum(row_k)
    total_l = sum(row_l)
    trace = cross - (2.0 / n) * mixed + total_k * total_l / (n * n)
    return trace / float(n - 1) ** 2


# ---------------------------------------------------------------------------
# Permutation test


def permutation_test(x, y, kernel_x: KernelSpec, kernel_y: KernelSpec,
                     num_permutations: int = 199, seed: int = 0) -> PermutationTestResult:
    """Permutation test of independence with normalized HSIC as the statistic.

    The rows of y are re-paired with x by Fisher-Yates permutations; the
    add-one estimate p = (1 + #{perm >= observed}) / (1 + B) keeps the test
    valid at finite B. Centering and the Frobenius norms commute with a
    joint relabeling, so each permuted statistic only needs a gathered
    entrywise sum over the already-centered matrices.

    Permutation b draws its own generator seeded from (seed, b), which
    makes the p-value reproducible and independent of evaluation order.
    """
    if num_permutations < 99:
        raise ValueError(f"need at least 99 permutations, got {num_permutations}")
    x = as_samples(x)
    y = as_samples(y)
    kc, lc, nk, nl, ks, ls = centered_pair(gram(x, kernel_x), gram(y, kernel_y))
    n = kc.shape[0]
    denom = nk * nl
    observed = _backend.sum_product(kc, lc) / denom
    exceed = 0
    for b in range(num_permutations):
        perm = np.random.default_rng((seed, b)).permutation(n)
        stat = _backend.permuted_sum_product(kc, lc, perm) / denom
        if stat >= observed:
            exceed += 1
    p_value = (1 + exceed) / (1 + num_permutations)
    return PermutationTestResult(_clamped_unit(observed), p_value, num_permutations, seed)
