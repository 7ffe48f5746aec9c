"""Squared-loss mutual information via least-squares density-ratio fitting.

The joint-to-marginal ratio r(x, y) = p(x, y) / (p(x) p(y)) is modeled as
r_theta(x, y) = sum_l theta_l k(x, x_l) l(y, y_l) over the sample points as
centers. Minimizing the squared ratio error has the closed form

    theta_hat = (H_hat + lam I)^{-1} h_hat
    H_hat     = (K^T K) .* (L^T L) / n^2      (entrywise product)
    h_hat     = (K .* L)^T 1 / n

and SMI itself is estimated as mean(r_theta at the paired points) - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, EstimateOutOfRange, SingularSystem
from .hsic import (
    SMI,
    SMI_FIXED_THETA,
    DependenceEstimate,
    RANGE_SLACK,
    centered_pair,
)
from .kernels import KernelSpec, cross_gram, gram
from .samples import as_samples

COND_LIMIT = 1e12

DEFAULT_LAMBDA_GRID = (1e-3, 1e-2, 1e-1, 1.0)


@dataclass(frozen=True)
class SmiConfig:
    """Cross-validation settings for the regularization weight."""

    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    cv_folds: int = 5

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid or any(v <= 0 or not np.isfinite(v) for v in grid):
            raise ValueError("lambda_grid must be non-empty positive reals")
        object.__setattr__(self, "lambda_grid", grid)
        if self.cv_folds < 2:
            raise ValueError(f"cv_folds must be >= 2, got {self.cv_folds}")


@dataclass(frozen=True)
class DensityRatioModel:
    """Fitted ratio weights plus the centers and kernels they refer to."""

    theta: np.ndarray
    kernel_x: KernelSpec
    kernel_y: KernelSpec
    centers_x: np.ndarray
    centers_y: np.ndarray
    lam: float

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.ndim != 1 or theta.shape[0] != self.centers_x.shape[0]:
            raise ValueError("theta must hold one weight per center")
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta contains NaN or infinity")
        object.__setattr__(self, "theta", theta)

    def ratio(self, x, y) -> np.ndarray:
        """Evaluate r_theta at paired points (x_i, y_i)."""
        kx = cross_gram(x, self.centers_x, self.kernel_x)
        ly = cross_gram(y, self.centers_y, self.kernel_y)
        return (kx * ly) @ self.theta


def _ratio_system(k, l):
    """H_hat and h_hat of the least-squares fit, for evaluation blocks whose
    rows are samples and whose columns are the shared centers."""
    m = k.shape[0]
    h_mat = (k.T @ k) * (l.T @ l) / float(m * m)
    h_vec = np.einsum("il,il->l", k, l) / float(m)
    return h_mat, h_vec


def _solve_regularized(h_mat, h_vec, lam):
    a = h_mat + lam * np.eye(h_mat.shape[0])
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(
            f"system condition number {cond:.3e} exceeds {COND_LIMIT:.0e}"
        )
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Cholesky factorization failed: {exc}") from exc
    return scipy.linalg.cho_solve(factor, h_vec, check_finite=False)


def fit_density_ratio(x, y, kernel_x: KernelSpec, kernel_y: KernelSpec,
                      lam: float) -> DensityRatioModel:
    """Fit ratio weights on paired samples, using every sample as a center.

    lam >= 0; zero is allowed and simply means the normal equations are
    solved unregularized (SingularSystem if they are too ill-conditioned).
    """
    x = as_samples(x)
    y = as_samples(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    lam = float(lam)
    if lam < 0 or not np.isfinite(lam):
        raise ValueError(f"lam must be a nonnegative real, got {lam!r}")
    gk = gram(x, kernel_x)
    gl = gram(y, kernel_y)
    h_mat, h_vec = _ratio_system(gk.values, gl.values)
    theta = _solve_regularized(h_mat, h_vec, lam)
    return DensityRatioModel(theta, gk.spec, gl.spec, x.copy(), y.copy(), lam)


def _weighted_mean_ratio(theta, k, l):
    # (1/m) 1^T (K .* L) theta - 1 with rows = evaluation samples
    per_center = np.einsum("il,il->l", k, l)
    return float(per_center @ theta) / k.shape[0] - 1.0


def smi_estimate(x, y, model: DensityRatioModel) -> DependenceEstimate:
    """SMI of paired samples under an already-fitted ratio model."""
    x = as_samples(x)
    y = as_samples(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    kx = cross_gram(x, model.centers_x, model.kernel_x)
    ly = cross_gram(y, model.centers_y, model.kernel_y)
    value = _weighted_mean_ratio(model.theta, kx, ly)
    return DependenceEstimate(value, SMI, x.shape[0], model.kernel_x, model.kernel_y)


def smi_fixed_theta(k, l) -> DependenceEstimate:
    """SMI evaluated on centered Gram matrices with the weights pinned to the
    constant n / (|HKH|_F |HLH|_F) instead of being fitted.

    That constant makes the ratio evaluation collapse onto the normalized
    HSIC cosine: smi_fixed_theta(k, l).value + 1 == hsic_normalized(k, l)
    up to float rounding. The identity is the contact point between the
    two estimator families and is pinned by tests at 1e-10.
    """
    kc, lc, nk, nl, ks, ls = centered_pair(k, l)
    n = kc.shape[0]
    theta = np.full(n, n / (nk * nl))
    raw = _weighted_mean_ratio(theta, kc, lc)
    # raw + 1 is a normalized cosine; tolerate float overshoot only.
    shifted = raw + 1.0
    if shifted < -RANGE_SLACK or shifted > 1.0 + RANGE_SLACK:
        raise EstimateOutOfRange(f"fixed-theta value {raw!r} outside [-1, 0]")
    value = min(max(shifted, 0.0), 1.0) - 1.0
    return DependenceEstimate(value, SMI_FIXED_THETA, n, ks, ls)


def _fold_indices(n, folds, seed):
    order = np.random.default_rng((seed, 0)).permutation(n)
    return [np.sort(part) for part in np.array_split(order, folds)]


def smi_cross_validated(x, y, kernel_x: KernelSpec, kernel_y: KernelSpec,
                        config: SmiConfig | None = None, seed: int = 0):
    """Pick lam from config.lambda_grid by K-fold cross-validation of the
    squared ratio-fit loss, then fit on everything and estimate SMI.

    Returns (DependenceEstimate, chosen_lam). Ties and grid order are
    broken toward the first grid entry; a lam whose fold system is
    singular is skipped, and SingularSystem is raised only if every
    candidate fails.
    """
    if config is None:
        config = SmiConfig()
    x = as_samples(x)
    y = as_samples(y)
    if x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    n = x.shape[0]
    if n < 2 * config.cv_folds:
        raise ValueError(f"need at least {2 * config.cv_folds} samples for "
                         f"{config.cv_folds}-fold cross-validation, got {n}")
    gk = gram(x, kernel_x)
    gl = gram(y, kernel_y)
    k_full, l_full = gk.values, gl.values
    folds = _fold_indices(n, config.cv_folds, seed)
    everything = np.arange(n)

    scores = []
    for lam in config.lambda_grid:
        total = 0.0
        usable = True
        for held in folds:
            train = np.setdiff1d(everything, held, assume_unique=True)
            h_tr, v_tr = _ratio_system(k_full[np.ix_(train, train)],
                                       l_full[np.ix_(train, train)])
            try:
                theta = _solve_regularized(h_tr, v_tr, lam)
            except SingularSystem:
                usable = False
                break
            h_ho, v_ho = _ratio_system(k_full[np.ix_(held, train)],
                                       l_full[np.ix_(held, train)])
            total += 0.5 * float(theta @ h_ho @ theta) - float(v_ho @ theta)
        scores.append(total if usable else np.inf)

    best = int(np.argmin(scores))
    if not np.isfinite(scores[best]):
        raise SingularSystem("every lambda in the grid produced a singular system")
    lam = config.lambda_grid[best]
    # gk.spec / gl.spec carry resolved bandwidths, so the final fit reuses
    # exactly the kernels the folds were scored under.
    model = fit_density_ratio(x, y, gk.spec, gl.spec, lam)
    return smi_estimate(x, y, model), lam
