"""Kernel specifications, Gram matrices, and the centering operator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import AllPointsIdentical, DimensionMismatch
from .samples import as_samples

RBF = "rbf"
LINEAR = "linear"
KINDS = (RBF, LINEAR)

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    kind is "rbf" or "linear". For an RBF kernel, bandwidth None means
    "resolve by the median heuristic when a Gram matrix is built"; the
    linear kernel carries no bandwidth at all.
    """

    kind: str
    bandwidth: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == LINEAR and self.bandwidth is not None:
            raise ValueError("linear kernel takes no bandwidth")
        if self.bandwidth is not None:
            bw = float(self.bandwidth)
            if not np.isfinite(bw) or bw <= 0.0:
                raise ValueError(f"bandwidth must be a positive real, got {self.bandwidth!r}")
            object.__setattr__(self, "bandwidth", bw)

    def to_json(self) -> dict:
        return {"kind": self.kind, "bandwidth": self.bandwidth}

    @classmethod
    def from_json(cls, obj: dict) -> "KernelSpec":
        if not isinstance(obj, dict) or set(obj) - {"kind", "bandwidth"}:
            raise ValueError(f"malformed kernel spec: {obj!r}")
        return cls(obj.get("kind"), obj.get("bandwidth"))


@dataclass(frozen=True)
class GramMatrix:
    """A validated kernel matrix together with the spec that produced it."""

    values: np.ndarray
    spec: KernelSpec

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"Gram matrix must be square, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Gram matrix contains NaN or infinity")
        scale = max(1.0, _backend.max_abs(arr))
        if _backend.max_asym(arr) > SYMMETRY_TOL * scale:
            raise ValueError("Gram matrix is not symmetric")
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def median_heuristic_bandwidth(x) -> float:
    """Median of the pairwise Euclidean distances between rows of x.

    Errors with AllPointsIdentical when that median is zero (all rows
    equal, or duplicates in the majority), since no usable RBF bandwidth
    exists then.
    """
    x = as_samples(x)
    return _median_bandwidth(_backend.pairwise_sq_dists(x))


def _median_bandwidth(d2) -> float:
    # Median over the n(n-1)/2 unordered pairs. The matrix holds each pair
    # twice plus n zero diagonal entries; doubling every value leaves the
    # median alone, and the diagonal zeros sit below every off-diagonal
    # rank, so the pair median is the mean of the order statistics at
    # n + m//2 - 1 and n + m//2 (m = n^2 - n) of the full flattened
    # matrix. sqrt is monotone, so partitioning the squared distances
    # selects the same two entries; rooting just those beats a full
    # elementwise sqrt pass and a second temporary.
    n = d2.shape[0]
    m = n * n - n
    lo, hi = n + m // 2 - 1, n + m // 2
    picked = np.partition(d2.ravel(), (lo, hi))
    med = (math.sqrt(picked[lo]) + math.sqrt(picked[hi])) / 2.0
    if med <= 0.0:
        raise AllPointsIdentical("median pairwise distance is zero")
    return med


def gram(x, spec: KernelSpec) -> GramMatrix:
    """Build the Gram matrix of x under spec.

    Returns a GramMatrix whose spec always has a concrete bandwidth: a
    median-heuristic RBF spec comes back with the resolved value, so the
    result is self-describing and reusable on new data.
    """
    x = as_samples(x)
    if not isinstance(spec, KernelSpec):
        raise TypeError(f"spec must be a KernelSpec, got {type(spec).__name__}")
    if spec.kind == LINEAR:
        k = x @ x.T
        k = 0.5 * (k + k.T)
        return GramMatrix(k, spec)
    d2 = _backend.pairwise_sq_dists(x)
    sigma = spec.bandwidth if spec.bandwidth is not None else _median_bandwidth(d2)
    # d2 is ours and dead after this, so let the map reuse its buffer.
    k = _backend.rbf_from_sq_dists_inplace(d2, sigma)
    return GramMatrix(k, KernelSpec(RBF, sigma))


def cross_gram(x, centers, spec: KernelSpec) -> np.ndarray:
    """Kernel evaluations k(x_i, c_j) between new samples and fixed centers.

    Plain ndarray, not a GramMatrix: the result is rectangular in general.
    spec must carry a concrete bandwidth when it is an RBF spec.
    """
    x = as_samples(x)
    centers = as_samples(centers)
    if x.shape[1] != centers.shape[1]:
        raise DimensionMismatch(
            f"samples have {x.shape[1]} features but centers have {centers.shape[1]}"
        )
    if spec.kind == LINEAR:
        return x @ centers.T
    if spec.bandwidth is None:
        raise ValueError("cross_gram needs a resolved RBF bandwidth")
    sq_x = np.einsum("ij,ij->i", x, x)
    sq_c = np.einsum("ij,ij->i", centers, centers)
    d2 = sq_x[:, None] + sq_c[None, :] - 2.0 * (x @ centers.T)
    np.maximum(d2, 0.0, out=d2)
    return _backend.rbf_from_sq_dists_inplace(d2, spec.bandwidth)


def center(g) -> np.ndarray:
    """Double-center a Gram matrix (or plain square array).

    Computes H @ g @ H with H = I - (1/n) 11^T without materializing H:
    row means, column means, and the grand mean do the whole job in
    O(n^2).
    """
    values = g.values if isinstance(g, GramMatrix) else None
    if values is None:
        values = np.asarray(g, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {values.shape}")
    return _backend.center(values)
