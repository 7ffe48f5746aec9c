"""Numerical backend selection for the hot kernels.

Two interchangeable implementations exist for the O(n^2) primitives
(pairwise distances, RBF evaluation, Gram centering, statistic sums,
permutation gathers): a Cython extension and a numpy fallback. The
compiled one wins when it imported cleanly. Override with the
KERNDEP_BACKEND environment variable ("compiled" or "python") or at
runtime with select(); the benchmark and the parity tests do the latter.
"""

import os

import numpy as np

from . import _kernels_np

_BACKENDS = {"python": _kernels_np}
try:
    from . import _kernels_cy

    _BACKENDS["compiled"] = _kernels_cy
except ImportError:
    pass


def available_backends():
    return tuple(sorted(_BACKENDS))


def select(name):
    """Switch the active backend; returns the previously active name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        )
    previous = _active.name
    _active = _BACKENDS[name]
    return previous


def backend_name():
    return _active.name


def _initial():
    forced = os.environ.get("KERNDEP_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(
                f"KERNDEP_BACKEND={forced!r} but that backend is unavailable; "
                f"have {available_backends()}"
            )
        return _BACKENDS[forced]
    return _BACKENDS.get("compiled", _kernels_np)


_active = _initial()


def _mat(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def pairwise_sq_dists(x):
    return _active.pairwise_sq_dists(_mat(x))


def rbf_from_sq_dists(d2, sigma):
    return _active.rbf_from_sq_dists(_mat(d2), float(sigma))


def rbf_from_sq_dists_inplace(d2, sigma):
    return _active.rbf_from_sq_dists_inplace(_mat(d2), float(sigma))


def center(g):
    return _active.center(_mat(g))


def centered_stats(k, l):
    return _active.centered_stats(_mat(k), _mat(l))


def max_abs(a):
    return _active.max_abs(_mat(a))


def max_asym(a):
    return _active.max_asym(_mat(a))


def sum_product(a, b):
    return _active.sum_product(_mat(a), _mat(b))


def fro_norm(a):
    return _active.fro_norm(_mat(a))


def permuted_sum_product(kc, lc, perm):
    perm = np.ascontiguousarray(perm, dtype=np.intp)
    return _active.permuted_sum_product(_mat(kc), _mat(lc), perm)
