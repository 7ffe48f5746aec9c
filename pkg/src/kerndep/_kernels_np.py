"""Numpy implementations of the O(n^2) hot kernels.

This is the fallback backend; kerndep._kernels_cy implements the same six
functions in C. Both are selected through kerndep._backend and must agree
to float rounding, which the parity tests enforce.
"""

import numpy as np

name = "python"


def pairwise_sq_dists(x):
    """Matrix of squared Euclidean distances between rows of x.

    Uses the |a|^2 + |b|^2 - 2ab expansion so the heavy lifting is one
    BLAS call, then repairs the artifacts that expansion introduces:
    tiny negatives, a nonzero diagonal, and last-ulp asymmetry. Updates
    run in place where aliasing allows; big temporaries fault in slowly
    at this scale, so each one avoided matters.
    """
    sq = np.einsum("ij,ij->i", x, x)
    d2 = x @ x.T
    d2 *= -2.0
    d2 += sq[:, None]
    d2 += sq[None, :]
    d2 += d2.T.copy()
    d2 *= 0.5
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def rbf_from_sq_dists(d2, sigma):
    out = d2 * (-1.0 / (2.0 * sigma * sigma))
    np.exp(out, out=out)
    return out


def rbf_from_sq_dists_inplace(d2, sigma):
    """rbf_from_sq_dists overwriting its input; for callers that own d2."""
    d2 *= -1.0 / (2.0 * sigma * sigma)
    np.exp(d2, out=d2)
    return d2


def center(g):
    """Double-centered copy of g: subtract row and column means, add back
    the grand mean. Equivalent to H @ g @ H with H = I - (1/n) 11^T but
    O(n^2), and written so a symmetric input stays bitwise symmetric.
    """
    mu = g.mean(axis=1)
    out = mu[:, None] + mu[None, :]
    np.subtract(g, out, out=out)
    out += mu.mean()
    return out


def centered_stats(k, l):
    """(sum(Kc * Lc), sum(Kc * Kc), sum(Lc * Lc)) for the centered pair.

    The fallback materializes both centered matrices; the compiled twin
    streams them without allocating.
    """
    kc = center(k)
    lc = center(l)
    return float(np.vdot(kc, lc)), float(np.vdot(kc, kc)), float(np.vdot(lc, lc))


def max_abs(a):
    """Largest entry magnitude."""
    return float(np.abs(a).max())


def max_asym(a):
    """Largest |a[i, j] - a[j, i]|; 0.0 for an exactly symmetric matrix."""
    return float(np.abs(a - a.T).max())


def sum_product(a, b):
    """Entrywise sum of a * b, i.e. tr(a @ b.T)."""
    return float(np.vdot(a, b))


def fro_norm(a):
    return float(np.sqrt(np.vdot(a, a)))


def permuted_sum_product(kc, lc, perm):
    """sum_product(kc, lc[perm][:, perm]) without forming the copy twice."""
    return float(np.vdot(kc, lc[perm][:, perm]))
