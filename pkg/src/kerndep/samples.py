"""Sample-matrix validation and the headerless CSV interchange format."""

from __future__ import annotations

import csv

import numpy as np

from .errors import InvalidSampleMatrix


def as_samples(x) -> np.ndarray:
    """Validate x as an n x d sample matrix and return it as C-contiguous
    float64. A 1-D array is accepted as a single feature column. Rejects
    anything empty, ragged, non-numeric, non-finite, or with n < 2.
    """
    try:
        arr = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidSampleMatrix(f"not a numeric matrix: {exc}") from exc
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidSampleMatrix(f"expected 2-D samples, got shape {arr.shape}")
    n, d = arr.shape
    if n < 2:
        raise InvalidSampleMatrix(f"need at least 2 samples, got {n}")
    if d < 1:
        raise InvalidSampleMatrix("need at least 1 feature")
    if not np.all(np.isfinite(arr)):
        raise InvalidSampleMatrix("samples contain NaN or infinity")
    return np.ascontiguousarray(arr)


def load_samples_csv(path) -> np.ndarray:
    """Read a headerless CSV of floats, one sample per row."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InvalidSampleMatrix(
                    f"{path}: line {lineno} has {len(row)} fields, expected {width}"
                )
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise InvalidSampleMatrix(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise InvalidSampleMatrix(f"{path}: no data rows")
    return as_samples(rows)


def save_samples_csv(path, x) -> None:
    """Write a sample matrix as headerless CSV with full float precision."""
    arr = as_samples(x)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in arr:
            writer.writerow([repr(float(v)) for v in row])
