"""Synthetic moving-blob sequences for the autoencoder harness.

Each sequence is one Gaussian blob drifting across a side x side frame at
constant velocity. The class label picks the drift direction (class c
moves at angle 2 pi c / num_classes); speed and start point are drawn per
sequence. Frames are rendered with a short motion streak, a trail of
fading ghost blobs behind the head, so a single frame already carries the
motion direction. Without the streak a lone symmetric blob would make the
class unrecoverable from individual frames and latent probing would be
chance-level by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import HorizonOutOfRange, SchemaMismatch
from ..samples import load_samples_csv, save_samples_csv
from .config import TASK_PREDICT, TASK_RECONSTRUCT, TASKS

DATASET_SCHEMA = "kerndep-dataset-v1"
DATASET_FILE = "dataset.json"
FRAMES_FILE = "frames.csv"

# Streak geometry: ghost j sits 0.5 * rho * j behind the head along the
# motion direction, with these weights (normalized so pixel values stay
# inside [0, 1] without clipping).
_GHOST_WEIGHTS = np.array([1.0, 0.55, 0.3, 0.15]) / 2.0
_GHOST_SPACING = 0.5
_MARGIN_RADII = 2.2

MIN_SIDE = 8


@dataclass(frozen=True, eq=False)
class SyntheticSequenceDataset:
    """Flattened frames plus per-frame labels and sequence boundaries."""

    frames: np.ndarray
    labels: np.ndarray
    boundaries: tuple[tuple[int, int], ...]
    side: int
    num_classes: int
    generator: dict | None = field(default=None)

    def __eq__(self, other):
        if not isinstance(other, SyntheticSequenceDataset):
            return NotImplemented
        # generator is provenance metadata, not content
        return (self.side == other.side
                and self.num_classes == other.num_classes
                and self.boundaries == other.boundaries
                and np.array_equal(self.frames, other.frames)
                and np.array_equal(self.labels, other.labels))

    def __post_init__(self):
        frames = np.ascontiguousarray(self.frames, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        bounds = tuple((int(s), int(e)) for s, e in self.boundaries)
        if frames.ndim != 2:
            raise ValueError(f"frames must be 2-D, got shape {frames.shape}")
        if frames.shape[1] != self.side * self.side:
            raise ValueError(
                f"frame width {frames.shape[1]} != side^2 = {self.side * self.side}"
            )
        if frames.size and (frames.min() < 0.0 or frames.max() > 1.0):
            raise ValueError("pixel values must lie in [0, 1]")
        if labels.shape != (frames.shape[0],):
            raise ValueError("need exactly one label per frame")
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValueError("labels must lie in [0, num_classes)")
        cursor = 0
        for start, end in bounds:
            if start != cursor or end <= start:
                raise ValueError("boundaries must partition the frames in order")
            cursor = end
        if cursor != frames.shape[0]:
            raise ValueError("boundaries do not cover all frames")
        for start, end in bounds:
            if np.unique(labels[start:end]).size != 1:
                raise ValueError("every frame in a sequence must share its label")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "boundaries", bounds)

    @property
    def num_sequences(self) -> int:
        return len(self.boundaries)

    def sequence_labels(self) -> np.ndarray:
        return np.array([self.labels[s] for s, _ in self.boundaries], dtype=np.int64)


def generate_synthetic_sequences(num_sequences: int, frames_per_sequence: int,
                                 side: int, num_classes: int,
                                 seed: int = 0) -> SyntheticSequenceDataset:
    """Render a dataset of drifting-blob sequences, deterministically in seed.

    Class labels cycle over the sequences, so every class appears as long
    as num_sequences >= num_classes. Speeds are sized so the whole streak
    stays inside the frame for the entire sequence.
    """
    if num_sequences < 1 or frames_per_sequence < 2:
        raise ValueError("need at least 1 sequence of at least 2 frames")
    if side < MIN_SIDE:
        raise ValueError(f"side must be >= {MIN_SIDE}, got {side}")
    if num_classes < 1:
        raise ValueError("num_classes must be positive")

    rng = np.random.default_rng((seed, 0))
    rho = side / 10.0
    margin = _MARGIN_RADII * rho
    span = (side - 1) - 2.0 * margin
    tail = _GHOST_SPACING * rho * (len(_GHOST_WEIGHTS) - 1)
    cols = np.arange(side, dtype=np.float64)[None, :]
    rows = np.arange(side, dtype=np.float64)[:, None]

    frames = np.empty((num_sequences * frames_per_sequence, side * side))
    labels = np.empty(num_sequences * frames_per_sequence, dtype=np.int64)
    bounds = []
    out = 0
    for s in range(num_sequences):
        cls = s % num_classes
        angle = 2.0 * math.pi * cls / num_classes
        ux, uy = math.cos(angle), math.sin(angle)
        big = max(abs(ux), abs(uy))
        cap = (span / big - tail) / (frames_per_sequence - 1)
        if cap <= 0:
            raise ValueError(f"side {side} is too small for {frames_per_sequence} frames")
        speed = cap * rng.uniform(0.55, 0.95)

        # Feasible start box per axis given every head and ghost position.
        start = np.empty(2)
        for axis, u in enumerate((ux, uy)):
            offsets = (speed * (frames_per_sequence - 1) * u, -tail * u)
            low = margin - min(0.0, *offsets)
            high = (side - 1) - margin - max(0.0, *offsets)
            start[axis] = rng.uniform(low, high)

        for t in range(frames_per_sequence):
            cx = start[0] + t * speed * ux
            cy = start[1] + t * speed * uy
            img = np.zeros((side, side))
            for j, w in enumerate(_GHOST_WEIGHTS):
                gx = cx - j * _GHOST_SPACING * rho * ux
                gy = cy - j * _GHOST_SPACING * rho * uy
                img += w * np.exp(-((cols - gx) ** 2 + (rows - gy) ** 2)
                                  / (2.0 * rho * rho))
            frames[out] = img.ravel()
            labels[out] = cls
            out += 1
        bounds.append((s * frames_per_sequence, (s + 1) * frames_per_sequence))

    generator = {
        "num_sequences": num_sequences,
        "frames_per_sequence": frames_per_sequence,
        "side": side,
        "num_classes": num_classes,
        "seed": int(seed),
    }
    return SyntheticSequenceDataset(frames, labels, tuple(bounds), side,
                                    num_classes, generator)


def pair_indices(dataset: SyntheticSequenceDataset, task: str,
                 horizon: int | None = None, sequence_ids=None):
    """Index arrays (inputs, targets) into dataset.frames for a task.

    Reconstruction pairs every frame with itself. Prediction pairs frame i
    with frame i + horizon of the same sequence; pairs never cross a
    sequence boundary. Raises HorizonOutOfRange when the selection yields
    no pairs at all.
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    if sequence_ids is None:
        sequence_ids = range(dataset.num_sequences)
    sequence_ids = list(sequence_ids)
    if not sequence_ids:
        raise ValueError("no sequences selected")
    if task == TASK_RECONSTRUCT:
        idx = np.concatenate([np.arange(*dataset.boundaries[s]) for s in sequence_ids])
        return idx, idx
    if horizon is None or horizon < 1:
        raise ValueError("prediction needs a horizon >= 1")
    ins = []
    for s in sequence_ids:
        start, end = dataset.boundaries[s]
        if end - start > horizon:
            ins.append(np.arange(start, end - horizon))
    if not ins:
        raise HorizonOutOfRange(
            f"horizon {horizon} leaves no (input, target) pair in the selection"
        )
    in_idx = np.concatenate(ins)
    return in_idx, in_idx + horizon


def save_dataset(dataset: SyntheticSequenceDataset, dirpath) -> None:
    """Write frames.csv plus a dataset.json sidecar into dirpath."""
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    save_samples_csv(dirpath / FRAMES_FILE, dataset.frames)
    sidecar = {
        "schema": DATASET_SCHEMA,
        "side": dataset.side,
        "num_classes": dataset.num_classes,
        "labels": [int(v) for v in dataset.labels],
        "boundaries": [[s, e] for s, e in dataset.boundaries],
        "generator": dataset.generator,
    }
    with open(dirpath / DATASET_FILE, "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_dataset(dirpath) -> SyntheticSequenceDataset:
    """Read a dataset directory written by save_dataset."""
    dirpath = Path(dirpath)
    sidecar_path = dirpath / DATASET_FILE
    try:
        with open(sidecar_path) as fh:
            sidecar = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{sidecar_path}: not valid JSON: {exc}") from exc
    if not isinstance(sidecar, dict) or sidecar.get("schema") != DATASET_SCHEMA:
        raise SchemaMismatch(f"{sidecar_path}: expected schema {DATASET_SCHEMA!r}")
    required = {"schema", "side", "num_classes", "labels", "boundaries", "generator"}
    if set(sidecar) != required:
        raise SchemaMismatch(
            f"{sidecar_path}: fields {sorted(set(sidecar) ^ required)} do not match"
        )
    frames = load_samples_csv(dirpath / FRAMES_FILE)
    try:
        return SyntheticSequenceDataset(
            frames,
            np.asarray(sidecar["labels"], dtype=np.int64),
            tuple((int(s), int(e)) for s, e in sidecar["boundaries"]),
            int(sidecar["side"]),
            int(sidecar["num_classes"]),
            sidecar["generator"],
        )
    except (TypeError, ValueError) as exc:
        raise SchemaMismatch(f"{dirpath}: inconsistent dataset: {exc}") from exc
