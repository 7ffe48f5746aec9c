"""A small MLP probe that measures how linearly-ish decodable the class
label is from latent codes. Probe accuracy is the evidence that a latent
space kept (or discarded) class information; compare against a
shuffled-label null to judge significance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ..errors import DegenerateLabels, DimensionMismatch
from .adam import AdamState, adam_step

SEED_PROBE_INIT = 201
SEED_PROBE_SPLIT = 202
SEED_PROBE_EPOCH = 20_000


@dataclass(frozen=True)
class ProbeConfig:
    hidden_width: int = 64
    epochs: int = 150
    learning_rate: float = 1e-2
    batch_size: int = 64
    test_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.hidden_width < 1 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("hidden_width, epochs, and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class ProbeResult:
    accuracy: float
    num_classes: int
    train_size: int
    test_size: int

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "num_classes": self.num_classes,
            "train_size": self.train_size,
            "test_size": self.test_size,
        }


def _stratified_split(labels, classes, test_fraction, rng):
    """Per-class shuffled split; every class lands in both halves."""
    train_idx, test_idx = [], []
    for cls in classes:
        members = np.flatnonzero(labels == cls)
        if members.size < 2:
            raise DegenerateLabels(
                f"class {cls} has {members.size} sample(s); cannot split"
            )
        members = members[rng.permutation(members.size)]
        n_test = int(round(test_fraction * members.size))
        n_test = min(max(n_test, 1), members.size - 1)
        test_idx.append(members[:n_test])
        train_idx.append(members[n_test:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


def _softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def probe_classifier(z, labels, config: ProbeConfig | None = None) -> ProbeResult:
    """Fit a one-hidden-layer softmax classifier on latent codes.

    Stratified train/test split, Adam on cross-entropy, deterministic in
    config.seed. Returns held-out accuracy. Raises DegenerateLabels when
    fewer than two classes are present or any class is too small to
    appear on both sides of the split.
    """
    if config is None:
        config = ProbeConfig()
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 2:
        raise DimensionMismatch(f"latent codes must be (n >= 2, d), got {z.shape}")
    labels = np.asarray(labels)
    if labels.shape != (z.shape[0],):
        raise DimensionMismatch("need exactly one label per latent code")
    labels = labels.astype(np.int64)
    classes = np.unique(labels)
    if classes.size < 2:
        raise DegenerateLabels(f"need at least 2 classes, got {classes.size}")

    split_rng = np.random.default_rng((config.seed, SEED_PROBE_SPLIT))
    train_idx, test_idx = _stratified_split(labels, classes, config.test_fraction,
                                            split_rng)
    targets = np.searchsorted(classes, labels)
    z_train, y_train = z[train_idx], targets[train_idx]
    z_test, y_test = z[test_idx], targets[test_idx]

    d, width, k = z.shape[1], config.hidden_width, classes.size
    init_rng = np.random.default_rng((config.seed, SEED_PROBE_INIT))
    w1 = init_rng.uniform(-1, 1, size=(d, width)) / np.sqrt(d)
    b1 = np.zeros(width)
    w2 = init_rng.uniform(-1, 1, size=(width, k)) / np.sqrt(width)
    b2 = np.zeros(k)
    params = [w1, b1, w2, b2]
    state = AdamState.for_params(params)

    onehot = np.eye(k)[y_train]
    n = len(y_train)
    for epoch in range(config.epochs):
        order = np.random.default_rng(
            (config.seed, SEED_PROBE_EPOCH + epoch)).permutation(n)
        for lo in range(0, n, config.batch_size):
            batch = order[lo:lo + config.batch_size]
            xb, tb = z_train[batch], onehot[batch]
            hidden = expit(xb @ w1 + b1)
            probs = _softmax(hidden @ w2 + b2)
            delta2 = (probs - tb) / len(batch)
            delta1 = (delta2 @ w2.T) * hidden * (1.0 - hidden)
            grads = [xb.T @ delta1, delta1.sum(axis=0),
                     hidden.T @ delta2, delta2.sum(axis=0)]
            adam_step(params, grads, state, config.learning_rate)

    hidden = expit(z_test @ w1 + b1)
    predicted = np.argmax(hidden @ w2 + b2, axis=1)
    accuracy = float(np.mean(predicted == y_test))
    return ProbeResult(accuracy, int(classes.size), len(train_idx), len(test_idx))
