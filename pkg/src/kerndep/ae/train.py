"""The training loop: Adam over minibatches, with a per-epoch dependence
trace between the input, latent, and output layers."""

from __future__ import annotations

import logging
import time

import numpy as np

from ..errors import AllPointsIdentical, DegenerateInput, DimensionMismatch, SingularSystem
from ..hsic import hsic_normalized
from ..kernels import KernelSpec, gram
from ..smi import fit_density_ratio, smi_estimate
from ..trace import EpochRecord, TrainingTrace
from .adam import AdamState, adam_step
from .config import AeConfig
from .data import SyntheticSequenceDataset, pair_indices
from .model import backward, forward, init_model

log = logging.getLogger(__name__)

VAL_FRACTION = 0.2

# Sub-stream tags on the config seed; SEED_INIT = 101 lives in model.py.
SEED_SPLIT = 102
SEED_SUBSAMPLE = 103
SEED_EPOCH_BASE = 10_000


def _split_sequences(dataset, seed):
    """Deterministic sequence-level split into train and validation ids."""
    n_seq = dataset.num_sequences
    if n_seq < 2:
        raise ValueError("need at least 2 sequences to hold out validation data")
    order = np.random.default_rng((seed, SEED_SPLIT)).permutation(n_seq)
    n_val = max(1, round(VAL_FRACTION * n_seq))
    if n_val >= n_seq:
        n_val = n_seq - 1
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def _epoch_dependence(x, z, y_hat, kernel_input, kernel_latent, smi_lambda):
    """(hsic_xz, hsic_zy, smi_xz) for one epoch, None where degenerate.

    Bandwidths are re-resolved every epoch: the latent geometry moves
    during training, so a frozen early-epoch bandwidth would misread the
    later epochs.
    """
    try:
        gx = gram(x, kernel_input)
        gz = gram(z, kernel_latent)
        hsic_xz = hsic_normalized(gx, gz).value
    except (DegenerateInput, AllPointsIdentical):
        hsic_xz = None
    try:
        gy = gram(y_hat, kernel_input)
        hsic_zy = hsic_normalized(gram(z, kernel_latent), gy).value
    except (DegenerateInput, AllPointsIdentical):
        hsic_zy = None
    smi_xz = None
    if smi_lambda is not None:
        try:
            model = fit_density_ratio(x, z, kernel_input, kernel_latent, smi_lambda)
            smi_xz = smi_estimate(x, z, model).value
        except (DegenerateInput, AllPointsIdentical, SingularSystem):
            smi_xz = None
    return hsic_xz, hsic_zy, smi_xz


def trace_fingerprint(config: AeConfig) -> str:
    """Short human-readable run id used in trace headers and plot legends."""
    parts = [config.task, f"seed={config.seed}",
             f"dims={config.input_dim}-{'-'.join(map(str, config.hidden_dims))}"
             f"-{config.latent_dim}"]
    if config.horizon is not None:
        parts.insert(1, f"h={config.horizon}")
    return " ".join(parts)


def train(config: AeConfig, dataset: SyntheticSequenceDataset,
          kernel_input: KernelSpec | None = None,
          kernel_latent: KernelSpec | None = None,
          smi_lambda: float | None = None):
    """Train an autoencoder on dataset per config; returns (model, trace).

    The split is by sequence, 80/20, so validation frames come from
    held-out sequences. After each epoch the loop measures normalized
    HSIC between a fixed validation subsample of inputs and their latent
    codes (hsic_xz) and between those codes and the model outputs
    (hsic_zy); pass smi_lambda to also record an SMI reading of the
    input-latent pair. Degenerate epochs are recorded as None and
    training continues.

    Runs are bitwise deterministic in (config, dataset): every random
    choice draws from a generator seeded by (config.seed, purpose tag),
    and recorded wall_ms is pinned to 0 (real timings go to the logger).
    """
    if kernel_input is None:
        kernel_input = KernelSpec("rbf")
    if kernel_latent is None:
        kernel_latent = KernelSpec("rbf")
    if config.beta != 0.0:
        raise ValueError("beta must be 0: no bottleneck penalty is implemented")
    if dataset.frames.shape[1] != config.input_dim:
        raise DimensionMismatch(
            f"dataset frames have width {dataset.frames.shape[1]} but the "
            f"config says input_dim={config.input_dim}"
        )

    train_ids, val_ids = _split_sequences(dataset, config.seed)
    tr_in, tr_tg = pair_indices(dataset, config.task, config.horizon, train_ids)
    va_in, va_tg = pair_indices(dataset, config.task, config.horizon, val_ids)
    frames = dataset.frames
    val_x, val_t = frames[va_in], frames[va_tg]

    sub_size = min(config.hsic_subsample, len(va_in))
    sub = np.sort(np.random.default_rng((config.seed, SEED_SUBSAMPLE))
                  .choice(len(va_in), size=sub_size, replace=False))
    probe_x, probe_t = val_x[sub], val_t[sub]

    model = init_model(config)
    params = model.parameters()
    state = AdamState.for_params(params)
    trace = TrainingTrace(trace_fingerprint(config))

    n_train = len(tr_in)
    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = np.random.default_rng(
            (config.seed, SEED_EPOCH_BASE + epoch)).permutation(n_train)
        total = 0.0
        for lo in range(0, n_train, config.batch_size):
            batch = order[lo:lo + config.batch_size]
            grads, loss = backward(model, frames[tr_in[batch]], frames[tr_tg[batch]])
            adam_step(params, grads, state, config.learning_rate,
                      config.adam_beta1, config.adam_beta2, config.adam_eps)
            total += loss * len(batch)
        train_loss = total / n_train

        _, _, val_loss = forward(model, val_x, val_t)
        z, y_hat, _ = forward(model, probe_x, probe_t)
        hsic_xz, hsic_zy, smi_xz = _epoch_dependence(
            probe_x, z, y_hat, kernel_input, kernel_latent, smi_lambda)
        trace.append(EpochRecord(epoch, train_loss, val_loss,
                                 hsic_xz, hsic_zy, smi_xz, wall_ms=0))
        log.info("epoch %d: train %.6f val %.6f hsic_xz %s hsic_zy %s (%.0f ms)",
                 epoch, train_loss, val_loss, hsic_xz, hsic_zy,
                 (time.perf_counter() - started) * 1000.0)
    return model, trace
