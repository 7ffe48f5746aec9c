"""Desk-scale autoencoder harness: synthetic moving-blob sequences, a
from-scratch numpy MLP, Adam, a training loop that traces per-epoch
dependence between layers, and a latent-space probe classifier."""

from .adam import AdamState, adam_step
from .config import TASK_PREDICT, TASK_RECONSTRUCT, AeConfig
from .data import (
    SyntheticSequenceDataset,
    generate_synthetic_sequences,
    load_dataset,
    pair_indices,
    save_dataset,
)
from .model import (
    AeModel,
    backward,
    encode,
    forward,
    init_model,
    layer_dims,
    load_checkpoint,
    save_checkpoint,
)
from .probe import ProbeConfig, ProbeResult, probe_classifier
from .train import train

__all__ = [
    "AdamState",
    "AeConfig",
    "AeModel",
    "ProbeConfig",
    "ProbeResult",
    "SyntheticSequenceDataset",
    "TASK_PREDICT",
    "TASK_RECONSTRUCT",
    "adam_step",
    "backward",
    "encode",
    "forward",
    "generate_synthetic_sequences",
    "init_model",
    "layer_dims",
    "load_checkpoint",
    "load_dataset",
    "pair_indices",
    "probe_classifier",
    "save_checkpoint",
    "save_dataset",
    "train",
]
