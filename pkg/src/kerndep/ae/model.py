"""A from-scratch numpy MLP autoencoder: sigmoid layers, MSE loss,
manual backprop, and a deterministic binary checkpoint format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..errors import DimensionMismatch, SchemaMismatch
from .config import AeConfig

# Sub-stream tag for parameter initialization; the train loop reserves
# other tags on the same config seed.
SEED_INIT = 101

CHECKPOINT_MAGIC = b"kerndep-checkpoint-v1\n"


@dataclass
class AeModel:
    """Weights and biases of the full encoder/decoder stack.

    weights[l] has shape (fan_in, fan_out); activations are row vectors,
    so a layer computes sigmoid(a @ W + b). The first encoder_layers
    pairs map input to the latent code, the rest map it back out.
    """

    weights: list
    biases: list
    encoder_layers: int

    def __post_init__(self):
        if not 0 < self.encoder_layers < len(self.weights):
            raise ValueError("encoder_layers must split the stack in two")
        if len(self.weights) != len(self.biases):
            raise ValueError("need one bias vector per weight matrix")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ValueError("layer shapes are inconsistent")
        for prev, nxt in zip(self.weights, self.weights[1:]):
            if prev.shape[1] != nxt.shape[0]:
                raise ValueError("consecutive layers do not chain")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def latent_dim(self) -> int:
        return self.weights[self.encoder_layers - 1].shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights[-1].shape[1]

    def parameters(self) -> list:
        """Flat list of parameter arrays, weights and biases interleaved.
        The arrays are the live ones, so in-place updates train the model."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


def layer_dims(config: AeConfig) -> list:
    """Mirror-symmetric layer widths: input, hidden..., latent, ...hidden
    reversed, input."""
    return [config.input_dim, *config.hidden_dims, config.latent_dim,
            *reversed(config.hidden_dims), config.input_dim]


def init_model(config: AeConfig) -> AeModel:
    """Fan-in scaled uniform init, deterministic in config.seed.

    Each weight is drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)); biases
    start at zero.
    """
    rng = np.random.default_rng((config.seed, SEED_INIT))
    dims = layer_dims(config)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return AeModel(weights, biases, len(config.hidden_dims) + 1)


def _as_batch(x, width, what):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != width:
        raise DimensionMismatch(
            f"{what} must be (batch, {width}), got shape {arr.shape}"
        )
    return arr


def _activations(model: AeModel, x):
    acts = [x]
    for w, b in zip(model.weights, model.biases):
        acts.append(expit(acts[-1] @ w + b))
    return acts


def forward(model: AeModel, x, target=None):
    """Run the full stack; returns (latent, output, loss).

    target defaults to x (plain reconstruction). Loss is the mean squared
    error over every entry of the batch.
    """
    x = _as_batch(x, model.input_dim, "input")
    target = x if target is None else _as_batch(target, model.output_dim, "target")
    if target.shape[0] != x.shape[0]:
        raise DimensionMismatch(
            f"batch sizes differ: {x.shape[0]} inputs, {target.shape[0]} targets"
        )
    acts = _activations(model, x)
    out = acts[-1]
    loss = float(np.mean((out - target) ** 2))
    return acts[model.encoder_layers], out, loss


def encode(model: AeModel, x):
    """Latent codes for a batch; rows are processed independently."""
    x = _as_batch(x, model.input_dim, "input")
    a = x
    for w, b in zip(model.weights[: model.encoder_layers],
                    model.biases[: model.encoder_layers]):
        a = expit(a @ w + b)
    return a


def backward(model: AeModel, x, target=None):
    """Gradients of the MSE loss for every parameter, via backprop.

    Returns (grads, loss) where grads lines up with model.parameters().
    The 2/N factor (N = batch * output_dim entries) comes from the mean.
    """
    x = _as_batch(x, model.input_dim, "input")
    target = x if target is None else _as_batch(target, model.output_dim, "target")
    acts = _activations(model, x)
    out = acts[-1]
    loss = float(np.mean((out - target) ** 2))
    delta = (2.0 / out.size) * (out - target) * out * (1.0 - out)
    grads = [None] * (2 * len(model.weights))
    for layer in range(len(model.weights) - 1, -1, -1):
        grads[2 * layer] = acts[layer].T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer:
            a = acts[layer]
            delta = (delta @ model.weights[layer].T) * a * (1.0 - a)
    return grads, loss


def save_checkpoint(path, model: AeModel, extra: dict | None = None) -> None:
    """Write a deterministic binary checkpoint: a magic line, a JSON header
    (shapes, encoder split, caller extras), then raw little-endian float64
    parameter blocks in stack order. Byte-identical for equal models."""
    header = {
        "layer_shapes": [[int(w.shape[0]), int(w.shape[1])] for w in model.weights],
        "encoder_layers": model.encoder_layers,
        "dtype": "<f8",
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(len(blob).to_bytes(8, "little"))
        fh.write(blob)
        for w, b in zip(model.weights, model.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path):
    """Read a checkpoint written by save_checkpoint; returns (model, extra)."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise SchemaMismatch(f"{path}: not a model checkpoint")
        length = int.from_bytes(fh.read(8), "little")
        try:
            header = json.loads(fh.read(length))
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: corrupt header: {exc}") from exc
        if set(header) != {"layer_shapes", "encoder_layers", "dtype", "extra"}:
            raise SchemaMismatch(f"{path}: unexpected header fields")
        if header["dtype"] != "<f8":
            raise SchemaMismatch(f"{path}: unsupported dtype {header['dtype']!r}")
        weights, biases = [], []
        for fan_in, fan_out in header["layer_shapes"]:
            w = np.frombuffer(fh.read(8 * fan_in * fan_out), dtype="<f8")
            b = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
            if w.size != fan_in * fan_out or b.size != fan_out:
                raise SchemaMismatch(f"{path}: truncated parameter block")
            weights.append(w.reshape(fan_in, fan_out).copy())
            biases.append(b.copy())
        if fh.read(1):
            raise SchemaMismatch(f"{path}: trailing bytes after parameters")
    try:
        model = AeModel(weights, biases, int(header["encoder_layers"]))
    except ValueError as exc:
        raise SchemaMismatch(f"{path}: inconsistent shapes: {exc}") from exc
    return model, header["extra"]
