"""Per-epoch training traces and their JSONL persistence.

A trace file is one header line followed by one record per line:

    {"best_val_epoch": ..., "fingerprint": ..., "schema": "kerndep-trace-v1"}
    {"epoch": 1, "hsic_xz": ..., "hsic_zy": ..., "smi_xz": ..., ...}

Dependence values that could not be computed for an epoch (a constant
latent, say) are stored as the string "degenerate" and surface as None in
Python. smi_xz is null when SMI tracing was not requested. Keys are
sorted and floats use repr round-tripping, so equal traces serialize to
identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import EmptyTrace, NonMonotonicEpoch, SchemaMismatch

TRACE_SCHEMA = "kerndep-trace-v1"
DEGENERATE = "degenerate"

_HEADER_KEYS = {"schema", "fingerprint", "best_val_epoch"}
_RECORD_KEYS = {"epoch", "train_loss", "val_loss", "hsic_xz", "hsic_zy",
                "smi_xz", "wall_ms"}


@dataclass(frozen=True)
class EpochRecord:
    """Losses and layer-dependence measurements for one epoch.

    hsic_xz is dependence between input and latent, hsic_zy between latent
    and output; None means the epoch was flagged degenerate. smi_xz is an
    optional SMI reading of the input-latent pair. wall_ms is informative
    only and is pinned to 0 by the deterministic trainer.
    """

    epoch: int
    train_loss: float
    val_loss: float
    hsic_xz: float | None
    hsic_zy: float | None
    smi_xz: float | None = None
    wall_ms: int = 0

    def __post_init__(self):
        if self.epoch < 1:
            raise ValueError(f"epoch must be >= 1, got {self.epoch}")
        for name in ("train_loss", "val_loss"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("hsic_xz", "hsic_zy"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.smi_xz is not None and not math.isfinite(self.smi_xz):
            raise ValueError("smi_xz must be finite when present")
        if self.wall_ms < 0:
            raise ValueError("wall_ms must be >= 0")

    def to_json(self) -> dict:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "hsic_xz": DEGENERATE if self.hsic_xz is None else self.hsic_xz,
            "hsic_zy": DEGENERATE if self.hsic_zy is None else self.hsic_zy,
            "smi_xz": self.smi_xz,
            "wall_ms": self.wall_ms,
        }


def _dependence_from_json(value, name):
    if value == DEGENERATE:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise SchemaMismatch(f"{name} must be a number or {DEGENERATE!r}, got {value!r}")


class TrainingTrace:
    """An append-only sequence of EpochRecords with a run fingerprint.

    Records must arrive with consecutive epoch numbers starting at 1.
    best_val_epoch tracks the earliest epoch achieving the minimum
    validation loss seen so far.
    """

    def __init__(self, fingerprint: str, records=()):
        self.fingerprint = str(fingerprint)
        self._records = []
        self._best = None
        for record in records:
            self.append(record)

    @property
    def records(self) -> tuple:
        return tuple(self._records)

    @property
    def best_val_epoch(self) -> int | None:
        return self._best

    def __len__(self) -> int:
        return len(self._records)

    def __eq__(self, other):
        if not isinstance(other, TrainingTrace):
            return NotImplemented
        return (self.fingerprint == other.fingerprint
                and self._records == other._records)

    def append(self, record: EpochRecord) -> None:
        expected = len(self._records) + 1
        if record.epoch != expected:
            raise NonMonotonicEpoch(
                f"expected epoch {expected}, got {record.epoch}"
            )
        self._records.append(record)
        if self._best is None or record.val_loss < self._records[self._best - 1].val_loss:
            self._best = record.epoch

    def series(self, name: str) -> list:
        """Values of one record field across epochs (None entries kept)."""
        return [getattr(r, name) for r in self._records]


def export_jsonl(trace: TrainingTrace, path) -> None:
    """Write a trace file; output bytes depend only on the trace contents."""
    if not trace.records:
        raise EmptyTrace("cannot export a trace with no records")
    header = {
        "schema": TRACE_SCHEMA,
        "fingerprint": trace.fingerprint,
        "best_val_epoch": trace.best_val_epoch,
    }
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for record in trace.records:
            fh.write(json.dumps(record.to_json(), sort_keys=True) + "\n")


def import_jsonl(path) -> TrainingTrace:
    """Read a trace file back; inverse of export_jsonl for valid files."""
    with open(path) as fh:
        lines = [line for line in fh.read().split("\n") if line.strip()]
    if not lines:
        raise SchemaMismatch(f"{path}: missing header line")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("schema") != TRACE_SCHEMA:
        raise SchemaMismatch(f"{path}: expected schema {TRACE_SCHEMA!r}")
    if set(header) != _HEADER_KEYS:
        raise SchemaMismatch(
            f"{path}: header fields {sorted(set(header) ^ _HEADER_KEYS)} do not match"
        )
    trace = TrainingTrace(header["fingerprint"])
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: line {lineno}: {exc}") from exc
        if not isinstance(obj, dict) or set(obj) != _RECORD_KEYS:
            raise SchemaMismatch(
                f"{path}: line {lineno}: record fields do not match schema"
            )
        try:
            record = EpochRecord(
                epoch=obj["epoch"],
                train_loss=float(obj["train_loss"]),
                val_loss=float(obj["val_loss"]),
                hsic_xz=_dependence_from_json(obj["hsic_xz"], "hsic_xz"),
                hsic_zy=_dependence_from_json(obj["hsic_zy"], "hsic_zy"),
                smi_xz=None if obj["smi_xz"] is None else float(obj["smi_xz"]),
                wall_ms=obj["wall_ms"],
            )
        except (TypeError, ValueError) as exc:
            raise SchemaMismatch(f"{path}: line {lineno}: {exc}") from exc
        trace.append(record)
    if not trace.records:
        raise EmptyTrace(f"{path}: no records after the header")
    if header["best_val_epoch"] != trace.best_val_epoch:
        raise SchemaMismatch(
            f"{path}: header best_val_epoch {header['best_val_epoch']!r} "
            f"disagrees with records ({trace.best_val_epoch!r})"
        )
    return trace
