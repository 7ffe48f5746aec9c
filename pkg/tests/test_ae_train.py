import numpy as np
import pytest

from kerndep.ae import AeConfig, SyntheticSequenceDataset, train
from kerndep.ae.train import _split_sequences, trace_fingerprint
from kerndep.errors import DimensionMismatch, HorizonOutOfRange
from kerndep.kernels import KernelSpec


def small_config(**overrides):
    params = dict(input_dim=64, hidden_dims=(16,), latent_dim=4,
                  epochs=3, batch_size=32, learning_rate=5e-3,
                  hsic_subsample=16, seed=2)
    params.update(overrides)
    return AeConfig(**params)


def test_training_is_bitwise_deterministic(small_dataset):
    config = small_config()
    model_a, trace_a = train(config, small_dataset)
    model_b, trace_b = train(config, small_dataset)
    for pa, pb in zip(model_a.parameters(), model_b.parameters()):
        assert pa.tobytes() == pb.tobytes()
    assert trace_a == trace_b


def test_loss_decreases(small_dataset):
    _, trace = train(small_config(epochs=5), small_dataset)
    losses = trace.series("train_loss")
    assert losses[-1] < losses[0]


def test_trace_contents(small_dataset):
    config = small_config()
    _, trace = train(config, small_dataset)
    assert len(trace) == config.epochs
    assert trace.fingerprint == trace_fingerprint(config)
    assert [r.epoch for r in trace.records] == [1, 2, 3]
    for r in trace.records:
        assert np.isfinite(r.train_loss) and np.isfinite(r.val_loss)
        for v in (r.hsic_xz, r.hsic_zy):
            assert v is None or 0.0 <= v <= 1.0
        assert r.smi_xz is None  # not requested
        assert r.wall_ms == 0


def test_smi_tracing_when_requested(small_dataset):
    _, trace = train(small_config(epochs=2), small_dataset, smi_lambda=0.1)
    values = trace.series("smi_xz")
    assert any(v is not None for v in values)
    assert all(v is None or np.isfinite(v) for v in values)


def test_predict_task_trains(small_dataset):
    config = small_config(task="predict", horizon=2, epochs=2)
    _, trace = train(config, small_dataset)
    assert len(trace) == 2
    assert trace.fingerprint.startswith("predict h=2 ")


def test_horizon_beyond_sequence_length(small_dataset):
    config = small_config(task="predict", horizon=10, epochs=1)
    with pytest.raises(HorizonOutOfRange):
        train(config, small_dataset)


def test_beta_is_rejected(small_dataset):
    config = small_config(beta=0.5)
    with pytest.raises(ValueError, match="beta"):
        train(config, small_dataset)


def test_width_mismatch(small_dataset):
    config = AeConfig(input_dim=49, hidden_dims=(8,), latent_dim=4, epochs=1)
    with pytest.raises(DimensionMismatch):
        train(config, small_dataset)


def test_constant_frames_record_degenerate_epochs():
    frames = np.full((40, 64), 0.5)
    labels = np.repeat(np.arange(4) % 2, 10)
    bounds = tuple((10 * s, 10 * s + 10) for s in range(4))
    flat = SyntheticSequenceDataset(frames, labels, bounds, side=8, num_classes=2)
    config = small_config(epochs=2, hsic_subsample=8)
    _, trace = train(config, flat, kernel_input=KernelSpec("rbf", 1.0))
    assert all(r.hsic_xz is None for r in trace.records)
    assert all(np.isfinite(r.train_loss) for r in trace.records)


def test_fingerprint_format():
    config = AeConfig(input_dim=256, hidden_dims=(32,), latent_dim=8, seed=2)
    assert trace_fingerprint(config) == "reconstruct seed=2 dims=256-32-8"


class TestSplitSequences:
    def test_partition_and_determinism(self, small_dataset):
        train_ids, val_ids = _split_sequences(small_dataset, seed=0)
        again = _split_sequences(small_dataset, seed=0)
        assert np.array_equal(train_ids, again[0])
        assert np.array_equal(val_ids, again[1])
        combined = np.sort(np.concatenate([train_ids, val_ids]))
        assert np.array_equal(combined, np.arange(12))
        assert len(val_ids) == 2  # round(0.2 * 12)

    def test_needs_two_sequences(self):
        frames = np.full((4, 64), 0.5)
        ds = SyntheticSequenceDataset(frames, np.zeros(4, dtype=np.int64),
                                      ((0, 4),), side=8, num_classes=1)
        with pytest.raises(ValueError, match="2 sequences"):
            _split_sequences(ds, seed=0)
