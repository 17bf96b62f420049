"""Tests for checkpoint files."""

import json
import zipfile
from pathlib import Path

import numpy as np
import pytest

from graph_of_records.errors import CheckpointError
from graph_of_records.neuralnet.adam import AdamState, adam_step
from graph_of_records.neuralnet.checkpoint import (
    Checkpoint,
    checkpoint_to_bytes,
    load_checkpoint,
    model_fingerprint,
    save_checkpoint,
)
from graph_of_records.neuralnet.gat import GatConfig, GatModel, initialize_model


def _trained_checkpoint() -> Checkpoint:
    model = initialize_model(GatConfig(in_dim=4, heads=2, hidden_per_head=2, out_dim=4), seed=3)
    adam = AdamState.for_model(model)
    adam_step(model, {k: np.full_like(v, 0.5) for k, v in model.params.items()}, adam, lr=0.01)
    rng = np.random.default_rng(9)
    rng.random()
    return Checkpoint(
        model=model,
        adam=adam,
        epoch=2,
        rng_state=rng.bit_generator.state,
        config={"epochs": 4, "mode": "self_supervised"},
        config_hash="deadbeef",
        trace=[{"epoch": 0, "step": 0, "loss": 1.5}],
    )


class TestCheckpoint:
    """Tests for save_checkpoint and load_checkpoint."""

    def test_round_trip(self, tmp_path: Path) -> None:
        """Every field survives a save and load."""
        checkpoint = _trained_checkpoint()
        path = tmp_path / "epoch2.ckpt"
        save_checkpoint(checkpoint, path)
        loaded = load_checkpoint(path)

        assert model_fingerprint(loaded.model) == model_fingerprint(checkpoint.model)
        assert loaded.model.config == checkpoint.model.config
        assert loaded.adam.t == 1
        for name in checkpoint.adam.m:
            np.testing.assert_array_equal(loaded.adam.m[name], checkpoint.adam.m[name])
            np.testing.assert_array_equal(loaded.adam.v[name], checkpoint.adam.v[name])
        assert loaded.epoch == 2
        assert loaded.rng_state == checkpoint.rng_state
        assert loaded.config == checkpoint.config
        assert loaded.config_hash == "deadbeef"
        assert loaded.trace == checkpoint.trace

    def test_rng_state_restores_stream(self, tmp_path: Path) -> None:
        """A restored generator continues the saved stream."""
        checkpoint = _trained_checkpoint()
        path = tmp_path / "c.ckpt"
        save_checkpoint(checkpoint, path)
        original = np.random.default_rng()
        original.bit_generator.state = checkpoint.rng_state
        restored = np.random.default_rng()
        restored.bit_generator.state = load_checkpoint(path).rng_state
        assert original.random() == restored.random()

    def test_byte_identical(self, tmp_path: Path) -> None:
        """Equal state gives byte-identical files."""
        a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
        save_checkpoint(_trained_checkpoint(), a)
        save_checkpoint(_trained_checkpoint(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_fingerprint_tracks_parameters(self) -> None:
        """Changing a parameter changes the fingerprint."""
        model = _trained_checkpoint().model
        before = model_fingerprint(model)
        model.params["b1"][0] += 1e-9
        assert model_fingerprint(model) != before

    def test_without_hash(self, tmp_path: Path) -> None:
        """Checkpoints may omit the config hash."""
        checkpoint = _trained_checkpoint()
        checkpoint.config_hash = None
        path = tmp_path / "c.ckpt"
        save_checkpoint(checkpoint, path)
        assert load_checkpoint(path).config_hash is None

    def test_missing_file(self, tmp_path: Path) -> None:
        """A missing checkpoint is a CheckpointError."""
        with pytest.raises(CheckpointError, match="not found"):
            load_checkpoint(tmp_path / "none.ckpt")

    def test_corrupt_file(self, tmp_path: Path) -> None:
        """Garbage bytes are a CheckpointError."""
        path = tmp_path / "bad.ckpt"
        path.write_bytes(b"not a zip archive")
        with pytest.raises(CheckpointError, match="unreadable"):
            load_checkpoint(path)

    def test_unsupported_version(self, tmp_path: Path) -> None:
        """Other format versions are refused."""
        path = tmp_path / "future.ckpt"
        with zipfile.ZipFile(path, "w") as archive:
            archive.writestr("meta.json", json.dumps({"version": 7}))
        with pytest.raises(CheckpointError, match="version 7"):
            load_checkpoint(path)

    def test_fresh_adam_state_is_optional(self) -> None:
        """A checkpoint with empty moments still serializes."""
        model = GatModel(
            GatConfig(in_dim=2, heads=1, hidden_per_head=2, out_dim=2),
            initialize_model(GatConfig(in_dim=2, heads=1, hidden_per_head=2, out_dim=2), 0).params,
        )
        data = checkpoint_to_bytes(Checkpoint(model=model, adam=AdamState()))
        assert data.startswith(b"PK")
