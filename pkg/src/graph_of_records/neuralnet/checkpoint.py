"""Checkpoint container: GAT parameters, Adam state and training metadata.

A checkpoint is a zip archive of ``.npy`` members plus ``meta.json``. Member
timestamps are pinned and members are written in a fixed order, so equal
state gives byte-identical files.
"""

import hashlib
import io
import json
import zipfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from graph_of_records.domain.types import FloatArray
from graph_of_records.errors import CheckpointError
from graph_of_records.neuralnet.adam import AdamState
from graph_of_records.neuralnet.gat import PARAMETER_NAMES, GatConfig, GatModel
from graph_of_records.output.artifacts import add_provenance, write_bytes_atomically

CHECKPOINT_FORMAT_VERSION = 1
META_MEMBER = "meta.json"
_FIXED_DATE_TIME = (1980, 1, 1, 0, 0, 0)


@dataclass(slots=True)
class Checkpoint:
    """Everything needed to resume training bit-exactly or to run inference.

    Attributes:
        model: GAT parameters.
        adam: Optimizer moments and step count.
        epoch: Number of completed epochs.
        rng_state: Bit-generator state of the shuffling generator.
        config: JSON-compatible training configuration.
        config_hash: Hash of the configuration the run was started under.
        trace: Per-step loss records accumulated so far.
    """

    model: GatModel
    adam: AdamState
    epoch: int = 0
    rng_state: dict[str, Any] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)
    config_hash: str | None = None
    trace: list[dict[str, Any]] = field(default_factory=list)


def model_fingerprint(model: GatModel) -> str:
    """SHA-256 over parameter names, shapes and float64 bytes."""
    digest = hashlib.sha256()
    for name in PARAMETER_NAMES:
        value = np.ascontiguousarray(model.params[name], dtype=np.float64)
        digest.update(f"{name}:{value.shape}".encode())
        digest.update(value.tobytes())
    return digest.hexdigest()


def _npy_bytes(array: FloatArray) -> bytes:
    buffer = io.BytesIO()
    np.lib.format.write_array(buffer, np.ascontiguousarray(array), allow_pickle=False)
    return buffer.getvalue()


def _write_member(archive: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_FIXED_DATE_TIME)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    archive.writestr(info, data)


def checkpoint_to_bytes(checkpoint: Checkpoint) -> bytes:
    meta: dict[str, Any] = {
        "version": CHECKPOINT_FORMAT_VERSION,
        "gat_config": asdict(checkpoint.model.config),
        "adam": {
            "t": checkpoint.adam.t,
            "beta1": checkpoint.adam.beta1,
            "beta2": checkpoint.adam.beta2,
            "epsilon": checkpoint.adam.epsilon,
        },
        "epoch": checkpoint.epoch,
        "rng_state": checkpoint.rng_state,
        "config": checkpoint.config,
        "trace": checkpoint.trace,
    }
    if checkpoint.config_hash is not None:
        meta = add_provenance(meta, checkpoint.config_hash)

    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        _write_member(archive, META_MEMBER, json.dumps(meta, sort_keys=False).encode())
        for name in PARAMETER_NAMES:
            _write_member(archive, f"params/{name}.npy", _npy_bytes(checkpoint.model.params[name]))
            if name in checkpoint.adam.m:
                _write_member(archive, f"adam_m/{name}.npy", _npy_bytes(checkpoint.adam.m[name]))
                _write_member(archive, f"adam_v/{name}.npy", _npy_bytes(checkpoint.adam.v[name]))
    return buffer.getvalue()


def save_checkpoint(checkpoint: Checkpoint, path: str | Path) -> None:
    """Write a checkpoint atomically."""
    write_bytes_atomically(Path(path), checkpoint_to_bytes(checkpoint))


def _read_array(archive: zipfile.ZipFile, name: str) -> FloatArray:
    with archive.open(name) as member:
        array: FloatArray = np.lib.format.read_array(
            io.BytesIO(member.read()), allow_pickle=False
        )
    return array


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Load a checkpoint written by save_checkpoint.

    Raises:
        CheckpointError: Missing file, corrupt archive or unsupported version.
    """
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"Checkpoint not found: {path}")
    try:
        with zipfile.ZipFile(path) as archive:
            meta = json.loads(archive.read(META_MEMBER))
            if meta.get("version") != CHECKPOINT_FORMAT_VERSION:
                raise CheckpointError(
                    f"{path}: unsupported checkpoint version {meta.get('version')!r}"
                )
            members = set(archive.namelist())
            params = {n: _read_array(archive, f"params/{n}.npy") for n in PARAMETER_NAMES}
            adam = AdamState(
                t=int(meta["adam"]["t"]),
                beta1=float(meta["adam"]["beta1"]),
                beta2=float(meta["adam"]["beta2"]),
                epsilon=float(meta["adam"]["epsilon"]),
            )
            for n in PARAMETER_NAMES:
                if f"adam_m/{n}.npy" in members:
                    adam.m[n] = _read_array(archive, f"adam_m/{n}.npy")
                    adam.v[n] = _read_array(archive, f"adam_v/{n}.npy")
            model = GatModel(GatConfig(**meta["gat_config"]), params)
    except CheckpointError:
        raise
    except (zipfile.BadZipFile, KeyError, ValueError, TypeError, OSError) as e:
        raise CheckpointError(f"{path}: unreadable checkpoint: {e}") from e

    provenance = meta.get("_provenance") or {}
    return Checkpoint(
        model=model,
        adam=adam,
        epoch=int(meta["epoch"]),
        rng_state=meta["rng_state"],
        config=meta["config"],
        config_hash=provenance.get("config_hash"),
        trace=meta["trace"],
    )
