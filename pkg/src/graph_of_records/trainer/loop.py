"""Graph-level mini-batch training of the GAT."""

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import IO, Any

import numpy as np

from graph_of_records.errors import ModelError, TrainingError
from graph_of_records.neuralnet.adam import AdamState, adam_step
from graph_of_records.neuralnet.checkpoint import Checkpoint, save_checkpoint
from graph_of_records.neuralnet.gat import GatModel, backward, gat_forward, initialize_model
from graph_of_records.neuralnet.schedule import lr_at
from graph_of_records.objective.batch import LossBatch, QueryItem
from graph_of_records.objective.losses import total_loss
from graph_of_records.output.artifacts import provenance_record
from graph_of_records.trainer.config import TrainConfig
from graph_of_records.trainer.data import TrainingGraph
from graph_of_records.utils.seeds import derive_seed

logger = logging.getLogger(__name__)


def checkpoint_path(out_dir: Path, epoch: int) -> Path:
    return out_dir / f"epoch{epoch}.ckpt"


def _batch_items(members: Sequence[TrainingGraph]) -> tuple[QueryItem, ...]:
    return tuple(
        QueryItem(q_emb=member.query_embeddings[i], graph=j, order=member.orders[i])
        for j, member in enumerate(members)
        for i in range(member.n_pairs)
    )


def _check_dimensions(data: Sequence[TrainingGraph]) -> tuple[int, int]:
    in_dims = {t.tensors.features.shape[1] for t in data}
    out_dims = {t.query_embeddings.shape[1] for t in data}
    if len(in_dims) != 1 or len(out_dims) != 1:
        raise TrainingError(
            f"Graphs disagree on widths: node {sorted(in_dims)}, query {sorted(out_dims)}"
        )
    return in_dims.pop(), out_dims.pop()


def _start_state(
    data: Sequence[TrainingGraph], config: TrainConfig, resume: Checkpoint | None
) -> tuple[GatModel, AdamState, np.random.Generator, int, list[dict[str, Any]]]:
    in_dim, out_dim = _check_dimensions(data)
    shuffle_rng = np.random.default_rng(derive_seed(config.seed, "shuffle"))
    if resume is None:
        gat_config = config.gat_config(in_dim, out_dim)
        model = initialize_model(gat_config, derive_seed(config.seed, "init"))
        return model, AdamState.for_model(model), shuffle_rng, 0, []

    model = resume.model.copy()
    expected = config.gat_config(in_dim, out_dim)
    if model.config != expected:
        raise TrainingError(f"Checkpoint model {model.config} does not match {expected}")
    adam = resume.adam.copy()
    if resume.rng_state:
        shuffle_rng.bit_generator.state = resume.rng_state
    return model, adam, shuffle_rng, resume.epoch, list(resume.trace)


def _train_step(
    members: Sequence[TrainingGraph],
    model: GatModel,
    adam: AdamState,
    config: TrainConfig,
    lr: float,
    step: int,
    step_label: str,
) -> dict[str, float]:
    forwards = [
        gat_forward(m.tensors, model, True, derive_seed(config.seed, f"dropout/{step}/{j}"))
        for j, m in enumerate(members)
    ]
    batch = LossBatch(
        node_embeddings=tuple(out for out, _ in forwards), items=_batch_items(members)
    )
    report, node_grads = total_loss(batch, config.loss, step=step)
    if not np.isfinite(report.total):
        raise TrainingError(f"Non-finite loss at {step_label}: {report}")

    grads = model.zero_grads()
    for (_, cache), upstream in zip(forwards, node_grads, strict=True):
        for name, g in backward(cache, model, upstream).items():
            grads[name] += g
    adam_step(model, grads, adam, lr)
    return {
        "l_cl": report.l_cl,
        "l_rank": report.l_rank,
        "total": report.total,
        "entropy": report.entropy,
    }


def _snapshot(
    model: GatModel,
    adam: AdamState,
    rng: np.random.Generator,
    epoch: int,
    config: TrainConfig,
    config_hash: str | None,
    trace: list[dict[str, Any]],
) -> Checkpoint:
    return Checkpoint(
        model=model.copy(),
        adam=adam.copy(),
        epoch=epoch,
        rng_state=dict(rng.bit_generator.state),
        config=config.to_dict(),
        config_hash=config_hash,
        trace=list(trace),
    )


def train(
    data: Sequence[TrainingGraph],
    config: TrainConfig,
    *,
    resume: Checkpoint | None = None,
    stop_epoch: int | None = None,
    out_dir: str | Path | None = None,
    log_path: str | Path | None = None,
    config_hash: str | None = None,
) -> Checkpoint:
    """Train the GAT over graph-level mini-batches.

    Each epoch shuffles the graphs with a seeded generator and cuts batches of
    ``batch_size`` graphs. Every batch runs one forward per graph, evaluates
    the total loss over all of its queries with in-batch negatives, sums the
    per-graph parameter gradients and takes one Adam step at ``lr_at(epoch)``.

    Args:
        data: Prepared training graphs.
        config: Training configuration.
        resume: Checkpoint to continue from; the remaining trace is bit-identical
            to an uninterrupted run.
        stop_epoch: Stop after this many completed epochs (default ``config.epochs``).
            The schedule still spans ``config.epochs``.
        out_dir: Directory for ``epoch{N}.ckpt`` files; nothing is written when None.
        log_path: JSON-lines file receiving one record per optimizer step. A fresh
            log starts with a provenance header when ``config_hash`` is given.
        config_hash: Hash stamped on written checkpoints and the step log.

    Returns:
        Checkpoint after the last completed epoch, including the full loss trace.

    Raises:
        TrainingError: Empty data, inconsistent widths, a non-finite loss or
            gradient (message names epoch and batch).
    """
    if not data:
        raise TrainingError("No training graphs")
    last_epoch = config.epochs if stop_epoch is None else min(stop_epoch, config.epochs)
    model, adam, rng, start_epoch, trace = _start_state(data, config, resume)
    out = Path(out_dir) if out_dir is not None else None
    log_file: IO[str] | None = None
    if log_path is not None:
        Path(log_path).parent.mkdir(parents=True, exist_ok=True)
        mode = "a" if resume is not None else "w"
        log_file = open(log_path, mode, encoding="utf-8")  # noqa: SIM115
        if mode == "w" and config_hash is not None:
            log_file.write(json.dumps(provenance_record(config_hash)) + "\n")

    try:
        step = len(trace)
        for epoch in range(start_epoch, last_epoch):
            lr = lr_at(epoch, config.epochs, config.base_lr, config.lr_decay)
            order = rng.permutation(len(data))
            epoch_totals: list[float] = []
            for b, start in enumerate(range(0, len(data), config.batch_size)):
                members = [data[i] for i in order[start : start + config.batch_size]]
                step_label = f"epoch {epoch + 1} batch {b + 1}"
                try:
                    losses = _train_step(members, model, adam, config, lr, step, step_label)
                except ModelError as e:
                    raise TrainingError(f"{step_label}: {e}") from e
                record: dict[str, Any] = {"epoch": epoch + 1, "batch": b + 1, **losses, "lr": lr}
                trace.append(record)
                epoch_totals.append(losses["total"])
                if log_file is not None:
                    log_file.write(json.dumps(record) + "\n")
                    log_file.flush()
                step += 1

            logger.info(
                "Epoch %d/%d: mean loss %.6f, lr %.3g",
                epoch + 1,
                config.epochs,
                float(np.mean(epoch_totals)),
                lr,
            )
            completed = epoch + 1
            every = config.checkpoint_every
            if out is not None and every and completed % every == 0:
                save_checkpoint(
                    _snapshot(model, adam, rng, completed, config, config_hash, trace),
                    checkpoint_path(out, completed),
                )
    finally:
        if log_file is not None:
            log_file.close()

    final = _snapshot(model, adam, rng, max(last_epoch, start_epoch), config, config_hash, trace)
    if out is not None:
        save_checkpoint(final, checkpoint_path(out, final.epoch))
    return final
