"""Training diagnostics computed from loss traces and model outputs."""

from collections.abc import Sequence
from typing import Any

import numpy as np

from graph_of_records.neuralnet.gat import GatModel, gat_forward
from graph_of_records.trainer.data import TrainingGraph


def epoch_mean_losses(trace: Sequence[dict[str, Any]], key: str = "total") -> list[float]:
    """Mean of ``key`` over the steps of each epoch, in epoch order."""
    per_epoch: dict[int, list[float]] = {}
    for record in trace:
        per_epoch.setdefault(int(record["epoch"]), []).append(float(record[key]))
    return [float(np.mean(per_epoch[epoch])) for epoch in sorted(per_epoch)]


def label_top1_accuracy(data: Sequence[TrainingGraph], model: GatModel) -> float:
    """Fraction of training queries whose best-scoring node is their label node.

    Ties go to the lower node index, as in retrieval.
    """
    hits = 0
    total = 0
    for graph in data:
        embeddings, _ = gat_forward(graph.tensors, model, training=False)
        scores = graph.query_embeddings @ embeddings.T
        best = np.argmax(scores, axis=1)
        hits += int((best == graph.label_rows).sum())
        total += graph.n_pairs
    return hits / total if total else 0.0
