"""Finite-difference verification of the GAT and loss gradients."""

from dataclasses import dataclass

import numpy as np

from graph_of_records.domain.types import FloatArray
from graph_of_records.neuralnet.gat import (
    GatConfig,
    GatModel,
    GraphTensors,
    backward,
    gat_forward,
    initialize_model,
    prepare_tensors,
)
from graph_of_records.objective import LossBatch, LossConfig, QueryItem, total_loss

FD_STEP = 1e-4
PASS_THRESHOLD = 1e-4
# Central differences at FD_STEP carry about 1e-10 of rounding noise; below this
# combined norm both gradients count as zero.
ZERO_GRADIENT_ATOL = 1e-7


@dataclass(frozen=True, slots=True)
class GradCheckReport:
    """Relative error per parameter tensor and the worst of them."""

    per_tensor: dict[str, float]

    @property
    def max_error(self) -> float:
        return max(self.per_tensor.values())

    @property
    def passed(self) -> bool:
        return self.max_error < PASS_THRESHOLD


def relative_error(analytic: FloatArray, numeric: FloatArray) -> float:
    """``||a - n|| / (||a|| + ||n||)``, or 0.0 when both are numerically zero.

    A tensor whose true gradient vanishes (the output bias shifts every
    candidate score equally, leaving both losses unchanged) otherwise compares
    floating-point noise against noise.
    """
    scale = float(np.linalg.norm(analytic) + np.linalg.norm(numeric))
    if scale < ZERO_GRADIENT_ATOL:
        return 0.0
    return float(np.linalg.norm(analytic - numeric)) / scale


def _random_graph(rng: np.random.Generator, n_nodes: int, dim: int) -> GraphTensors:
    features = rng.normal(size=(n_nodes, dim))
    edges = [(int(s), int(d)) for s, d in rng.integers(0, n_nodes, size=(n_nodes, 2)) if s != d]
    return prepare_tensors(features, edges)


def _loss_and_grads(
    model: GatModel,
    graphs: list[GraphTensors],
    queries: list[list[QueryItem]],
    loss_config: LossConfig,
    training: bool,
) -> tuple[float, dict[str, FloatArray]]:
    outputs = [gat_forward(t, model, training, rng_seed=i) for i, t in enumerate(graphs)]
    batch = LossBatch(
        node_embeddings=tuple(out for out, _ in outputs),
        items=tuple(item for per_graph in queries for item in per_graph),
    )
    report, node_grads = total_loss(batch, loss_config)
    grads = model.zero_grads()
    for (_, cache), upstream in zip(outputs, node_grads, strict=True):
        for name, g in backward(cache, model, upstream).items():
            grads[name] += g
    return report.total, grads


def grad_check_report(
    seed: int = 42,
    tau: float = 0.07,
    dropout: float = 0.2,
    alpha: float = 0.9,
    *,
    n_nodes: int = 6,
    dim: int = 8,
    heads: int = 2,
    n_graphs: int = 2,
    queries_per_graph: int = 2,
    step: float = FD_STEP,
) -> GradCheckReport:
    """Compare analytic and central-difference gradients of GAT forward plus total loss.

    Builds ``n_graphs`` random graphs with random query embeddings and random
    ranking lists, so the in-batch negative path is exercised. Dropout masks
    are fixed by seed and identical across every evaluation.
    """
    if dim % heads:
        raise ValueError(f"dim {dim} must be divisible by heads {heads}")
    rng = np.random.default_rng(seed)
    config = GatConfig(
        in_dim=dim, heads=heads, hidden_per_head=dim // heads, out_dim=dim, dropout=dropout
    )
    model = initialize_model(config, seed)
    loss_config = LossConfig(tau=tau, alpha=alpha)
    training = dropout > 0.0

    graphs = [_random_graph(rng, n_nodes, dim) for _ in range(n_graphs)]
    queries = [
        [
            QueryItem(
                q_emb=rng.normal(size=dim) / np.sqrt(dim),
                graph=g,
                order=rng.permutation(n_nodes).astype(np.intp),
            )
            for _ in range(queries_per_graph)
        ]
        for g in range(n_graphs)
    ]

    _, analytic = _loss_and_grads(model, graphs, queries, loss_config, training)

    per_tensor: dict[str, float] = {}
    for name, param in model.params.items():
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + step
            plus, _ = _loss_and_grads(model, graphs, queries, loss_config, training)
            param[index] = original - step
            minus, _ = _loss_and_grads(model, graphs, queries, loss_config, training)
            param[index] = original
            numeric[index] = (plus - minus) / (2.0 * step)
        per_tensor[name] = relative_error(analytic[name], numeric)
    return GradCheckReport(per_tensor=per_tensor)


def grad_check(
    seed: int = 42, tau: float = 0.07, dropout: float = 0.2, alpha: float = 0.9
) -> float:
    """Worst per-tensor relative gradient error; below 1e-4 counts as a pass."""
    return grad_check_report(seed, tau, dropout, alpha).max_error
