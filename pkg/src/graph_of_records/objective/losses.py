"""Contrastive and pair-wise ranking losses over graph node embeddings.

Every similarity is handled in log space: ``log s(q, h) = q . h / tau``.
Both losses return their value together with exact gradients with respect to
the node embeddings of each graph in the batch.
"""

import numpy as np

from graph_of_records.domain.types import FloatArray, LossReport
from graph_of_records.errors import LossError
from graph_of_records.objective.batch import IndexArray, LossBatch, QueryItem
from graph_of_records.objective.config import FULL_ENUMERATION_LIMIT, LossConfig


def log_sim_s(q_emb: FloatArray, h: FloatArray, tau: float) -> float:
    return float(np.dot(q_emb, h) / tau)


def sim_s(q_emb: FloatArray, h: FloatArray, tau: float) -> float:
    """``exp(q . h / tau)``, strictly positive (infinite only on overflow)."""
    return float(np.exp(log_sim_s(q_emb, h, tau)))


def _log_softmax(logits: FloatArray) -> FloatArray:
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())


def _entropy_of(log_p: FloatArray) -> float:
    return float(max(0.0, -(np.exp(log_p) * log_p).sum()))


def similarity_entropy(q_emb: FloatArray, node_embs: FloatArray, tau: float) -> float:
    """Shannon entropy, in nats, of ``softmax(node_embs @ q / tau)``.

    Raises:
        LossError: No nodes.
    """
    if node_embs.shape[0] == 0:
        raise LossError("similarity_entropy needs at least one node")
    return _entropy_of(_log_softmax(node_embs @ q_emb / tau))


def _check_batch(batch: LossBatch) -> None:
    if not batch.items:
        raise LossError("Loss batch has no queries")


def _negative_rows(batch: LossBatch, config: LossConfig) -> list[IndexArray]:
    """Rows each graph lends to the other graphs' queries as in-batch negatives."""
    if not config.use_in_batch_negatives:
        return [np.zeros(0, dtype=np.intp) for _ in batch.node_embeddings]
    if config.in_batch_all_nodes:
        return [np.arange(h.shape[0], dtype=np.intp) for h in batch.node_embeddings]
    positives: list[set[int]] = [set() for _ in batch.node_embeddings]
    for item in batch.items:
        positives[item.graph].add(item.positive)
    return [np.array(sorted(rows), dtype=np.intp) for rows in positives]


def _candidate_log_probs(
    item: QueryItem, batch: LossBatch, lent: list[IndexArray], tau: float
) -> tuple[FloatArray, list[tuple[int, IndexArray]]]:
    """Log-softmax over own-graph nodes then lent negatives, with the segment layout."""
    segments: list[tuple[int, IndexArray]] = [
        (item.graph, np.arange(batch.node_embeddings[item.graph].shape[0], dtype=np.intp))
    ]
    for g, rows in enumerate(lent):
        if g != item.graph and rows.size:
            segments.append((g, rows))
    logits = np.concatenate(
        [batch.node_embeddings[g][rows] @ item.q_emb / tau for g, rows in segments]
    )
    if logits.size < 2:
        raise LossError("Contrastive loss needs at least one negative")
    return _log_softmax(logits), segments


def _contrastive(
    batch: LossBatch, config: LossConfig
) -> tuple[float, list[FloatArray], float]:
    _check_batch(batch)
    lent = _negative_rows(batch, config)
    grads = [np.zeros_like(h) for h in batch.node_embeddings]
    n_queries = len(batch.items)
    total = 0.0
    entropy = 0.0

    for item in batch.items:
        log_p, segments = _candidate_log_probs(item, batch, lent, config.tau)
        # own-graph segment comes first, so the positive's slot is its row index
        total -= float(log_p[item.positive])
        entropy += _entropy_of(log_p)

        coeff = np.exp(log_p)
        coeff[item.positive] -= 1.0
        coeff /= config.tau * n_queries
        offset = 0
        for g, rows in segments:
            np.add.at(grads[g], rows, np.outer(coeff[offset : offset + rows.size], item.q_emb))
            offset += rows.size

    return total / n_queries, grads, entropy / n_queries


def contrastive_loss(batch: LossBatch, config: LossConfig) -> tuple[float, list[FloatArray]]:
    """InfoNCE over each query's graph plus in-batch negatives, averaged over queries.

    Candidates for a query are all nodes of its own graph plus, when
    enabled, the positives (or all nodes) of every other graph in the batch.

    Returns:
        The loss and one gradient array per graph, shaped like its embeddings.

    Raises:
        LossError: Empty batch, or a query with no negative at all.
    """
    value, grads, _ = _contrastive(batch, config)
    return value, grads


def _rank_pairs(
    n: int, config: LossConfig, step: int, query_index: int
) -> tuple[IndexArray, IndexArray]:
    """Position pairs ``(a, b)``, ``a < b``, of one ranking list."""
    if n <= FULL_ENUMERATION_LIMIT:
        upper, lower = np.triu_indices(n, k=1)
        return upper.astype(np.intp), lower.astype(np.intp)

    rng = np.random.default_rng([config.pair_seed, step, query_index])
    first = rng.integers(0, n, size=config.max_rank_pairs)
    second = (first + rng.integers(1, n, size=config.max_rank_pairs)) % n
    better = np.concatenate([np.zeros(n - 1, dtype=np.intp), np.minimum(first, second)])
    worse = np.concatenate([np.arange(1, n, dtype=np.intp), np.maximum(first, second)])
    return better, worse


def ranking_loss(
    batch: LossBatch, config: LossConfig, step: int = 0
) -> tuple[float, list[FloatArray]]:
    """Pair-wise ranking loss, summed over pairs and averaged over queries.

    Each pair where node ``i`` outranks node ``j`` contributes
    ``softplus((d_j - d_i) / tau)`` with ``d = h . q``. Lists longer than the
    full-enumeration limit use the positive against every node plus
    ``max_rank_pairs`` pairs sampled from a generator seeded by
    ``(pair_seed, step, query index)``.

    Raises:
        LossError: Empty batch, or a ranking list with fewer than two nodes.
    """
    _check_batch(batch)
    grads = [np.zeros_like(h) for h in batch.node_embeddings]
    n_queries = len(batch.items)
    total = 0.0

    for index, item in enumerate(batch.items):
        n = item.order.size
        if n < 2:
            raise LossError(f"Ranking list of query {index} has fewer than two nodes")
        dots = batch.node_embeddings[item.graph][item.order] @ item.q_emb
        better, worse = _rank_pairs(n, config, step, index)
        margin = (dots[worse] - dots[better]) / config.tau
        total += float(np.logaddexp(0.0, margin).sum())

        weight = np.exp(-np.logaddexp(0.0, -margin)) / (config.tau * n_queries)
        d_dots = np.zeros(n)
        np.add.at(d_dots, worse, weight)
        np.add.at(d_dots, better, -weight)
        np.add.at(grads[item.graph], item.order, np.outer(d_dots, item.q_emb))

    return total / n_queries, grads


def total_loss(
    batch: LossBatch, config: LossConfig, step: int = 0
) -> tuple[LossReport, list[FloatArray]]:
    """``L_CL + alpha * L_RANK`` with matching gradients and the entropy diagnostic.

    Without the contrastive term the objective and its gradients are
    ``alpha * L_RANK`` alone; ``l_cl`` is still computed for the report.

    Raises:
        LossError: As the component losses.
    """
    l_cl, cl_grads, entropy = _contrastive(batch, config)
    l_rank, rank_grads = ranking_loss(batch, config, step)
    cl_weight = 1.0 if config.use_contrastive else 0.0
    grads = [
        cl_weight * g_cl + config.alpha * g_rank
        for g_cl, g_rank in zip(cl_grads, rank_grads, strict=True)
    ]
    total = cl_weight * l_cl + config.alpha * l_rank
    report = LossReport(l_cl=l_cl, l_rank=l_rank, total=total, entropy=entropy)
    return report, grads
