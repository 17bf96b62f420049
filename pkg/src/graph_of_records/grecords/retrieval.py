"""Dense top-k retrieval over a candidate set by raw dot product."""

from collections.abc import Sequence

import numpy as np

from graph_of_records.domain.types import FloatArray, Node
from graph_of_records.providers.embedding import EmbeddingProvider

DEFAULT_TOP_K = 6


def top_k_indices(scores: FloatArray, k: int) -> list[int]:
    """Indices of the k highest scores, best first; ties keep ascending index order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    order = np.argsort(-scores, kind="stable")
    return [int(i) for i in order[:k]]


def retrieve_corpus(
    query: str,
    candidates: Sequence[Node],
    k: int,
    emb: EmbeddingProvider,
) -> list[str]:
    """Rank candidates by dot(E_q(query), init_embedding) and keep the top k.

    Args:
        query: Query text.
        candidates: Retrieval corpus (chunks and earlier responses).
        k: Number of ids to return; clamped to the candidate count.
        emb: Retriever providing E_q.

    Returns:
        Node ids, best first; length min(k, len(candidates)).

    Raises:
        ValueError: If candidates is empty.
    """
    if not candidates:
        raise ValueError("retrieve_corpus needs at least one candidate")

    matrix = np.array([node.init_embedding for node in candidates], dtype=np.float64)
    scores = matrix @ emb.embed_query(query)
    return [candidates[i].node_id for i in top_k_indices(scores, k)]
