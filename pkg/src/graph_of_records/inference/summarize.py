"""Retrieval from the graph of records and the final summary generation."""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from graph_of_records.domain.types import GraphOfRecords, NodeKind, RetrievalResult
from graph_of_records.errors import DimensionMismatchError, RetrievalError
from graph_of_records.grecords.retrieval import DEFAULT_TOP_K, top_k_indices
from graph_of_records.inference.embeddings import NodeEmbeddingCache, node_embeddings_for_inference
from graph_of_records.neuralnet.checkpoint import model_fingerprint
from graph_of_records.neuralnet.gat import GatModel
from graph_of_records.providers.embedding import EmbeddingProvider
from graph_of_records.providers.llm import LlmClient
from graph_of_records.providers.prompts import build_rag_prompt

logger = logging.getLogger(__name__)

GENERATION_TEMPERATURE = 0.0
# Recorded in place of a checkpoint fingerprint when retrieving with initial embeddings.
UNTRAINED_CHECKPOINT = "untrained"


@dataclass(frozen=True, slots=True)
class SummaryResult:
    """Generated summary plus the retrieval it was grounded on."""

    summary: str
    retrieval: RetrievalResult
    checkpoint_hash: str


def retrieve_top_k(
    query: str,
    g: GraphOfRecords,
    model: GatModel | None,
    embedder: EmbeddingProvider,
    k: int = DEFAULT_TOP_K,
    *,
    chunks_only: bool = False,
    cache: NodeEmbeddingCache | None = None,
) -> RetrievalResult:
    """Exact top-k nodes by ``dot(E_q(query), h_v)``; ties keep ascending node index.

    Both chunks and responses are retrievable unless ``chunks_only`` is set. With
    ``model`` None the nodes are scored by their initial embeddings.

    Raises:
        ValueError: ``k`` < 1.
        RetrievalError: Empty graph, or no chunk nodes with ``chunks_only``.
        DimensionMismatchError: Query and node embedding widths differ.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    embeddings = node_embeddings_for_inference(g, model, cache)
    q_emb = embedder.embed_query(query)
    if q_emb.shape[0] != embeddings.shape[1]:
        raise DimensionMismatchError(
            f"Query embedding width {q_emb.shape[0]} != node embedding width {embeddings.shape[1]}"
        )

    rows = np.arange(len(g.nodes))
    if chunks_only:
        rows = np.array([i for i, n in enumerate(g.nodes) if n.kind == NodeKind.CHUNK], dtype=int)
        if rows.size == 0:
            raise RetrievalError(f"Graph '{g.doc_id}' has no chunk nodes")

    scores = embeddings[rows] @ q_emb
    picked = top_k_indices(scores, k)
    return RetrievalResult(
        query=query,
        node_ids=tuple(g.nodes[int(rows[i])].node_id for i in picked),
        scores=tuple(float(scores[i]) for i in picked),
    )


def summarize(
    query: str,
    g: GraphOfRecords,
    model: GatModel | None,
    embedder: EmbeddingProvider,
    llm: LlmClient,
    k: int = DEFAULT_TOP_K,
    *,
    chunks_only: bool = False,
    cache: NodeEmbeddingCache | None = None,
) -> SummaryResult:
    """Generate a summary from the top-k node texts, best-first, at temperature 0.

    Raises:
        As retrieve_top_k, plus any LLM failure.
    """
    retrieval = retrieve_top_k(
        query, g, model, embedder, k, chunks_only=chunks_only, cache=cache
    )
    materials = [g.node(node_id).text for node_id in retrieval.node_ids]
    summary = llm.generate(build_rag_prompt(query, materials), GENERATION_TEMPERATURE)
    logger.debug("Summarized '%s' from %d nodes", g.doc_id, len(materials))
    fingerprint = model_fingerprint(model) if model is not None else UNTRAINED_CHECKPOINT
    return SummaryResult(summary=summary, retrieval=retrieval, checkpoint_hash=fingerprint)


def summary_record(result: SummaryResult, g: GraphOfRecords) -> dict[str, Any]:
    """JSON form of a summary: query, summary text, retrieved nodes, checkpoint hash."""
    retrieval = result.retrieval
    return {
        "doc_id": g.doc_id,
        "query": retrieval.query,
        "summary": result.summary,
        "retrieved": [
            {"node_id": node_id, "kind": g.node(node_id).kind.value, "score": score}
            for node_id, score in zip(retrieval.node_ids, retrieval.scores, strict=True)
        ],
        "checkpoint_hash": result.checkpoint_hash,
    }
