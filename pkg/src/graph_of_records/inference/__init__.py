"""Retrieval-from-graph summarization with learned node embeddings."""

from graph_of_records.inference.embeddings import (
    NodeEmbeddingCache,
    graph_fingerprint,
    initial_embeddings,
    node_embeddings_for_inference,
)
from graph_of_records.inference.summarize import (
    GENERATION_TEMPERATURE,
    UNTRAINED_CHECKPOINT,
    SummaryResult,
    retrieve_top_k,
    summarize,
    summary_record,
)

__all__ = [
    "GENERATION_TEMPERATURE",
    "NodeEmbeddingCache",
    "SummaryResult",
    "UNTRAINED_CHECKPOINT",
    "graph_fingerprint",
    "initial_embeddings",
    "node_embeddings_for_inference",
    "retrieve_top_k",
    "summarize",
    "summary_record",
]
