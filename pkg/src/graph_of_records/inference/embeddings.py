"""Node embeddings for retrieval: GAT outputs cached per (graph, checkpoint), or initial ones."""

import threading

import numpy as np

from graph_of_records.domain.types import FloatArray, GraphOfRecords
from graph_of_records.errors import DimensionMismatchError, RetrievalError
from graph_of_records.neuralnet.checkpoint import model_fingerprint
from graph_of_records.neuralnet.gat import GatModel, gat_forward, prepare_graph
from graph_of_records.utils.seeds import canonical_json, config_hash


def graph_fingerprint(g: GraphOfRecords) -> str:
    """Hash of node ids, edges and initial embeddings."""
    return config_hash(
        {
            "doc_id": g.doc_id,
            "nodes": [[n.node_id, list(n.init_embedding)] for n in g.nodes],
            "edges": [[e.src, e.dst] for e in g.edges],
        }
    )


class NodeEmbeddingCache:
    """Read-only embedding matrices keyed by graph and model fingerprints.

    Attributes:
        misses: Number of lookups that ran the GAT.
    """

    def __init__(self) -> None:
        self._entries: dict[str, FloatArray] = {}
        self._lock = threading.Lock()
        self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)

    def get_or_compute(self, g: GraphOfRecords, model: GatModel) -> FloatArray:
        key = canonical_json([graph_fingerprint(g), model_fingerprint(model)])
        with self._lock:
            cached = self._entries.get(key)
        if cached is not None:
            return cached
        embeddings = _compute(g, model)
        with self._lock:
            self.misses += 1
            self._entries[key] = embeddings
        return embeddings


def _compute(g: GraphOfRecords, model: GatModel) -> FloatArray:
    if not g.nodes:
        raise RetrievalError(f"Graph '{g.doc_id}' has no nodes")
    width = len(g.nodes[0].init_embedding)
    if width != model.config.in_dim:
        raise DimensionMismatchError(
            f"Graph '{g.doc_id}' embeddings have width {width}, "
            f"checkpoint expects {model.config.in_dim}"
        )
    embeddings, _ = gat_forward(prepare_graph(g), model, training=False)
    embeddings = np.ascontiguousarray(embeddings)
    embeddings.flags.writeable = False
    return embeddings


def initial_embeddings(g: GraphOfRecords) -> FloatArray:
    """Read-only matrix of the nodes' initial embeddings, rows in node order.

    Raises:
        RetrievalError: Empty graph.
    """
    if not g.nodes:
        raise RetrievalError(f"Graph '{g.doc_id}' has no nodes")
    embeddings = np.array([n.init_embedding for n in g.nodes], dtype=np.float64)
    embeddings.flags.writeable = False
    return embeddings


def node_embeddings_for_inference(
    g: GraphOfRecords, model: GatModel | None, cache: NodeEmbeddingCache | None = None
) -> FloatArray:
    """GAT output for every node with dropout disabled, rows in node order.

    Without a model the initial embeddings are returned, uncached.

    Raises:
        RetrievalError: Empty graph.
        DimensionMismatchError: Graph embedding width differs from the checkpoint.
    """
    if model is None:
        return initial_embeddings(g)
    if cache is None:
        return _compute(g, model)
    return cache.get_or_compute(g, model)
