"""Per-graph training inputs: tensors, frozen query embeddings and ranking orders."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from graph_of_records.domain.types import Document, FloatArray, GraphOfRecords, RankingList
from graph_of_records.errors import TrainingError
from graph_of_records.neuralnet.gat import GraphTensors, prepare_graph
from graph_of_records.objective.batch import IndexArray
from graph_of_records.providers.embedding import EmbeddingProvider
from graph_of_records.providers.tokens import TokenEmbedder
from graph_of_records.simscore.bertscore import ScoreComponent
from graph_of_records.simscore.ranking import rank_nodes_against
from graph_of_records.simscore.storage import rankings_match_graph
from graph_of_records.trainer.config import DEFAULT_GLOBAL_QUERY


@dataclass(frozen=True, slots=True)
class SupervisedPair:
    """Global query labelled with a reference summary instead of a source chunk."""

    query: str
    label_text: str


@dataclass(frozen=True, slots=True)
class TrainingGraph:
    """Everything the training loop needs about one graph.

    Attributes:
        doc_id: Graph identifier, used in error messages.
        tensors: Features and message-passing edges.
        query_embeddings: One frozen query embedding per pair, shape (pairs, dim).
        orders: Node rows per pair, best-ranked first.
        label_rows: Row each pair's query should retrieve first.
    """

    doc_id: str
    tensors: GraphTensors
    query_embeddings: FloatArray
    orders: tuple[IndexArray, ...]
    label_rows: IndexArray

    @property
    def n_pairs(self) -> int:
        return len(self.orders)


def _orders(g: GraphOfRecords, rankings: Sequence[RankingList]) -> tuple[IndexArray, ...]:
    return tuple(
        np.array([g.node_index(n) for n in r.ordered_nodes], dtype=np.intp) for r in rankings
    )


def prepare_training_graph(
    g: GraphOfRecords, rankings: Sequence[RankingList], embedder: EmbeddingProvider
) -> TrainingGraph:
    """Self-supervised inputs for one graph.

    Raises:
        TrainingError: Rankings do not match the graph's pairs and nodes, or
            the graph has no training pairs.
    """
    if not g.training_pairs:
        raise TrainingError(f"Graph '{g.doc_id}' has no training pairs")
    if not rankings_match_graph(g, list(rankings)):
        raise TrainingError(
            f"Rankings for graph '{g.doc_id}' do not match its training pairs and nodes"
        )
    if embedder.dimension != len(g.nodes[0].init_embedding):
        raise TrainingError(
            f"Graph '{g.doc_id}' embeddings have width {len(g.nodes[0].init_embedding)}, "
            f"query embedder has {embedder.dimension}"
        )
    return TrainingGraph(
        doc_id=g.doc_id,
        tensors=prepare_graph(g),
        query_embeddings=np.stack([embedder.embed_query(p.query) for p in g.training_pairs]),
        orders=_orders(g, rankings),
        label_rows=np.array(
            [g.node_index(p.label_chunk_id) for p in g.training_pairs], dtype=np.intp
        ),
    )


def prepare_training_data(
    graphs: Sequence[GraphOfRecords],
    rankings: Sequence[Sequence[RankingList]],
    embedder: EmbeddingProvider,
) -> list[TrainingGraph]:
    """Self-supervised inputs for every graph, query embeddings computed once here.

    Raises:
        TrainingError: Counts differ, or any graph's rankings are inconsistent.
    """
    if len(graphs) != len(rankings):
        raise TrainingError(f"Got {len(graphs)} graphs but {len(rankings)} ranking sets")
    return [prepare_training_graph(g, r, embedder) for g, r in zip(graphs, rankings, strict=True)]


def build_supervised_pairs(
    g: GraphOfRecords,
    doc: Document,
    n_copies: int,
    global_query: str = DEFAULT_GLOBAL_QUERY,
) -> list[SupervisedPair]:
    """``n_copies`` identical pairs of the global query and the first reference summary.

    Raises:
        TrainingError: The document has no reference summary.
        ValueError: ``n_copies`` < 1.
    """
    if n_copies < 1:
        raise ValueError(f"n_copies must be >= 1, got {n_copies}")
    if not doc.reference_summaries:
        raise TrainingError(f"Document '{doc.doc_id}' has no reference summary")
    if doc.doc_id != g.doc_id:
        raise TrainingError(f"Document '{doc.doc_id}' does not belong to graph '{g.doc_id}'")
    return [SupervisedPair(global_query, doc.reference_summaries[0]) for _ in range(n_copies)]


def prepare_supervised_graph(
    g: GraphOfRecords,
    doc: Document,
    embedder: EmbeddingProvider,
    token_embedder: TokenEmbedder,
    global_query: str = DEFAULT_GLOBAL_QUERY,
    component: ScoreComponent = ScoreComponent.F1,
) -> TrainingGraph:
    """Supervised inputs: one ranking against the summary, replicated per simulated query.

    Raises:
        TrainingError: Missing reference summary or no training pairs to match.
    """
    n_copies = len(g.training_pairs)
    if n_copies == 0:
        raise TrainingError(f"Graph '{g.doc_id}' has no training pairs")
    pairs = build_supervised_pairs(g, doc, n_copies, global_query)
    ranking = rank_nodes_against(g, pairs[0].label_text, 0, token_embedder, component)
    order = _orders(g, [ranking])[0]
    q_emb = embedder.embed_query(global_query)
    return TrainingGraph(
        doc_id=g.doc_id,
        tensors=prepare_graph(g),
        query_embeddings=np.stack([q_emb] * n_copies),
        orders=(order,) * n_copies,
        label_rows=np.full(n_copies, order[0], dtype=np.intp),
    )


def prepare_supervised_data(
    graphs: Sequence[GraphOfRecords],
    documents: Sequence[Document],
    embedder: EmbeddingProvider,
    token_embedder: TokenEmbedder,
    global_query: str = DEFAULT_GLOBAL_QUERY,
    component: ScoreComponent = ScoreComponent.F1,
) -> list[TrainingGraph]:
    """Supervised inputs for every graph, matched to documents by doc_id.

    Raises:
        TrainingError: A graph has no document or the document has no summary.
    """
    by_id = {d.doc_id: d for d in documents}
    data = []
    for g in graphs:
        doc = by_id.get(g.doc_id)
        if doc is None:
            raise TrainingError(f"No document for graph '{g.doc_id}'")
        data.append(
            prepare_supervised_graph(g, doc, embedder, token_embedder, global_query, component)
        )
    return data
