"""Per-pair node ranking lists: the supervision signal of the training losses."""

import logging
from collections.abc import Sequence

import numpy as np

from graph_of_records.domain.types import FloatArray, GraphOfRecords, RankingList
from graph_of_records.errors import BertScoreError
from graph_of_records.providers.tokens import TokenEmbedder
from graph_of_records.simscore.bertscore import ScoreComponent, score_texts

logger = logging.getLogger(__name__)


class _TokenCache:
    """Token matrices keyed by text, so each distinct text is embedded once."""

    def __init__(self, embedder: TokenEmbedder) -> None:
        self._embedder = embedder
        self._matrices: dict[str, FloatArray] = {}

    def get(self, text: str) -> FloatArray:
        matrix = self._matrices.get(text)
        if matrix is None:
            matrix = self._embedder.embed_tokens(text)
            self._matrices[text] = matrix
        return matrix


def _rank(
    g: GraphOfRecords,
    pair_index: int,
    label_text: str,
    tokens: _TokenCache,
    component: ScoreComponent,
) -> RankingList:
    label_tokens = tokens.get(label_text)
    scores: list[float] = []
    for node in g.nodes:
        try:
            score = score_texts(node.text, tokens.get(node.text), label_text, label_tokens)
        except BertScoreError as e:
            raise BertScoreError(f"Node '{node.node_id}' in graph '{g.doc_id}': {e}") from e
        scores.append(score.component(component))

    # stable sort on -score keeps ties in ascending node index
    order = np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")
    return RankingList(
        pair_index=pair_index,
        ordered_nodes=tuple(g.nodes[i].node_id for i in order),
        scores=tuple(scores[i] for i in order),
    )


def _check_pair_index(g: GraphOfRecords, pair_index: int) -> None:
    if not 0 <= pair_index < len(g.training_pairs):
        raise IndexError(
            f"pair_index {pair_index} out of range for graph '{g.doc_id}' "
            f"with {len(g.training_pairs)} training pairs"
        )


def rank_nodes(
    g: GraphOfRecords,
    pair_index: int,
    embedder: TokenEmbedder,
    component: ScoreComponent = ScoreComponent.F1,
) -> RankingList:
    """Order every node of ``g`` by BERTScore against the pair's label chunk.

    Raises:
        IndexError: ``pair_index`` outside the training pairs.
        BertScoreError: A node text has no tokens; the message names the node.
    """
    _check_pair_index(g, pair_index)
    label = g.node(g.training_pairs[pair_index].label_chunk_id)
    return _rank(g, pair_index, label.text, _TokenCache(embedder), component)


def rank_nodes_against(
    g: GraphOfRecords,
    label_text: str,
    pair_index: int,
    embedder: TokenEmbedder,
    component: ScoreComponent = ScoreComponent.F1,
) -> RankingList:
    """Order every node of ``g`` by BERTScore against an arbitrary label text.

    Used by supervised training, where the label is a reference summary.
    """
    return _rank(g, pair_index, label_text, _TokenCache(embedder), component)


def precompute_rankings(
    g: GraphOfRecords,
    embedder: TokenEmbedder,
    component: ScoreComponent = ScoreComponent.F1,
    labels: Sequence[str] | None = None,
) -> list[RankingList]:
    """One ranking list per training pair, each node embedded once.

    Args:
        g: Constructed graph.
        embedder: Token embedder used for BERTScore.
        component: BERTScore component driving the order.
        labels: Label text per pair; defaults to each pair's label chunk text.

    Raises:
        ValueError: ``labels`` length differs from the number of training pairs.
        BertScoreError: A node text has no tokens.
    """
    if labels is None:
        labels = [g.node(p.label_chunk_id).text for p in g.training_pairs]
    elif len(labels) != len(g.training_pairs):
        raise ValueError(
            f"Expected {len(g.training_pairs)} labels for graph '{g.doc_id}', got {len(labels)}"
        )

    tokens = _TokenCache(embedder)
    rankings = [_rank(g, i, text, tokens, component) for i, text in enumerate(labels)]
    logger.debug("Ranked %d nodes for %d pairs of '%s'", len(g.nodes), len(rankings), g.doc_id)
    return rankings
