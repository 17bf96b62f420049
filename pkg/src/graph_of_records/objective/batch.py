"""Query items and batches the losses are evaluated on."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from graph_of_records.domain.types import FloatArray, RankingList
from graph_of_records.errors import LossError

IndexArray = npt.NDArray[np.intp]


@dataclass(frozen=True, slots=True)
class QueryItem:
    """One training query against one graph of the batch.

    Attributes:
        q_emb: Frozen query embedding.
        graph: Index into ``LossBatch.node_embeddings``.
        order: Node rows of that graph, best-ranked first; ``order[0]`` is the positive.
    """

    q_emb: FloatArray
    graph: int
    order: IndexArray

    @property
    def positive(self) -> int:
        return int(self.order[0])


@dataclass(frozen=True, slots=True)
class LossBatch:
    """Node embeddings of every graph in a batch and the queries posed against them."""

    node_embeddings: tuple[FloatArray, ...]
    items: tuple[QueryItem, ...]

    def __post_init__(self) -> None:
        """Validate referential integrity after construction."""
        for item in self.items:
            if not 0 <= item.graph < len(self.node_embeddings):
                raise LossError(f"Query refers to graph {item.graph} outside the batch")
            n = self.node_embeddings[item.graph].shape[0]
            if item.order.size and (item.order.min() < 0 or item.order.max() >= n):
                raise LossError(f"Ranking of graph {item.graph} refers to a missing node row")


def make_query_item(
    q_emb: FloatArray, ranking: RankingList, graph: int, node_ids: Sequence[str]
) -> QueryItem:
    """Translate a ranking of node ids into row indices of ``graph``.

    Raises:
        LossError: The ranking names a node that is not in ``node_ids``.
    """
    rows = {node_id: i for i, node_id in enumerate(node_ids)}
    try:
        order = np.array([rows[n] for n in ranking.ordered_nodes], dtype=np.intp)
    except KeyError as e:
        raise LossError(f"Ranking {ranking.pair_index} names unknown node {e}") from e
    return QueryItem(q_emb=np.asarray(q_emb, dtype=np.float64), graph=graph, order=order)
