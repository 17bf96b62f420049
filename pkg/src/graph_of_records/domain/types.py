"""Domain types for graph-of-records retrieval and training."""

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]


class NodeKind(StrEnum):
    """Kind of retrieval unit held by a graph node."""

    CHUNK = "chunk"
    RESPONSE = "response"


@dataclass(frozen=True, slots=True)
class Document:
    """Immutable long document with optional reference summaries."""

    doc_id: str
    text: str
    reference_summaries: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        """Validate invariants after construction."""
        if not self.doc_id:
            raise ValueError("doc_id cannot be empty")
        if not " ".join(self.text.split()):
            raise ValueError(f"Document '{self.doc_id}' has empty text")


@dataclass(frozen=True, slots=True)
class TokenSeq:
    """Tokens of a text with their half-open character offsets.

    ``offsets`` index the Python string; byte_offsets gives the UTF-8 positions.
    """

    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        """Validate invariants after construction."""
        if len(self.tokens) != len(self.offsets):
            raise ValueError("tokens and offsets must have equal length")
        previous_end = 0
        for start, end in self.offsets:
            if start < previous_end or end <= start:
                raise ValueError("offsets must be strictly increasing and non-overlapping")
            previous_end = end

    def __len__(self) -> int:
        return len(self.tokens)

    def byte_offsets(self, text: str) -> tuple[tuple[int, int], ...]:
        """Half-open UTF-8 byte offsets of the tokens in ``text``, the string they came from."""
        spans: list[tuple[int, int]] = []
        position = byte_position = 0
        for start, end in self.offsets:
            byte_start = byte_position + len(text[position:start].encode("utf-8"))
            byte_end = byte_start + len(text[start:end].encode("utf-8"))
            spans.append((byte_start, byte_end))
            position, byte_position = end, byte_end
        return tuple(spans)


@dataclass(frozen=True, slots=True)
class Chunk:
    """A token window of one document."""

    chunk_id: str
    doc_id: str
    token_span: tuple[int, int]  # half-open [start, end) over the document's tokens
    text: str


@dataclass(frozen=True, slots=True)
class Node:
    """A graph node: a document chunk or an LLM response.

    ``round`` is 0 for chunks and i for response r_i.
    """

    node_id: str
    kind: NodeKind
    text: str
    init_embedding: tuple[float, ...]
    round: int = 0

    def __post_init__(self) -> None:
        """Validate invariants after construction."""
        if not self.node_id:
            raise ValueError("node_id cannot be empty")
        if self.kind == NodeKind.CHUNK and self.round != 0:
            raise ValueError(f"Chunk node '{self.node_id}' must have round 0")
        if self.kind == NodeKind.RESPONSE and self.round < 1:
            raise ValueError(f"Response node '{self.node_id}' must have round >= 1")


@dataclass(frozen=True, slots=True)
class Edge:
    """Directed provenance edge: retrieved source -> generated response."""

    src: str
    dst: str

    @property
    def is_self_loop(self) -> bool:
        return self.src == self.dst


@dataclass(frozen=True, slots=True)
class TrainingPair:
    """One entry of the self-supervised corpus: simulated query and its source chunk."""

    query: str
    label_chunk_id: str


@dataclass(frozen=True, slots=True)
class GraphOfRecords:
    """Nodes, provenance edges and training pairs of one document."""

    doc_id: str
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    training_pairs: tuple[TrainingPair, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        """Validate referential integrity after construction."""
        index: dict[str, int] = {}
        for position, node in enumerate(self.nodes):
            if node.node_id in index:
                raise ValueError(f"Duplicate node id '{node.node_id}' in graph '{self.doc_id}'")
            index[node.node_id] = position
        object.__setattr__(self, "_index", index)

        for edge in self.edges:
            for endpoint in (edge.src, edge.dst):
                if endpoint not in index:
                    raise ValueError(f"Edge endpoint '{endpoint}' is not a node")
        for pair in self.training_pairs:
            label = index.get(pair.label_chunk_id)
            if label is None or self.nodes[label].kind != NodeKind.CHUNK:
                raise ValueError(f"Training label '{pair.label_chunk_id}' is not a chunk node")

    def node_index(self, node_id: str) -> int:
        """Position of a node in ``nodes``.

        Raises:
            KeyError: If the node does not exist.
        """
        return self._index[node_id]

    def node(self, node_id: str) -> Node:
        return self.nodes[self._index[node_id]]

    def embedding_matrix(self) -> FloatArray:
        """Initial embeddings stacked in node order, shape (|nodes|, dim)."""
        if not self.nodes:
            return np.zeros((0, 0), dtype=np.float64)
        return np.array([node.init_embedding for node in self.nodes], dtype=np.float64)

    @property
    def chunk_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind == NodeKind.CHUNK)

    @property
    def response_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind == NodeKind.RESPONSE)


@dataclass(frozen=True, slots=True)
class RankingList:
    """All node ids of a graph ordered by BERTScore against one pair's label.

    Position 0 is the contrastive positive.
    """

    pair_index: int
    ordered_nodes: tuple[str, ...]
    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate invariants after construction."""
        if len(self.ordered_nodes) != len(self.scores):
            raise ValueError("ordered_nodes and scores must have equal length")
        if len(set(self.ordered_nodes)) != len(self.ordered_nodes):
            raise ValueError("ordered_nodes must not repeat a node")
        if any(a < b for a, b in zip(self.scores, self.scores[1:], strict=False)):
            raise ValueError("scores must be non-increasing")

    @property
    def positive(self) -> str:
        return self.ordered_nodes[0]


@dataclass(frozen=True, slots=True)
class LossReport:
    """Loss components of one optimizer step plus the entropy diagnostic."""

    l_cl: float
    l_rank: float
    total: float
    entropy: float


@dataclass(frozen=True, slots=True)
class RetrievalResult:
    """Top-k nodes for a query, best first."""

    query: str
    node_ids: tuple[str, ...]
    scores: tuple[float, ...]


@dataclass(frozen=True, slots=True)
class RougeScore:
    """Precision, recall and F1 of one Rouge variant.

    ``degenerate`` marks scores forced to zero because a side was too short.
    """

    precision: float
    recall: float
    f1: float
    degenerate: bool = False
