"""Domain types shared across graph-of-records modules."""

from graph_of_records.domain.types import (
    Chunk,
    Document,
    Edge,
    FloatArray,
    GraphOfRecords,
    LossReport,
    Node,
    NodeKind,
    RankingList,
    RetrievalResult,
    RougeScore,
    TokenSeq,
    TrainingPair,
)

__all__ = [
    "Chunk",
    "Document",
    "Edge",
    "FloatArray",
    "GraphOfRecords",
    "LossReport",
    "Node",
    "NodeKind",
    "RankingList",
    "RetrievalResult",
    "RougeScore",
    "TokenSeq",
    "TrainingPair",
]
