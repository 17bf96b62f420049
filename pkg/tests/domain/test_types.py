"""Tests for domain types."""

import dataclasses

import numpy as np
import pytest

from graph_of_records.domain.types import (
    Document,
    Edge,
    GraphOfRecords,
    Node,
    NodeKind,
    RankingList,
    TokenSeq,
    TrainingPair,
)


def _chunk(node_id: str, vector: tuple[float, ...] = (1.0, 0.0)) -> Node:
    return Node(node_id=node_id, kind=NodeKind.CHUNK, text=node_id, init_embedding=vector)


def _response(node_id: str, rnd: int) -> Node:
    return Node(
        node_id=node_id, kind=NodeKind.RESPONSE, text=node_id, init_embedding=(0.0, 1.0), round=rnd
    )


class TestDocument:
    """Test Document validation."""

    def test_frozen(self) -> None:
        """Documents are immutable."""
        doc = Document(doc_id="a", text="body")
        with pytest.raises(dataclasses.FrozenInstanceError):
            doc.text = "other"  # type: ignore[misc]

    def test_empty_doc_id(self) -> None:
        """An empty doc_id is rejected."""
        with pytest.raises(ValueError, match="doc_id"):
            Document(doc_id="", text="body")

    def test_whitespace_text(self) -> None:
        """Text that is empty after whitespace normalization is rejected."""
        with pytest.raises(ValueError, match="empty text"):
            Document(doc_id="a", text=" \n\t ")


class TestTokenSeq:
    """Test TokenSeq invariants."""

    def test_overlapping_offsets_rejected(self) -> None:
        """Offsets must not overlap."""
        with pytest.raises(ValueError, match="offsets"):
            TokenSeq(tokens=("ab", "b"), offsets=((0, 2), (1, 2)))

    def test_length_mismatch_rejected(self) -> None:
        """Tokens and offsets must pair up."""
        with pytest.raises(ValueError, match="equal length"):
            TokenSeq(tokens=("a",), offsets=())


class TestNode:
    """Test Node round rules."""

    def test_chunk_round_must_be_zero(self) -> None:
        """Chunks live in round 0."""
        with pytest.raises(ValueError, match="round 0"):
            Node(node_id="c", kind=NodeKind.CHUNK, text="t", init_embedding=(1.0,), round=2)

    def test_response_round_positive(self) -> None:
        """Responses have round >= 1."""
        with pytest.raises(ValueError, match="round >= 1"):
            Node(node_id="r", kind=NodeKind.RESPONSE, text="t", init_embedding=(1.0,))


class TestGraphOfRecords:
    """Test referential integrity of graphs."""

    def test_lookup_and_partitions(self) -> None:
        """Nodes are addressable by id and partitioned by kind."""
        g = GraphOfRecords(
            doc_id="d",
            nodes=(_chunk("c0"), _chunk("c1"), _response("r1", 1)),
            edges=(Edge("c0", "r1"), Edge("c1", "r1")),
            training_pairs=(TrainingPair("q?", "c0"),),
        )
        assert g.node_index("r1") == 2
        assert g.node("c1").text == "c1"
        assert [n.node_id for n in g.chunk_nodes] == ["c0", "c1"]
        assert [n.node_id for n in g.response_nodes] == ["r1"]
        np.testing.assert_array_equal(g.embedding_matrix(), [[1, 0], [1, 0], [0, 1]])

    def test_duplicate_node_id(self) -> None:
        """Node ids are unique within a graph."""
        with pytest.raises(ValueError, match="Duplicate node id 'c0'"):
            GraphOfRecords("d", (_chunk("c0"), _chunk("c0")), (), ())

    def test_dangling_edge(self) -> None:
        """Edge endpoints must be nodes."""
        with pytest.raises(ValueError, match="'ghost'"):
            GraphOfRecords("d", (_chunk("c0"),), (Edge("ghost", "c0"),), ())

    def test_label_must_be_chunk(self) -> None:
        """Training labels must name chunk nodes."""
        with pytest.raises(ValueError, match="not a chunk node"):
            GraphOfRecords(
                "d", (_chunk("c0"), _response("r1", 1)), (), (TrainingPair("q?", "r1"),)
            )

    def test_self_loop_flag(self) -> None:
        """Edges know when they are self-loops."""
        assert Edge("a", "a").is_self_loop
        assert not Edge("a", "b").is_self_loop


class TestRankingList:
    """Test RankingList invariants."""

    def test_positive_is_first(self) -> None:
        """Position 0 is the positive."""
        ranking = RankingList(pair_index=0, ordered_nodes=("b", "a"), scores=(0.9, 0.1))
        assert ranking.positive == "b"

    def test_repeated_node_rejected(self) -> None:
        """A node appears at most once."""
        with pytest.raises(ValueError, match="repeat"):
            RankingList(pair_index=0, ordered_nodes=("a", "a"), scores=(0.5, 0.5))

    def test_increasing_scores_rejected(self) -> None:
        """Scores are non-increasing."""
        with pytest.raises(ValueError, match="non-increasing"):
            RankingList(pair_index=0, ordered_nodes=("a", "b"), scores=(0.1, 0.2))
