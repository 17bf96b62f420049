"""Tests for retrieval from the graph and summary generation."""

import numpy as np
import pytest

from graph_of_records.domain.types import Edge, GraphOfRecords, Node, NodeKind
from graph_of_records.errors import DimensionMismatchError, RetrievalError
from graph_of_records.inference import (
    UNTRAINED_CHECKPOINT,
    NodeEmbeddingCache,
    graph_fingerprint,
    initial_embeddings,
    node_embeddings_for_inference,
    retrieve_top_k,
    summarize,
    summary_record,
)
from graph_of_records.neuralnet.checkpoint import model_fingerprint
from graph_of_records.neuralnet.gat import GatConfig, GatModel, identity_model, initialize_model
from graph_of_records.providers.llm import LlmClient

DIM = 4


class FixedQueryEmbedder:
    """Query embedder that always returns one vector."""

    def __init__(self, vector: np.ndarray) -> None:
        self.vector = np.asarray(vector, dtype=np.float64)
        self.dimension = self.vector.shape[0]

    def embed_query(self, text: str) -> np.ndarray:
        return self.vector


def _model(seed: int = 0) -> GatModel:
    return initialize_model(GatConfig(in_dim=DIM, heads=2, hidden_per_head=2, out_dim=DIM), seed)


def _random_graph(rng: np.random.Generator, n_chunks: int, n_responses: int) -> GraphOfRecords:
    """Random graph whose last two chunks are isolated twins, so their scores tie."""
    features = rng.normal(size=(n_chunks + n_responses, DIM))
    features[n_chunks - 1] = features[n_chunks - 2]
    nodes = [
        Node(f"c{i}", NodeKind.CHUNK, f"chunk text {i}", tuple(features[i].tolist()))
        for i in range(n_chunks)
    ]
    nodes += [
        Node(
            f"r{j + 1}",
            NodeKind.RESPONSE,
            f"response text {j + 1}",
            tuple(features[n_chunks + j].tolist()),
            round=j + 1,
        )
        for j in range(n_responses)
    ]
    edges = [Edge(f"c{i}", f"r{j + 1}") for j in range(n_responses) for i in range(n_chunks - 2)]
    edges += [Edge(f"c{i}", f"c{i}") for i in (n_chunks - 2, n_chunks - 1)]
    return GraphOfRecords(doc_id="doc", nodes=tuple(nodes), edges=tuple(edges), training_pairs=())


def _oracle(scores: np.ndarray, k: int) -> list[int]:
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))[:k]


class TestRetrieveTopK:
    """Tests for retrieve_top_k."""

    def test_matches_brute_force(self) -> None:
        """200 random instances agree with a sort on (-score, index)."""
        rng = np.random.default_rng(0)
        for instance in range(200):
            g = _random_graph(rng, int(rng.integers(3, 8)), int(rng.integers(1, 4)))
            model = _model(instance)
            q = rng.normal(size=DIM)
            k = int(rng.integers(1, len(g.nodes) + 2))
            embeddings = node_embeddings_for_inference(g, model)
            expected = [g.nodes[i].node_id for i in _oracle(embeddings @ q, k)]
            result = retrieve_top_k("q", g, model, FixedQueryEmbedder(q), k)
            assert list(result.node_ids) == expected
            assert len(result.node_ids) == min(k, len(g.nodes))

    def test_ties_keep_node_order(self) -> None:
        """Twin nodes tie and come back in ascending node order."""
        twin = (0.5, 0.25, 0.0, 1.0)
        nodes = (
            Node("c0", NodeKind.CHUNK, "a", (0.1, 0.1, 0.1, 0.1)),
            Node("c1", NodeKind.CHUNK, "b", twin),
            Node("c2", NodeKind.CHUNK, "c", twin),
            Node("c3", NodeKind.CHUNK, "d", (2.0, 0.0, 0.0, 0.0)),
        )
        g = GraphOfRecords(
            doc_id="doc",
            nodes=nodes,
            edges=tuple(Edge(n.node_id, n.node_id) for n in nodes),
            training_pairs=(),
        )
        model = identity_model(GatConfig(in_dim=DIM, heads=2, hidden_per_head=2, out_dim=DIM))
        result = retrieve_top_k("q", g, model, FixedQueryEmbedder(np.array(twin)), 4)
        assert result.node_ids == ("c1", "c2", "c3", "c0")
        assert result.scores[0] == result.scores[1]

    @pytest.mark.parametrize("scale", [0.5, 2.0, 8.0])
    def test_invariant_to_positive_query_scaling(self, scale: float) -> None:
        """Scaling the query by a positive factor keeps the ranking."""
        rng = np.random.default_rng(2)
        for instance in range(20):
            g = _random_graph(rng, 6, 2)
            model = _model(instance)
            q = rng.normal(size=DIM)
            base = retrieve_top_k("q", g, model, FixedQueryEmbedder(q), 6)
            scaled = retrieve_top_k("q", g, model, FixedQueryEmbedder(q * scale), 6)
            assert scaled.node_ids == base.node_ids

    def test_scores_descending(self) -> None:
        """Scores come back best first."""
        g = _random_graph(np.random.default_rng(3), 5, 2)
        result = retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 7)
        assert list(result.scores) == sorted(result.scores, reverse=True)

    def test_k_one(self) -> None:
        """k = 1 returns a single node."""
        g = _random_graph(np.random.default_rng(4), 5, 2)
        result = retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 1)
        assert len(result.node_ids) == 1

    def test_untrained_scores_initial_embeddings(self) -> None:
        """Without a model nodes rank by the dot of their initial embeddings with the query."""
        rng = np.random.default_rng(5)
        g = _random_graph(rng, 5, 2)
        q = rng.normal(size=DIM)
        features = np.array([n.init_embedding for n in g.nodes])
        expected = [g.nodes[i].node_id for i in _oracle(features @ q, 3)]
        result = retrieve_top_k("q", g, None, FixedQueryEmbedder(q), 3)
        assert list(result.node_ids) == expected

    def test_k_zero(self) -> None:
        """k must be positive."""
        g = _random_graph(np.random.default_rng(4), 3, 1)
        with pytest.raises(ValueError, match="k must be"):
            retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 0)

    def test_chunks_only(self) -> None:
        """Responses are skipped when only chunks are retrievable."""
        g = _random_graph(np.random.default_rng(5), 4, 3)
        result = retrieve_top_k(
            "q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 10, chunks_only=True
        )
        assert sorted(result.node_ids) == ["c0", "c1", "c2", "c3"]

    def test_chunks_only_without_chunks(self) -> None:
        """A graph of responses has nothing to retrieve in chunk-only mode."""
        g = GraphOfRecords(
            doc_id="doc",
            nodes=(Node("r1", NodeKind.RESPONSE, "text", (1.0, 0.0, 0.0, 0.0), round=1),),
            edges=(Edge("r1", "r1"),),
            training_pairs=(),
        )
        with pytest.raises(RetrievalError, match="no chunk nodes"):
            retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 1, chunks_only=True)

    def test_query_width_mismatch(self) -> None:
        """Query and node widths must agree."""
        g = _random_graph(np.random.default_rng(6), 3, 1)
        with pytest.raises(DimensionMismatchError, match="Query embedding width 3"):
            retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(3)), 1)

    def test_graph_width_mismatch(self) -> None:
        """Graph features must match the checkpoint input width."""
        g = _random_graph(np.random.default_rng(7), 3, 1)
        model = initialize_model(GatConfig(in_dim=6, heads=2, hidden_per_head=2, out_dim=DIM), 0)
        with pytest.raises(DimensionMismatchError, match="checkpoint expects 6"):
            retrieve_top_k("q", g, model, FixedQueryEmbedder(np.ones(DIM)), 1)

    def test_empty_graph(self) -> None:
        """A graph without nodes is a retrieval error."""
        g = GraphOfRecords(doc_id="empty", nodes=(), edges=(), training_pairs=())
        with pytest.raises(RetrievalError, match="no nodes"):
            retrieve_top_k("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), 1)


class TestNodeEmbeddingCache:
    """Tests for the per-(graph, checkpoint) embedding cache."""

    def test_hits_and_misses(self) -> None:
        """Repeated lookups reuse the matrix; a new checkpoint recomputes."""
        g = _random_graph(np.random.default_rng(8), 4, 1)
        cache = NodeEmbeddingCache()
        first = node_embeddings_for_inference(g, _model(0), cache)
        second = node_embeddings_for_inference(g, _model(0), cache)
        assert first is second
        assert cache.misses == 1
        node_embeddings_for_inference(g, _model(1), cache)
        assert cache.misses == 2
        assert len(cache) == 2

    def test_read_only(self) -> None:
        """Cached matrices cannot be modified."""
        g = _random_graph(np.random.default_rng(9), 3, 1)
        embeddings = node_embeddings_for_inference(g, _model(), NodeEmbeddingCache())
        with pytest.raises(ValueError):
            embeddings[0, 0] = 1.0

    def test_initial_embeddings_bypass_cache(self) -> None:
        """Without a model the read-only initial embeddings come back and nothing is cached."""
        g = _random_graph(np.random.default_rng(14), 3, 1)
        cache = NodeEmbeddingCache()
        embeddings = node_embeddings_for_inference(g, None, cache)
        np.testing.assert_array_equal(embeddings, initial_embeddings(g))
        assert embeddings.shape == (4, DIM)
        assert len(cache) == 0
        assert not embeddings.flags.writeable

    def test_fingerprint_tracks_graph(self) -> None:
        """Different graphs have different fingerprints."""
        rng = np.random.default_rng(10)
        assert graph_fingerprint(_random_graph(rng, 3, 1)) != graph_fingerprint(
            _random_graph(rng, 3, 1)
        )


class TestSummarize:
    """Tests for summarize and summary_record."""

    def test_summary_from_best_nodes(self, canned_llm: LlmClient) -> None:
        """The canned generator echoes the best node first."""
        g = _random_graph(np.random.default_rng(11), 4, 2)
        model = _model()
        embedder = FixedQueryEmbedder(np.ones(DIM))
        result = summarize("What happened?", g, model, embedder, canned_llm, k=2)
        best = g.node(result.retrieval.node_ids[0]).text
        assert result.summary.startswith(f"SUMMARY[{best}")
        assert result.checkpoint_hash == model_fingerprint(model)

    def test_record_fields(self, canned_llm: LlmClient) -> None:
        """Records carry the query, summary, retrieved nodes and checkpoint hash."""
        g = _random_graph(np.random.default_rng(12), 4, 2)
        result = summarize("q", g, _model(), FixedQueryEmbedder(np.ones(DIM)), canned_llm, k=3)
        record = summary_record(result, g)
        assert set(record) == {"doc_id", "query", "summary", "retrieved", "checkpoint_hash"}
        assert len(record["retrieved"]) == 3
        assert {r["kind"] for r in record["retrieved"]} <= {"chunk", "response"}
        assert record["query"] == "q"

    def test_untrained_summary(self, canned_llm: LlmClient) -> None:
        """Untrained summaries record the untrained marker instead of a fingerprint."""
        g = _random_graph(np.random.default_rng(13), 4, 2)
        result = summarize("q", g, None, FixedQueryEmbedder(np.ones(DIM)), canned_llm, k=2)
        assert result.checkpoint_hash == UNTRAINED_CHECKPOINT
        assert summary_record(result, g)["checkpoint_hash"] == "untrained"
