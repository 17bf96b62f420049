"""Graph construction by simulated retrieve-then-generate rounds.

Round i simulates a query from a random chunk, retrieves the top k nodes from
the chunks plus responses r_1..r_{i-1}, generates r_i from them, and wires an
edge from every retrieved node to r_i.
"""

import logging
from collections.abc import Sequence

import numpy as np

from graph_of_records.domain.types import Chunk, Edge, GraphOfRecords, Node, NodeKind, TrainingPair
from graph_of_records.errors import GorError, GraphBuildError, QueryDedupError
from graph_of_records.grecords.retrieval import DEFAULT_TOP_K, top_k_indices
from graph_of_records.providers.embedding import EmbeddingProvider
from graph_of_records.providers.llm import SIMULATION_TEMPERATURE, LlmClient, simulate_query
from graph_of_records.providers.prompts import build_rag_prompt

logger = logging.getLogger(__name__)

DEFAULT_N_QUERIES = 30
MAX_QUERY_RESAMPLES = 10


def response_id_for(doc_id: str, round_index: int) -> str:
    """Stable response node id: ``{doc_id}#r{round}``."""
    return f"{doc_id}#r{round_index}"


def add_self_loops(nodes: Sequence[Node], edges: list[Edge]) -> list[Edge]:
    """Append a self-loop for every node that is not an endpoint of any edge."""
    touched = {e.src for e in edges} | {e.dst for e in edges}
    return edges + [Edge(n.node_id, n.node_id) for n in nodes if n.node_id not in touched]


def _as_tuple(vector: np.ndarray) -> tuple[float, ...]:
    return tuple(float(x) for x in vector.tolist())


def build_graph(
    chunks: Sequence[Chunk],
    llm: LlmClient,
    emb: EmbeddingProvider,
    n_queries: int = DEFAULT_N_QUERIES,
    k: int = DEFAULT_TOP_K,
    seed: int = 0,
    *,
    simulation_temperature: float = SIMULATION_TEMPERATURE,
    generation_temperature: float = 0.0,
    max_resamples: int = MAX_QUERY_RESAMPLES,
) -> GraphOfRecords:
    """Build the graph of records for one document.

    Args:
        chunks: The document's chunks, in order.
        llm: LLM used for query simulation and response generation.
        emb: Retriever used for retrieval and node embeddings.
        n_queries: Number of simulated queries (and response nodes).
        k: Nodes retrieved per round.
        seed: Seed for chunk sampling.
        simulation_temperature: Sampling temperature for query simulation.
        generation_temperature: Temperature for response generation.
        max_resamples: Attempts per round to find a query not seen before.

    Returns:
        Graph with |chunks| + n_queries nodes and one training pair per query.

    Raises:
        ValueError: If chunks is empty or n_queries < 1.
        QueryDedupError: No new query within ``max_resamples`` attempts.
        GraphBuildError: Provider failure, naming the failing round.
    """
    if not chunks:
        raise ValueError("build_graph needs at least one chunk")
    if n_queries < 1:
        raise ValueError(f"n_queries must be >= 1, got {n_queries}")
    doc_id = chunks[0].doc_id

    try:
        chunk_vectors = emb.embed_contexts([c.text for c in chunks])
    except GorError as e:
        raise GraphBuildError(doc_id, f"embedding chunks failed: {e}") from e

    nodes: list[Node] = [
        Node(node_id=c.chunk_id, kind=NodeKind.CHUNK, text=c.text, init_embedding=_as_tuple(v))
        for c, v in zip(chunks, chunk_vectors, strict=True)
    ]
    corpus = [np.asarray(v, dtype=np.float64) for v in chunk_vectors]
    edges: list[Edge] = []
    pairs: list[TrainingPair] = []
    seen_queries: set[str] = set()
    rng = np.random.default_rng(seed)

    for round_index in range(1, n_queries + 1):
        try:
            # Step 1: simulate a query not asked before
            for attempt in range(max_resamples):
                source = chunks[int(rng.integers(len(chunks)))]
                query = simulate_query(
                    source, llm, simulation_temperature, salt=f"{round_index}:{attempt}"
                )
                if query.casefold() not in seen_queries:
                    break
            else:
                raise QueryDedupError(
                    doc_id,
                    f"no new query after {max_resamples} attempts",
                    round_index,
                )
            seen_queries.add(query.casefold())

            # Step 2: retrieve over chunks plus earlier responses
            scores = np.stack(corpus) @ emb.embed_query(query)
            retrieved = top_k_indices(scores, k)

            # Step 3: generate the response from the retrieved materials
            prompt = build_rag_prompt(query, [nodes[i].text for i in retrieved])
            response = llm.generate(prompt, generation_temperature)
            response_vector = emb.embed_context(response)
        except QueryDedupError:
            raise
        except GorError as e:
            raise GraphBuildError(doc_id, str(e), round_index) from e

        # Step 4: add r_i, its provenance edges and the training pair
        response_id = response_id_for(doc_id, round_index)
        nodes.append(
            Node(
                node_id=response_id,
                kind=NodeKind.RESPONSE,
                text=response,
                init_embedding=_as_tuple(response_vector),
                round=round_index,
            )
        )
        corpus.append(np.asarray(response_vector, dtype=np.float64))
        edges.extend(Edge(nodes[i].node_id, response_id) for i in retrieved)
        pairs.append(TrainingPair(query=query, label_chunk_id=source.chunk_id))
        logger.debug("%s round %d: retrieved %d nodes", doc_id, round_index, len(retrieved))

    edges = add_self_loops(nodes, edges)
    logger.info("Built graph for %s: %d nodes, %d edges", doc_id, len(nodes), len(edges))
    return GraphOfRecords(
        doc_id=doc_id,
        nodes=tuple(nodes),
        edges=tuple(edges),
        training_pairs=tuple(pairs),
    )
