"""Small generated corpora and graphs for offline runs and tests.

Words are drawn from a seeded syllable generator and never repeat within a
corpus, so chunks of different documents share no vocabulary.
"""

from collections.abc import Iterator

import numpy as np

from graph_of_records.corpus.chunking import chunk_id_for
from graph_of_records.corpus.tokenize import first_tokens
from graph_of_records.domain.types import (
    Chunk,
    Document,
    Edge,
    GraphOfRecords,
    Node,
    NodeKind,
    TrainingPair,
)
from graph_of_records.grecords.construction import response_id_for
from graph_of_records.providers.embedding import EmbeddingProvider
from graph_of_records.providers.llm import CannedBackend, LlmClient, simulate_query

_SYLLABLES = (
    "ka", "lo", "mi", "ne", "tu", "ra", "vi", "so", "pe", "du",
    "ga", "fi", "zo", "be", "ch", "an", "or", "il", "ux", "em",
)  # fmt: skip


def unique_words(seed: int) -> Iterator[str]:
    """Endless stream of distinct lowercase words."""
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    while True:
        length = int(rng.integers(2, 5))
        word = "".join(_SYLLABLES[int(i)] for i in rng.integers(0, len(_SYLLABLES), size=length))
        if word not in seen:
            seen.add(word)
            yield word


def synthetic_documents(
    n_docs: int = 3,
    words_per_doc: int = 1200,
    seed: int = 0,
    sentence_length: int = 12,
) -> list[Document]:
    """Documents of unique words grouped into sentences, each with two reference summaries.

    The first reference is the opening sentence of every paragraph-sized
    stretch; the second is the document's first sentence alone.
    """
    if n_docs < 1 or words_per_doc < 1:
        raise ValueError(f"need n_docs >= 1 and words_per_doc >= 1, got {n_docs}, {words_per_doc}")
    words = unique_words(seed)
    documents = []
    for d in range(n_docs):
        tokens = [next(words) for _ in range(words_per_doc)]
        sentences = [
            " ".join(tokens[i : i + sentence_length]).capitalize() + "."
            for i in range(0, len(tokens), sentence_length)
        ]
        summary = " ".join(sentences[::10])
        documents.append(
            Document(
                doc_id=f"doc-{d:02d}",
                text=" ".join(sentences),
                reference_summaries=(summary, sentences[0]),
            )
        )
    return documents


def _node(node_id: str, kind: NodeKind, text: str, embedder: EmbeddingProvider, rnd: int) -> Node:
    vector = embedder.embed_context(text)
    return Node(
        node_id=node_id,
        kind=kind,
        text=text,
        init_embedding=tuple(float(x) for x in vector.tolist()),
        round=rnd,
    )


def separable_graph(
    doc_id: str,
    words: Iterator[str],
    embedder: EmbeddingProvider,
    llm: LlmClient,
    n_chunks: int = 10,
    chunk_tokens: int = 16,
) -> tuple[GraphOfRecords, Document]:
    """One graph of ``n_chunks`` chunks and two responses, plus its document.

    The first response is generated from the first half of the chunks, the
    second from the rest and from the first response. Every chunk is the
    label of exactly one simulated query.
    """
    texts = [" ".join(next(words) for _ in range(chunk_tokens)) for _ in range(n_chunks)]
    chunks = [
        Chunk(
            chunk_id=chunk_id_for(doc_id, i),
            doc_id=doc_id,
            token_span=(i * chunk_tokens, (i + 1) * chunk_tokens),
            text=text,
        )
        for i, text in enumerate(texts)
    ]
    half = n_chunks // 2
    r1_text = " ".join(first_tokens(t, 4) for t in texts[:half])
    r2_text = " ".join(first_tokens(t, 4) for t in texts[half:])

    nodes = [_node(c.chunk_id, NodeKind.CHUNK, c.text, embedder, 0) for c in chunks]
    r1, r2 = response_id_for(doc_id, 1), response_id_for(doc_id, 2)
    nodes.append(_node(r1, NodeKind.RESPONSE, r1_text, embedder, 1))
    nodes.append(_node(r2, NodeKind.RESPONSE, r2_text, embedder, 2))

    edges = [Edge(c.chunk_id, r1) for c in chunks[:half]]
    edges += [Edge(c.chunk_id, r2) for c in chunks[half:]]
    edges.append(Edge(r1, r2))
    pairs = [TrainingPair(simulate_query(c, llm), c.chunk_id) for c in chunks]

    graph = GraphOfRecords(
        doc_id=doc_id, nodes=tuple(nodes), edges=tuple(edges), training_pairs=tuple(pairs)
    )
    document = Document(
        doc_id=doc_id, text=" ".join(texts), reference_summaries=(f"{r1_text} {r2_text}",)
    )
    return graph, document


def separable_fixture(
    embedder: EmbeddingProvider,
    n_graphs: int = 8,
    n_chunks: int = 10,
    chunk_tokens: int = 16,
    seed: int = 7,
) -> tuple[list[GraphOfRecords], list[Document]]:
    """Graphs whose simulated queries share tokens only with their label chunk and responses.

    With the default sizes every graph has 12 nodes and 10 training pairs.
    """
    words = unique_words(seed)
    llm = LlmClient(CannedBackend())
    graphs, documents = [], []
    for g in range(n_graphs):
        graph, document = separable_graph(
            f"fixture-{g:02d}", words, embedder, llm, n_chunks, chunk_tokens
        )
        graphs.append(graph)
        documents.append(document)
    return graphs, documents
