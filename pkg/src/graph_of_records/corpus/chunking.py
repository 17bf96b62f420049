"""Sliding-window chunking of documents into retrieval units."""

import math
from dataclasses import dataclass

from graph_of_records.corpus.tokenize import Tokenizer, tokenize
from graph_of_records.domain.types import Chunk, Document

DEFAULT_CHUNK_SIZE = 256
DEFAULT_OVERLAP = 32


@dataclass(frozen=True, slots=True, kw_only=True)
class ChunkingConfig:
    """Window size and overlap, in tokens."""

    chunk_size: int = DEFAULT_CHUNK_SIZE
    overlap: int = DEFAULT_OVERLAP

    def __post_init__(self) -> None:
        """Validate configuration after construction."""
        if self.overlap < 0:
            raise ValueError(f"overlap must be >= 0, got {self.overlap}")
        if self.chunk_size <= self.overlap:
            raise ValueError(
                f"chunk_size ({self.chunk_size}) must exceed overlap ({self.overlap})"
            )


def chunk_id_for(doc_id: str, index: int) -> str:
    """Stable chunk id: ``{doc_id}#c{index}``."""
    return f"{doc_id}#c{index}"


def expected_chunk_count(n_tokens: int, chunk_size: int, overlap: int) -> int:
    """Number of windows split_chunks produces for an n-token document."""
    stride = chunk_size - overlap
    return math.ceil(max(n_tokens - overlap, 1) / stride)


def split_chunks(
    doc: Document,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_OVERLAP,
    tokenizer: Tokenizer = tokenize,
) -> list[Chunk]:
    """Split a document into overlapping token windows.

    Windows advance by ``chunk_size - overlap`` tokens. The final window is kept
    even when it is shorter than ``chunk_size``.

    Args:
        doc: Document to split.
        chunk_size: Maximum tokens per chunk.
        overlap: Tokens shared by consecutive chunks.
        tokenizer: Tokenizer producing offsets into ``doc.text``.

    Returns:
        Chunks in document order.

    Raises:
        ValueError: If chunk_size <= overlap or overlap < 0.
    """
    if overlap < 0:
        raise ValueError(f"overlap must be >= 0, got {overlap}")
    if chunk_size <= overlap:
        raise ValueError(
            f"chunk_size ({chunk_size}) must exceed overlap ({overlap}); stride would be <= 0"
        )

    seq = tokenizer(doc.text)
    n_tokens = len(seq)
    stride = chunk_size - overlap

    chunks: list[Chunk] = []
    start = 0
    while True:
        end = min(start + chunk_size, n_tokens)
        text = doc.text[seq.offsets[start][0] : seq.offsets[end - 1][1]]
        chunks.append(
            Chunk(
                chunk_id=chunk_id_for(doc.doc_id, len(chunks)),
                doc_id=doc.doc_id,
                token_span=(start, end),
                text=text,
            )
        )
        if end >= n_tokens:
            break
        start += stride

    return chunks
