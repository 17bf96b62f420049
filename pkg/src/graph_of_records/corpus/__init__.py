"""Document ingestion, tokenization and chunking."""

from graph_of_records.corpus.chunking import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_OVERLAP,
    ChunkingConfig,
    chunk_id_for,
    expected_chunk_count,
    split_chunks,
)
from graph_of_records.corpus.loading import dump_documents, load_documents
from graph_of_records.corpus.tokenize import Tokenizer, first_tokens, tokenize

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_OVERLAP",
    "ChunkingConfig",
    "Tokenizer",
    "chunk_id_for",
    "dump_documents",
    "expected_chunk_count",
    "first_tokens",
    "load_documents",
    "split_chunks",
    "tokenize",
]
