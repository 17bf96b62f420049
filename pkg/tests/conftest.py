"""Shared test fixtures for graph_of_records tests."""

from collections.abc import Callable
from pathlib import Path

import pytest

from graph_of_records.corpus.loading import dump_documents
from graph_of_records.domain.types import Document
from graph_of_records.providers.embedding import DeterministicEmbedder
from graph_of_records.providers.factory import Providers
from graph_of_records.providers.llm import CannedBackend, LlmClient
from graph_of_records.providers.tokens import DeterministicTokenEmbedder

SMALL_DIM = 16
SMALL_TOKEN_DIM = 16


@pytest.fixture
def embedder() -> DeterministicEmbedder:
    return DeterministicEmbedder(SMALL_DIM)


@pytest.fixture
def token_embedder() -> DeterministicTokenEmbedder:
    return DeterministicTokenEmbedder(SMALL_TOKEN_DIM)


@pytest.fixture
def canned_llm() -> LlmClient:
    return LlmClient(CannedBackend())


@pytest.fixture
def small_providers() -> Providers:
    return Providers(
        embedder=DeterministicEmbedder(SMALL_DIM),
        token_embedder=DeterministicTokenEmbedder(SMALL_TOKEN_DIM),
        llm=LlmClient(CannedBackend()),
    )


@pytest.fixture
def dataset_writer() -> Callable[[Path, list[Document]], Path]:
    """Writes documents as a JSON-lines dataset and returns its path."""

    def write(path: Path, documents: list[Document]) -> Path:
        dump_documents(documents, path)
        return path

    return write
