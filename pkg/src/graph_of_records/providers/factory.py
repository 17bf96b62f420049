"""Construct the provider bundle for a settings object."""

from dataclasses import dataclass

from graph_of_records.providers.embedding import (
    DeterministicEmbedder,
    EmbeddingProvider,
    HttpEmbedder,
)
from graph_of_records.providers.llm import CannedBackend, HttpChatBackend, LlmClient, ResponseCache
from graph_of_records.providers.settings import ProviderMode, ProviderSettings
from graph_of_records.providers.tokens import (
    DeterministicTokenEmbedder,
    HttpTokenEmbedder,
    TokenEmbedder,
)


@dataclass(frozen=True, slots=True)
class Providers:
    """The three external capabilities the pipeline depends on."""

    embedder: EmbeddingProvider
    token_embedder: TokenEmbedder
    llm: LlmClient


def build_providers(settings: ProviderSettings) -> Providers:
    """Instantiate live or deterministic providers per ``settings.mode``."""
    cache = ResponseCache(settings.cache_path)

    if settings.mode == ProviderMode.LIVE:
        return Providers(
            embedder=HttpEmbedder(settings),
            token_embedder=HttpTokenEmbedder(settings),
            llm=LlmClient(HttpChatBackend(settings), cache),
        )

    return Providers(
        embedder=DeterministicEmbedder(settings.dimension),
        token_embedder=DeterministicTokenEmbedder(settings.token_dim),
        llm=LlmClient(CannedBackend(), cache),
    )
