"""External capabilities: retriever encoders, token embedder and LLM."""

from graph_of_records.providers.embedding import (
    DeterministicEmbedder,
    EmbeddingProvider,
    HttpEmbedder,
)
from graph_of_records.providers.factory import Providers, build_providers
from graph_of_records.providers.llm import (
    CannedBackend,
    HttpChatBackend,
    LlmClient,
    ResponseCache,
    simulate_query,
)
from graph_of_records.providers.prompts import build_query_simulation_prompt, build_rag_prompt
from graph_of_records.providers.settings import ProviderMode, ProviderSettings
from graph_of_records.providers.tokens import (
    DeterministicTokenEmbedder,
    HttpTokenEmbedder,
    TokenEmbedder,
)

__all__ = [
    "CannedBackend",
    "DeterministicEmbedder",
    "DeterministicTokenEmbedder",
    "EmbeddingProvider",
    "HttpChatBackend",
    "HttpEmbedder",
    "HttpTokenEmbedder",
    "LlmClient",
    "ProviderMode",
    "ProviderSettings",
    "Providers",
    "ResponseCache",
    "TokenEmbedder",
    "build_providers",
    "build_query_simulation_prompt",
    "build_rag_prompt",
    "simulate_query",
]
