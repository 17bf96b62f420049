"""Dual-encoder retriever embeddings: E_q for queries, E_c for contexts.

The deterministic provider sums seeded pseudo-random token directions over the
token multiset and L2-normalizes the result, so texts that share tokens get
correlated vectors and identical texts get identical vectors in every process.
"""

from collections import Counter
from functools import lru_cache
from typing import Protocol, runtime_checkable

import numpy as np

from graph_of_records.corpus.tokenize import tokenize
from graph_of_records.domain.types import FloatArray
from graph_of_records.errors import ProviderResponseError
from graph_of_records.providers.auth import EMBED_API_KEY_ENV, EMBED_BASE_URL_ENV
from graph_of_records.providers.auth import get_api_key, resolve_base_url
from graph_of_records.providers.http import post_json
from graph_of_records.providers.settings import ProviderSettings
from graph_of_records.utils.seeds import stable_hash64


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Retriever encoders producing ``dimension``-wide vectors."""

    @property
    def dimension(self) -> int: ...

    def embed_query(self, q: str) -> FloatArray: ...

    def embed_context(self, c: str) -> FloatArray: ...

    def embed_contexts(self, texts: list[str]) -> FloatArray: ...


def _require_text(text: str) -> None:
    if not text.strip():
        raise ValueError("Cannot embed empty text")


@lru_cache(maxsize=65536)
def token_direction(token: str, dim: int, namespace: str) -> FloatArray:
    """Seeded Gaussian direction for one token. Read-only; do not mutate."""
    seed = stable_hash64(f"{namespace}\x1f{dim}\x1f{token}")
    vector = np.random.default_rng(seed).standard_normal(dim)
    vector.flags.writeable = False
    return vector


class DeterministicEmbedder:
    """Offline E_q / E_c: normalized sum of hashed token directions."""

    def __init__(self, dimension: int = 768) -> None:
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        return self._dimension

    def _embed(self, text: str) -> FloatArray:
        _require_text(text)
        counts = Counter(token.casefold() for token in tokenize(text).tokens)
        vector = np.zeros(self._dimension, dtype=np.float64)
        for token in sorted(counts):
            vector += counts[token] * token_direction(token, self._dimension, "retriever")
        norm = float(np.linalg.norm(vector))
        return vector / norm if norm > 0.0 else vector

    def embed_query(self, q: str) -> FloatArray:
        return self._embed(q)

    def embed_context(self, c: str) -> FloatArray:
        return self._embed(c)

    def embed_contexts(self, texts: list[str]) -> FloatArray:
        if not texts:
            return np.zeros((0, self._dimension), dtype=np.float64)
        return np.stack([self._embed(t) for t in texts])


class HttpEmbedder:
    """Live E_q / E_c over an OpenAI-style ``/embeddings`` endpoint.

    Raw vectors are returned unnormalized; dot products follow the retriever.
    """

    def __init__(self, settings: ProviderSettings) -> None:
        self._settings = settings
        self._url = f"{resolve_base_url(settings.embed_base_url, EMBED_BASE_URL_ENV)}/embeddings"
        self._api_key = get_api_key(EMBED_API_KEY_ENV)

    @property
    def dimension(self) -> int:
        return self._settings.dimension

    def _request(self, texts: list[str], input_type: str) -> FloatArray:
        payload = {"model": self._settings.embed_model, "input": texts, "input_type": input_type}
        body = post_json(
            self._url,
            payload,
            self._api_key,
            timeout=self._settings.timeout_seconds,
            max_attempts=self._settings.max_attempts,
            backoff_seconds=self._settings.backoff_seconds,
        )
        try:
            rows = sorted(body["data"], key=lambda item: item["index"])
            matrix = np.array([row["embedding"] for row in rows], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise ProviderResponseError(f"Malformed embeddings response: {e}") from e

        if matrix.shape != (len(texts), self.dimension):
            raise ProviderResponseError(
                f"Expected {len(texts)} x {self.dimension} embeddings, got {matrix.shape}"
            )
        if not np.all(np.isfinite(matrix)):
            raise ProviderResponseError("Embeddings response contains non-finite values")
        return matrix

    def embed_query(self, q: str) -> FloatArray:
        _require_text(q)
        return self._request([q], "query")[0]

    def embed_context(self, c: str) -> FloatArray:
        _require_text(c)
        return self._request([c], "passage")[0]

    def embed_contexts(self, texts: list[str]) -> FloatArray:
        if not texts:
            return np.zeros((0, self.dimension), dtype=np.float64)
        for text in texts:
            _require_text(text)
        return self._request(texts, "passage")
