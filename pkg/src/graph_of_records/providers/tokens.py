"""Token-level embedders: the substrate BERTScore matches over."""

from typing import Protocol, runtime_checkable

import numpy as np

from graph_of_records.corpus.tokenize import tokenize
from graph_of_records.domain.types import FloatArray
from graph_of_records.errors import ProviderResponseError
from graph_of_records.providers.auth import EMBED_API_KEY_ENV, EMBED_BASE_URL_ENV
from graph_of_records.providers.auth import get_api_key, resolve_base_url
from graph_of_records.providers.embedding import token_direction
from graph_of_records.providers.http import post_json
from graph_of_records.providers.settings import ProviderSettings


@runtime_checkable
class TokenEmbedder(Protocol):
    """One unit-norm row per token of ``tokenize(text)``."""

    @property
    def token_dim(self) -> int: ...

    def embed_tokens(self, text: str) -> FloatArray: ...


def _unit_rows(matrix: FloatArray) -> FloatArray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix / np.where(norms > 0.0, norms, 1.0)


class DeterministicTokenEmbedder:
    """Context-free token vectors drawn from a seeded generator per token."""

    def __init__(self, token_dim: int = 128) -> None:
        if token_dim < 1:
            raise ValueError(f"token_dim must be >= 1, got {token_dim}")
        self._token_dim = token_dim

    @property
    def token_dim(self) -> int:
        return self._token_dim

    def embed_tokens(self, text: str) -> FloatArray:
        tokens = tokenize(text).tokens
        if not tokens:
            return np.zeros((0, self._token_dim), dtype=np.float64)
        rows = np.stack([token_direction(t.casefold(), self._token_dim, "token") for t in tokens])
        return _unit_rows(rows)


class HttpTokenEmbedder:
    """Live token vectors: each token embedded through the ``/embeddings`` endpoint."""

    def __init__(self, settings: ProviderSettings) -> None:
        self._settings = settings
        self._url = f"{resolve_base_url(settings.embed_base_url, EMBED_BASE_URL_ENV)}/embeddings"
        self._api_key = get_api_key(EMBED_API_KEY_ENV)

    @property
    def token_dim(self) -> int:
        return self._settings.token_dim

    def embed_tokens(self, text: str) -> FloatArray:
        tokens = list(tokenize(text).tokens)
        if not tokens:
            return np.zeros((0, self.token_dim), dtype=np.float64)

        body = post_json(
            self._url,
            {"model": self._settings.embed_model, "input": tokens},
            self._api_key,
            timeout=self._settings.timeout_seconds,
            max_attempts=self._settings.max_attempts,
            backoff_seconds=self._settings.backoff_seconds,
        )
        try:
            rows = sorted(body["data"], key=lambda item: item["index"])
            matrix = np.array([row["embedding"] for row in rows], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise ProviderResponseError(f"Malformed token embeddings response: {e}") from e

        if matrix.shape != (len(tokens), self.token_dim):
            raise ProviderResponseError(
                f"Expected {len(tokens)} x {self.token_dim} token embeddings, got {matrix.shape}"
            )
        return _unit_rows(matrix)
