"""Generative LLM access with a persistent response cache.

Two backends share one client: a canned backend that answers from templates
(a pure function of the prompt, apart from repeated question requests) and an
HTTP backend for OpenAI-style ``/chat/completions`` endpoints.
"""

import hashlib
import json
import logging
import threading
from pathlib import Path
from typing import Protocol

from graph_of_records.corpus.tokenize import first_tokens
from graph_of_records.domain.types import Chunk
from graph_of_records.errors import EmptyResponseError, ProviderResponseError
from graph_of_records.providers.auth import LLM_API_KEY_ENV, LLM_BASE_URL_ENV
from graph_of_records.providers.auth import get_api_key, resolve_base_url
from graph_of_records.providers.http import post_json
from graph_of_records.providers.prompts import (
    build_query_simulation_prompt,
    parse_query_simulation_prompt,
    parse_rag_prompt,
)
from graph_of_records.providers.settings import ProviderSettings
from graph_of_records.utils.seeds import canonical_json

logger = logging.getLogger(__name__)

SIMULATION_TEMPERATURE = 0.5
CANNED_SUMMARY_TOKENS = 40
CANNED_QUESTION_TOKENS = 8

_QUOTE_CHARS = "\"'`“”‘’"


class LlmBackend(Protocol):
    """Produces raw completion text for a prompt."""

    def complete(self, prompt: str, temperature: float) -> str: ...


class CannedBackend:
    """Deterministic template answers for offline runs.

    A repeated query-simulation prompt gets a new question each time, numbered by
    how often that prompt was seen, so dedup resampling always finds a fresh one.
    Every other prompt is answered as a pure function of its text.
    """

    def __init__(self) -> None:
        self._asked: dict[str, int] = {}
        self._lock = threading.Lock()

    def complete(self, prompt: str, temperature: float) -> str:
        rag = parse_rag_prompt(prompt)
        if rag is not None:
            materials, _question = rag
            return f"SUMMARY[{first_tokens(materials, CANNED_SUMMARY_TOKENS)}]"

        document = parse_query_simulation_prompt(prompt)
        if document is not None:
            topic = first_tokens(document, CANNED_QUESTION_TOKENS)
            with self._lock:
                seen = self._asked.get(prompt, 0)
                self._asked[prompt] = seen + 1
            if seen == 0:
                return f"What does the passage about {topic} summarize?"
            return f"What else does the passage about {topic} cover (angle {seen + 1})?"

        return f"RESPONSE[{first_tokens(prompt, CANNED_SUMMARY_TOKENS)}]"


class HttpChatBackend:
    """Chat-completions backend for hosted models."""

    def __init__(self, settings: ProviderSettings) -> None:
        self._settings = settings
        base = resolve_base_url(settings.llm_base_url, LLM_BASE_URL_ENV)
        self._url = f"{base}/chat/completions"
        self._api_key = get_api_key(LLM_API_KEY_ENV)

    def complete(self, prompt: str, temperature: float) -> str:
        payload = {
            "model": self._settings.llm_model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        body = post_json(
            self._url,
            payload,
            self._api_key,
            timeout=self._settings.timeout_seconds,
            max_attempts=self._settings.max_attempts,
            backoff_seconds=self._settings.backoff_seconds,
        )
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise ProviderResponseError(f"Malformed chat response: {e}") from e
        return content if isinstance(content, str) else ""


def cache_key(prompt: str, temperature: float, salt: str) -> str:
    """Hash identifying one request in the response cache."""
    return hashlib.sha256(canonical_json([prompt, temperature, salt]).encode("utf-8")).hexdigest()


class ResponseCache:
    """Response map persisted as JSON-lines; concurrent readers, serialized writers."""

    def __init__(self, path: Path | None = None) -> None:
        self._path = path
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if path is not None and path.exists():
            self._load(path)

    def _load(self, path: Path) -> None:
        with path.open(encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    self._entries[entry["key_hash"]] = entry["response"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    # A torn final line from an interrupted run is skipped.
                    logger.warning("Skipping unreadable cache line %d in %s", line_number, path)
        logger.debug("Loaded %d cached responses from %s", len(self._entries), path)

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> str | None:
        return self._entries.get(key)

    def put(self, key: str, prompt: str, temperature: float, response: str) -> None:
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = response
            if self._path is None:
                return
            record = {
                "key_hash": key,
                "prompt_sha256": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
                "temperature": temperature,
                "response": response,
            }
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with self._path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")


class LlmClient:
    """Cached access to one LLM backend.

    Concurrent requests for one cache key are serialized, so a key reaches the
    backend at most once while its answer is being produced.

    Attributes:
        backend_calls: Number of requests that reached the backend.
    """

    def __init__(self, backend: LlmBackend, cache: ResponseCache | None = None) -> None:
        self._backend = backend
        self._cache = cache if cache is not None else ResponseCache()
        self.backend_calls = 0
        self._lock = threading.Lock()
        self._key_locks: dict[str, threading.Lock] = {}

    def _lock_for(self, key: str) -> threading.Lock:
        with self._lock:
            return self._key_locks.setdefault(key, threading.Lock())

    def generate(self, prompt: str, temperature: float, salt: str = "") -> str:
        """Generate a response, serving repeats from the cache.

        Args:
            prompt: Full prompt text.
            temperature: Sampling temperature (0 for greedy decoding).
            salt: Distinguishes deliberate re-samples of an identical prompt.

        Returns:
            Non-empty response text.

        Raises:
            ValueError: If the prompt is empty or temperature is negative.
            TransportError: Live transport failure after retries.
            EmptyResponseError: The backend returned no text.
        """
        if not prompt.strip():
            raise ValueError("prompt cannot be empty")
        if temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {temperature}")

        key = cache_key(prompt, temperature, salt)
        with self._lock_for(key):
            cached = self._cache.get(key)
            if cached is not None:
                return cached

            with self._lock:
                self.backend_calls += 1
            response = self._backend.complete(prompt, temperature)
            if not response.strip():
                raise EmptyResponseError("LLM returned empty content")

            self._cache.put(key, prompt, temperature, response)
            return response


def normalize_question(text: str) -> str:
    """First non-empty line of a model answer, stripped of whitespace and quotes."""
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    first = lines[0] if lines else ""
    return first.strip().strip(_QUOTE_CHARS).strip()


def simulate_query(
    chunk: Chunk,
    llm: LlmClient,
    temperature: float = SIMULATION_TEMPERATURE,
    salt: str = "",
) -> str:
    """Ask the LLM for one summary question about a chunk.

    Raises:
        ValueError: If the chunk text is empty.
        EmptyResponseError: If nothing remains after normalization.
    """
    if not chunk.text.strip():
        raise ValueError(f"Chunk '{chunk.chunk_id}' has empty text")

    prompt = build_query_simulation_prompt(chunk.text)
    question = normalize_question(llm.generate(prompt, temperature, salt=salt))
    if not question:
        raise EmptyResponseError(f"Query simulation for '{chunk.chunk_id}' produced no question")
    return question
