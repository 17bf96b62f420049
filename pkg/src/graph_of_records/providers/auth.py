"""Endpoint and credential lookup from the environment."""

import os

LLM_BASE_URL_ENV = "GOR_LLM_BASE_URL"
LLM_API_KEY_ENV = "GOR_LLM_API_KEY"
EMBED_BASE_URL_ENV = "GOR_EMBED_BASE_URL"
EMBED_API_KEY_ENV = "GOR_EMBED_API_KEY"


def resolve_base_url(configured: str | None, env_var: str) -> str:
    """Return the configured base URL, or the environment's, without a trailing slash.

    Raises:
        ValueError: If neither is set.
    """
    url = configured or os.environ.get(env_var)
    if not url:
        raise ValueError(f"No endpoint configured; set {env_var} or the config field")
    return url.rstrip("/")


def get_api_key(env_var: str) -> str | None:
    """Bearer token for a live endpoint, or None for unauthenticated servers."""
    return os.environ.get(env_var) or None
