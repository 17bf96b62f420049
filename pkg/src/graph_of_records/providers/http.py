"""JSON-over-HTTP transport with retries for OpenAI-style endpoints."""

import logging
from typing import Any

import requests
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from graph_of_records.errors import ProviderResponseError, TransportError

logger = logging.getLogger(__name__)


def _post_once(url: str, payload: dict[str, Any], api_key: str | None, timeout: float) -> Any:
    """Issue a single POST and decode the JSON body.

    Raises:
        TransportError: On connection failures, timeouts and HTTP error statuses.
        ProviderResponseError: If a 2xx body is not JSON.
    """
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"

    try:
        response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    except requests.RequestException as e:
        raise TransportError(f"POST {url} failed: {e}") from e

    if response.status_code >= 400:
        raise TransportError(f"POST {url} returned an error", status=response.status_code)

    try:
        return response.json()
    except ValueError as e:
        raise ProviderResponseError(f"POST {url} returned non-JSON body") from e


def post_json(
    url: str,
    payload: dict[str, Any],
    api_key: str | None,
    *,
    timeout: float = 60.0,
    max_attempts: int = 3,
    backoff_seconds: float = 1.0,
) -> Any:
    """POST a JSON payload, retrying transport failures with exponential backoff.

    Args:
        url: Full endpoint URL.
        payload: JSON-serializable request body.
        api_key: Bearer token, or None.
        timeout: Per-request timeout in seconds.
        max_attempts: Total attempts before the last TransportError is re-raised.
        backoff_seconds: Multiplier of the exponential wait between attempts.

    Returns:
        Decoded JSON response.

    Raises:
        TransportError: After ``max_attempts`` failed attempts.
    """
    retrying = Retrying(
        retry=retry_if_exception_type(TransportError),
        stop=stop_after_attempt(max_attempts),
        wait=wait_exponential(multiplier=backoff_seconds, max=30),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            if attempt.retry_state.attempt_number > 1:
                logger.warning(
                    "Retrying POST %s (attempt %d/%d)",
                    url,
                    attempt.retry_state.attempt_number,
                    max_attempts,
                )
            return _post_once(url, payload, api_key, timeout)
    raise AssertionError("unreachable")  # pragma: no cover
