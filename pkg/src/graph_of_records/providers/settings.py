"""Provider configuration."""

from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path


class ProviderMode(StrEnum):
    """Whether providers call hosted endpoints or run offline."""

    LIVE = "live"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True, slots=True, kw_only=True)
class ProviderSettings:
    """Endpoints, models and transport policy for the three providers.

    Base URLs left as None fall back to the GOR_*_BASE_URL environment variables.
    API keys are only ever read from the environment.
    """

    mode: ProviderMode = ProviderMode.DETERMINISTIC
    llm_base_url: str | None = None
    llm_model: str = "meta-llama/Llama-3-8b-chat-hf"
    embed_base_url: str | None = None
    embed_model: str = "facebook/contriever"
    dimension: int = 768
    token_dim: int = 128
    timeout_seconds: float = 60.0
    max_attempts: int = 3
    backoff_seconds: float = 1.0
    cache_path: Path | None = None

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        if not isinstance(self.mode, ProviderMode):
            object.__setattr__(self, "mode", ProviderMode(self.mode))
        if self.cache_path is not None and not isinstance(self.cache_path, Path):
            object.__setattr__(self, "cache_path", Path(self.cache_path))
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.token_dim < 1:
            raise ValueError(f"token_dim must be >= 1, got {self.token_dim}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.backoff_seconds < 0:
            raise ValueError("backoff_seconds must be >= 0")
