"""Loss hyperparameters."""

from dataclasses import dataclass

DEFAULT_TAU = 0.07
DEFAULT_ALPHA = 0.9
DEFAULT_MAX_RANK_PAIRS = 256
FULL_ENUMERATION_LIMIT = 64


@dataclass(frozen=True, slots=True, kw_only=True)
class LossConfig:
    """Temperature, ranking weight and negative-sampling options.

    ``in_batch_all_nodes`` widens in-batch negatives from the other graphs'
    positives to all of their nodes.
    ``use_contrastive=False`` drops the contrastive term from the objective, leaving
    ``alpha * L_RANK``; the contrastive value is still reported.
    """

    tau: float = DEFAULT_TAU
    alpha: float = DEFAULT_ALPHA
    max_rank_pairs: int = DEFAULT_MAX_RANK_PAIRS
    use_contrastive: bool = True
    use_in_batch_negatives: bool = True
    in_batch_all_nodes: bool = False
    pair_seed: int = 0

    def __post_init__(self) -> None:
        """Validate configuration after construction."""
        if not self.tau > 0.0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.use_contrastive and self.alpha == 0.0:
            raise ValueError("alpha must be > 0 when the contrastive loss is disabled")
        if self.max_rank_pairs < 0:
            raise ValueError(f"max_rank_pairs must be >= 0, got {self.max_rank_pairs}")
