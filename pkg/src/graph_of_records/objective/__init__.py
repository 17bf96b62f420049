"""Training objective: similarity kernel, contrastive and ranking losses."""

from graph_of_records.objective.batch import LossBatch, QueryItem, make_query_item
from graph_of_records.objective.config import (
    DEFAULT_ALPHA,
    DEFAULT_MAX_RANK_PAIRS,
    DEFAULT_TAU,
    FULL_ENUMERATION_LIMIT,
    LossConfig,
)
from graph_of_records.objective.losses import (
    contrastive_loss,
    log_sim_s,
    ranking_loss,
    sim_s,
    similarity_entropy,
    total_loss,
)

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_MAX_RANK_PAIRS",
    "DEFAULT_TAU",
    "FULL_ENUMERATION_LIMIT",
    "LossBatch",
    "LossConfig",
    "QueryItem",
    "contrastive_loss",
    "log_sim_s",
    "make_query_item",
    "ranking_loss",
    "sim_s",
    "similarity_entropy",
    "total_loss",
]
