"""Training configuration and per-dataset hyperparameter presets."""

from dataclasses import asdict, dataclass, field, replace
from enum import StrEnum
from typing import Any

from graph_of_records.neuralnet.gat import GatConfig
from graph_of_records.neuralnet.schedule import DecayShape
from graph_of_records.objective.config import LossConfig
from graph_of_records.simscore.bertscore import ScoreComponent

DEFAULT_GLOBAL_QUERY = "Summarize the whole document."


class TrainingMode(StrEnum):
    """Where ranking labels come from.

    SELF_SUPERVISED ranks nodes against each simulated query's source chunk;
    SUPERVISED ranks them against the document's reference summary under a
    single global query.
    """

    SELF_SUPERVISED = "self_supervised"
    SUPERVISED = "supervised"


@dataclass(frozen=True, slots=True)
class DatasetPreset:
    dropout: float
    alpha: float


DATASET_PRESETS: dict[str, DatasetPreset] = {
    "qmsum": DatasetPreset(dropout=0.2, alpha=0.9),
    "academiceval": DatasetPreset(dropout=0.0, alpha=0.6),
    "wcep": DatasetPreset(dropout=0.1, alpha=0.7),
    "booksum": DatasetPreset(dropout=0.2, alpha=0.2),
}


@dataclass(frozen=True, slots=True, kw_only=True)
class TrainConfig:
    """Configuration of one training run.

    ``checkpoint_every`` writes ``epoch{N}.ckpt`` every N epochs when an output
    directory is given; 0 writes only the final checkpoint.
    """

    batch_size: int = 32
    epochs: int = 150
    base_lr: float = 1e-3
    lr_decay: DecayShape = DecayShape.LINEAR
    dropout: float = 0.2
    heads: int = 4
    hidden_dim: int = 768
    loss: LossConfig = field(default_factory=LossConfig)
    mode: TrainingMode = TrainingMode.SELF_SUPERVISED
    score_component: ScoreComponent = ScoreComponent.F1
    global_query: str = DEFAULT_GLOBAL_QUERY
    seed: int = 0
    checkpoint_every: int = 0

    def __post_init__(self) -> None:
        """Validate configuration after construction."""
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.base_lr < 0.0:
            raise ValueError(f"base_lr must be >= 0, got {self.base_lr}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.heads < 1 or self.hidden_dim % self.heads:
            raise ValueError(
                f"hidden_dim {self.hidden_dim} must be a positive multiple of heads {self.heads}"
            )
        if self.checkpoint_every < 0:
            raise ValueError(f"checkpoint_every must be >= 0, got {self.checkpoint_every}")
        if not self.global_query.strip():
            raise ValueError("global_query cannot be empty")

    def gat_config(self, in_dim: int, out_dim: int) -> GatConfig:
        return GatConfig(
            in_dim=in_dim,
            heads=self.heads,
            hidden_per_head=self.hidden_dim // self.heads,
            out_dim=out_dim,
            dropout=self.dropout,
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "TrainConfig":
        """Inverse of to_dict; unknown keys raise TypeError."""
        values = dict(payload)
        if "loss" in values:
            values["loss"] = LossConfig(**values["loss"])
        if "lr_decay" in values:
            values["lr_decay"] = DecayShape(values["lr_decay"])
        if "mode" in values:
            values["mode"] = TrainingMode(values["mode"])
        if "score_component" in values:
            values["score_component"] = ScoreComponent(values["score_component"])
        return cls(**values)

    @classmethod
    def for_dataset(cls, dataset: str, **overrides: Any) -> "TrainConfig":
        """Defaults with the dataset's dropout and alpha applied, then ``overrides``.

        Raises:
            KeyError: Unknown dataset name.
        """
        preset = DATASET_PRESETS[dataset.lower()]
        base = cls(dropout=preset.dropout, loss=LossConfig(alpha=preset.alpha))
        return replace(base, **overrides)
