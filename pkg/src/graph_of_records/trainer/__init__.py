"""Training loop, its inputs and its diagnostics."""

from graph_of_records.trainer.config import (
    DATASET_PRESETS,
    DEFAULT_GLOBAL_QUERY,
    DatasetPreset,
    TrainConfig,
    TrainingMode,
)
from graph_of_records.trainer.data import (
    SupervisedPair,
    TrainingGraph,
    build_supervised_pairs,
    prepare_supervised_data,
    prepare_supervised_graph,
    prepare_training_data,
    prepare_training_graph,
)
from graph_of_records.trainer.loop import checkpoint_path, train
from graph_of_records.trainer.metrics import epoch_mean_losses, label_top1_accuracy

__all__ = [
    "DATASET_PRESETS",
    "DEFAULT_GLOBAL_QUERY",
    "DatasetPreset",
    "SupervisedPair",
    "TrainConfig",
    "TrainingGraph",
    "TrainingMode",
    "build_supervised_pairs",
    "checkpoint_path",
    "epoch_mean_losses",
    "label_top1_accuracy",
    "prepare_supervised_data",
    "prepare_supervised_graph",
    "prepare_training_data",
    "prepare_training_graph",
    "train",
]
