"""From-scratch GAT kernel: forward, backward, Adam, schedule and checkpoints."""

from graph_of_records.neuralnet.adam import AdamState, adam_step, adam_update
from graph_of_records.neuralnet.checkpoint import (
    CHECKPOINT_FORMAT_VERSION,
    Checkpoint,
    checkpoint_to_bytes,
    load_checkpoint,
    model_fingerprint,
    save_checkpoint,
)
from graph_of_records.neuralnet.gat import (
    PARAMETER_NAMES,
    ForwardCache,
    GatConfig,
    GatModel,
    GraphTensors,
    attention_weights,
    backward,
    gat_forward,
    identity_model,
    initialize_model,
    prepare_graph,
    prepare_tensors,
)
from graph_of_records.neuralnet.gradcheck import (
    PASS_THRESHOLD,
    GradCheckReport,
    grad_check,
    grad_check_report,
    relative_error,
)
from graph_of_records.neuralnet.schedule import DecayShape, lr_at

__all__ = [
    "CHECKPOINT_FORMAT_VERSION",
    "PARAMETER_NAMES",
    "PASS_THRESHOLD",
    "AdamState",
    "Checkpoint",
    "DecayShape",
    "ForwardCache",
    "GatConfig",
    "GatModel",
    "GradCheckReport",
    "GraphTensors",
    "adam_step",
    "adam_update",
    "attention_weights",
    "backward",
    "checkpoint_to_bytes",
    "gat_forward",
    "grad_check",
    "grad_check_report",
    "identity_model",
    "initialize_model",
    "load_checkpoint",
    "lr_at",
    "model_fingerprint",
    "prepare_graph",
    "prepare_tensors",
    "relative_error",
    "save_checkpoint",
]
