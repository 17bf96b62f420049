"""graph-of-records: retrieval over a graph of document chunks and past LLM responses.

Chunks of a long document and the responses an LLM produced while answering
simulated queries form a graph. A two-layer graph attention network trained with
a contrastive plus ranking objective embeds its nodes, and at inference the
top-k nodes for a query are handed to an LLM to write the summary.
"""

from importlib.metadata import PackageNotFoundError, version

from graph_of_records.pipeline import (
    PipelineConfig,
    PipelineError,
    cmd_build,
    cmd_eval,
    cmd_generate,
    cmd_grad_check,
    cmd_summarize,
    cmd_train,
    load_pipeline_config,
)

try:
    __version__ = version("graph-of-records")
except PackageNotFoundError:
    __version__ = "0.0.0+unknown"

__all__: list[str] = [
    "__version__",
    "PipelineConfig",
    "PipelineError",
    "cmd_build",
    "cmd_eval",
    "cmd_generate",
    "cmd_grad_check",
    "cmd_summarize",
    "cmd_train",
    "load_pipeline_config",
]
