"""Exception hierarchy shared by all graph-of-records modules."""


class GorError(Exception):
    """Base class for every error raised by graph_of_records."""


class DocumentFormatError(GorError):
    """A dataset record is malformed or violates the document schema.

    Attributes:
        line_number: 1-based line in the JSON-lines file, if known.
    """

    def __init__(self, message: str, line_number: int | None = None) -> None:
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class DuplicateDocumentError(GorError):
    """Two records share one doc_id."""

    def __init__(self, doc_id: str) -> None:
        super().__init__(f"Duplicate doc_id: {doc_id}")
        self.doc_id = doc_id


class TransportError(GorError):
    """A live provider request failed in transit. Retriable.

    Attributes:
        status: HTTP status code, or None when no response arrived.
    """

    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(f"{message} (status={status})")
        self.status = status


class ProviderResponseError(GorError):
    """A provider answered with a payload that violates its contract."""


class EmptyResponseError(ProviderResponseError):
    """The model answered, but with no usable text. Not retried."""


class GraphBuildError(GorError):
    """Graph construction failed for one document.

    Attributes:
        doc_id: Document whose graph was being built.
        round_index: 1-based construction round, or None outside the round loop.
    """

    def __init__(self, doc_id: str, message: str, round_index: int | None = None) -> None:
        where = f" at round {round_index}" if round_index is not None else ""
        super().__init__(f"Graph build for '{doc_id}' failed{where}: {message}")
        self.doc_id = doc_id
        self.round_index = round_index


class QueryDedupError(GraphBuildError):
    """No new simulated query could be found within the resample bound."""


class GraphFormatError(GorError):
    """A graph or rankings file cannot be parsed."""


class GraphVersionError(GraphFormatError):
    """A graph file declares an unsupported schema version."""


class BertScoreError(GorError):
    """BERTScore is undefined for the given texts (empty token sequence)."""


class ModelError(GorError):
    """Base for neural-network kernel failures."""


class DimensionMismatchError(ModelError):
    """Input width does not match a layer's parameters."""


class NonFiniteError(ModelError):
    """A NaN or infinity appeared where finite values are required."""


class StaleCacheError(ModelError):
    """Backward was called with a forward cache from other inputs or parameters."""


class CheckpointError(GorError):
    """A checkpoint file is missing, unreadable or incompatible."""


class LossError(GorError):
    """A loss cannot be evaluated on the given batch."""


class TrainingError(GorError):
    """Training aborted (ranking mismatch, non-finite loss, bad inputs)."""


class RetrievalError(GorError):
    """Retrieval over a graph cannot proceed."""


class EvaluationError(GorError):
    """Predictions cannot be scored against the references."""


class ArtifactMismatchError(GorError):
    """Artifacts were produced under a different configuration hash."""
