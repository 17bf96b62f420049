"""Pipeline orchestration: build, train, summarize, evaluate and grad-check stages."""

import hashlib
import json
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, TypeVar

from graph_of_records.corpus.chunking import ChunkingConfig, split_chunks
from graph_of_records.corpus.loading import dump_documents, load_documents
from graph_of_records.domain.types import Document, GraphOfRecords, RankingList
from graph_of_records.errors import (
    ArtifactMismatchError,
    CheckpointError,
    GorError,
    GraphFormatError,
)
from graph_of_records.evaltools.evaluation import EvaluationReport, evaluate, save_report
from graph_of_records.grecords.construction import build_graph
from graph_of_records.grecords.storage import decode_json_file, graph_from_dict, save_graph
from graph_of_records.inference.embeddings import NodeEmbeddingCache
from graph_of_records.inference.summarize import summarize, summary_record
from graph_of_records.neuralnet.checkpoint import load_checkpoint
from graph_of_records.neuralnet.gat import GatModel
from graph_of_records.neuralnet.gradcheck import GradCheckReport, grad_check_report
from graph_of_records.output.artifacts import (
    is_provenance_record,
    read_config_hash,
    write_jsonl_artifact,
)
from graph_of_records.providers.factory import Providers, build_providers
from graph_of_records.providers.settings import ProviderSettings
from graph_of_records.simscore.ranking import precompute_rankings
from graph_of_records.simscore.storage import (
    rankings_from_dict,
    rankings_match_graph,
    save_rankings,
)
from graph_of_records.synthetic import synthetic_documents
from graph_of_records.trainer.config import TrainConfig, TrainingMode
from graph_of_records.trainer.data import prepare_supervised_data, prepare_training_data
from graph_of_records.trainer.loop import checkpoint_path, train
from graph_of_records.utils.seeds import artifact_stem, config_hash, derive_seed

logger = logging.getLogger(__name__)

_T = TypeVar("_T")
_R = TypeVar("_R")


class PipelineError(Exception):
    """Exception raised when a pipeline stage fails.

    Attributes:
        stage: Name of the pipeline stage that failed.
        message: Error message.
        cause: Original exception that caused the failure.
    """

    def __init__(self, stage: str, message: str, cause: Exception | None = None) -> None:
        """Initialize PipelineError.

        Args:
            stage: Name of the pipeline stage.
            message: Error message.
            cause: Original exception.
        """
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.cause = cause


@dataclass(frozen=True, slots=True, kw_only=True)
class PipelineConfig:
    """Configuration for every pipeline stage.

    All required parameters must be provided at construction time.
    Configuration is validated in __post_init__ and frozen thereafter.
    """

    # Inputs and outputs
    dataset: str | Path
    output_dir: str | Path

    # Graph construction
    providers: ProviderSettings = field(default_factory=ProviderSettings)
    chunking: ChunkingConfig = field(default_factory=ChunkingConfig)
    n_queries: int = 30
    k: int = 6

    # Training
    train: TrainConfig = field(default_factory=TrainConfig)

    # Run control
    seed: int = 0
    workers: int = 1
    force: bool = False

    def __post_init__(self) -> None:
        """Validate configuration parameters."""
        # Frozen dataclass needs object.__setattr__ to normalize paths
        if not isinstance(self.dataset, Path):
            object.__setattr__(self, "dataset", Path(self.dataset))
        if not isinstance(self.output_dir, Path):
            object.__setattr__(self, "output_dir", Path(self.output_dir))

        if self.n_queries < 1:
            raise ValueError(f"n_queries must be >= 1, got {self.n_queries}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def dataset_path(self) -> Path:
        return Path(self.dataset)

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "PipelineConfig":
        """Build from the JSON config layout; nested sections map to nested configs.

        Raises:
            ValueError: Invalid values.
            TypeError: Unknown keys.
        """
        values = dict(payload)
        if "providers" in values:
            values["providers"] = ProviderSettings(**values["providers"])
        if "chunking" in values:
            values["chunking"] = ChunkingConfig(**values["chunking"])
        # Training inherits the root seed unless its section sets one
        train_values = dict(values.get("train", {}))
        train_values.setdefault("seed", values.get("seed", 0))
        values["train"] = TrainConfig.from_dict(train_values)
        return cls(**values)


def apply_overrides(payload: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Copy of ``payload`` with dotted keys (``"train.loss.alpha"``) set to new values."""
    result = json.loads(json.dumps(payload))
    for dotted, value in overrides.items():
        target = result
        *parents, leaf = dotted.split(".")
        for key in parents:
            target = target.setdefault(key, {})
        target[leaf] = value
    return result


def load_pipeline_config(
    path: str | Path | None, overrides: dict[str, Any] | None = None
) -> PipelineConfig:
    """Read a JSON config file (optional) and apply command-line overrides.

    Raises:
        PipelineError: Unreadable file or invalid configuration.
    """
    payload: dict[str, Any] = {}
    if path is not None:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise PipelineError("config", f"Cannot read config file {path}: {e}", e) from e
        if not isinstance(payload, dict):
            raise PipelineError("config", f"Config file {path} must hold a JSON object")
    try:
        return PipelineConfig.from_dict(apply_overrides(payload, overrides or {}))
    except (TypeError, ValueError) as e:
        raise PipelineError("config", f"Invalid configuration: {e}", e) from e


# Artifact layout


def graph_path(config: PipelineConfig, doc_id: str) -> Path:
    return config.out / "graphs" / f"{artifact_stem(doc_id)}.graph.json"


def rankings_path(config: PipelineConfig, doc_id: str) -> Path:
    return config.out / "rankings" / f"{artifact_stem(doc_id)}.rankings.json"


def checkpoint_dir(config: PipelineConfig) -> Path:
    return config.out / "checkpoints"


def final_checkpoint_path(config: PipelineConfig) -> Path:
    return checkpoint_path(checkpoint_dir(config), config.train.epochs)


def train_log_path(config: PipelineConfig) -> Path:
    return config.out / "train_log.jsonl"


def summaries_path(config: PipelineConfig) -> Path:
    return config.out / "summaries.jsonl"


def report_path(config: PipelineConfig) -> Path:
    return config.out / "eval_report.json"


# Stage-scoped configuration hashes


def _dataset_digest(path: Path) -> str:
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as e:
        raise PipelineError("ingest", f"Cannot read dataset {path}: {e}", e) from e


def build_hash(config: PipelineConfig) -> str:
    """Hash of everything that shapes graphs and rankings."""
    providers = config.providers
    return config_hash(
        {
            "dataset": _dataset_digest(config.dataset_path),
            "providers": {
                "mode": providers.mode.value,
                "llm_base_url": providers.llm_base_url,
                "llm_model": providers.llm_model,
                "embed_base_url": providers.embed_base_url,
                "embed_model": providers.embed_model,
                "dimension": providers.dimension,
                "token_dim": providers.token_dim,
            },
            "chunking": asdict(config.chunking),
            "n_queries": config.n_queries,
            "k": config.k,
            "seed": config.seed,
            "score_component": config.train.score_component.value,
        }
    )


def train_hash(config: PipelineConfig) -> str:
    """Hash of the build inputs plus the training configuration."""
    return config_hash({"build": build_hash(config), "train": config.train.to_dict()})


def summaries_hash(config: PipelineConfig, *, untrained: bool = False) -> str:
    """Hash stamped on summaries: the train hash, or the build hash for untrained retrieval."""
    if untrained:
        return config_hash({"build": build_hash(config), "retrieval": "untrained"})
    return train_hash(config)


# Shared helpers


def _providers_for(config: PipelineConfig) -> Providers:
    settings = config.providers
    if settings.cache_path is None:
        settings = replace(settings, cache_path=config.out / "llm_cache.jsonl")
    return build_providers(settings)


def _load_documents(config: PipelineConfig) -> list[Document]:
    try:
        return load_documents(config.dataset_path)
    except (GorError, OSError) as e:
        raise PipelineError("ingest", f"Failed to load {config.dataset_path}: {e}", e) from e


def _fan_out(fn: Callable[[_T], _R], items: Sequence[_T], workers: int) -> list[_R]:
    """Map in input order, on a thread pool when ``workers`` > 1."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _read_stamped(path: Path) -> tuple[dict[str, Any], str | None] | None:
    """Decoded artifact and its config hash, or None if missing or unreadable."""
    if not path.exists():
        return None
    try:
        payload = decode_json_file(path)
    except (GraphFormatError, OSError, UnicodeDecodeError):
        return None
    return payload, read_config_hash(payload)


def _check_hash(stage: str, path: Path, found: str | None, expected: str, force: bool) -> None:
    if found == expected or force:
        return
    error = ArtifactMismatchError(
        f"{path} was produced under config hash {found}, current config hash is {expected}"
    )
    raise PipelineError(stage, f"{error}; rerun the producing stage or pass --force", error)


# Build


@dataclass(frozen=True, slots=True)
class BuildSummary:
    """Outcome of a build run.

    Fields:
        built: Documents whose graph and rankings were (re)written.
        skipped: Documents whose artifacts were up to date.
        failed: Document id to error message for documents that failed.
        output_dir: Root of the artifact tree.
    """

    built: tuple[str, ...]
    skipped: tuple[str, ...]
    failed: dict[str, str]
    output_dir: Path


def _up_to_date(config: PipelineConfig, doc_id: str, expected: str) -> bool:
    graph_file = _read_stamped(graph_path(config, doc_id))
    rankings_file = _read_stamped(rankings_path(config, doc_id))
    if graph_file is None or rankings_file is None:
        return False
    if graph_file[1] != expected or rankings_file[1] != expected:
        return False
    try:
        g = graph_from_dict(graph_file[0])
        _, rankings = rankings_from_dict(rankings_file[0])
    except GraphFormatError:
        return False
    return rankings_match_graph(g, rankings)


def _build_document(
    doc: Document, config: PipelineConfig, providers: Providers, expected: str
) -> tuple[str, str | None]:
    """Build one document; returns ("built" | "skipped" | "failed", error message)."""
    if not config.force and _up_to_date(config, doc.doc_id, expected):
        logger.info("Skipping %s: artifacts up to date", doc.doc_id)
        return "skipped", None

    try:
        chunks = split_chunks(doc, config.chunking.chunk_size, config.chunking.overlap)
        g = build_graph(
            chunks,
            providers.llm,
            providers.embedder,
            n_queries=config.n_queries,
            k=config.k,
            seed=derive_seed(config.seed, f"build/{doc.doc_id}"),
        )
        rankings = precompute_rankings(
            g, providers.token_embedder, config.train.score_component
        )
    except (GorError, ValueError) as e:
        logger.error("Build failed for %s: %s", doc.doc_id, e)
        return "failed", str(e)

    save_graph(g, graph_path(config, doc.doc_id), expected)
    save_rankings(g.doc_id, rankings, rankings_path(config, doc.doc_id), expected)
    logger.info("Built %s: %d nodes, %d pairs", doc.doc_id, len(g.nodes), len(rankings))
    return "built", None


def cmd_build(config: PipelineConfig, providers: Providers | None = None) -> BuildSummary:
    """Build a graph and its ranking lists for every document.

    Documents whose artifacts exist, parse and carry the current build hash
    are skipped. A failing document is reported and does not stop the others.

    Raises:
        PipelineError: The dataset cannot be loaded.
    """
    documents = _load_documents(config)
    providers = providers if providers is not None else _providers_for(config)
    expected = build_hash(config)

    outcomes = _fan_out(
        lambda doc: _build_document(doc, config, providers, expected), documents, config.workers
    )
    built, skipped, failed = [], [], {}
    for doc, (status, message) in zip(documents, outcomes, strict=True):
        if status == "built":
            built.append(doc.doc_id)
        elif status == "skipped":
            skipped.append(doc.doc_id)
        else:
            failed[doc.doc_id] = message or "unknown error"
    return BuildSummary(
        built=tuple(built), skipped=tuple(skipped), failed=failed, output_dir=config.out
    )


# Train


@dataclass(frozen=True, slots=True)
class TrainSummary:
    """Outcome of a training run."""

    checkpoint: Path
    epochs: int
    steps: int
    final_loss: float
    config_hash: str


def _load_built_graph(config: PipelineConfig, doc_id: str, expected: str) -> GraphOfRecords:
    path = graph_path(config, doc_id)
    if not path.exists():
        raise PipelineError("train", f"Missing graph for '{doc_id}' at {path}; run 'gor build'")
    stamped = _read_stamped(path)
    if stamped is None:
        raise PipelineError("train", f"Unreadable graph file {path}; run 'gor build'")
    _check_hash("train", path, stamped[1], expected, config.force)
    try:
        return graph_from_dict(stamped[0])
    except GraphFormatError as e:
        raise PipelineError("train", f"Malformed graph file {path}: {e}", e) from e


def _load_or_rank(
    config: PipelineConfig, g: GraphOfRecords, providers: Providers, expected: str
) -> list[RankingList]:
    """Stored rankings when valid, otherwise recomputed and saved."""
    path = rankings_path(config, g.doc_id)
    stamped = _read_stamped(path)
    if stamped is not None:
        try:
            _, rankings = rankings_from_dict(stamped[0])
        except GraphFormatError:
            rankings = []
        if rankings_match_graph(g, rankings):
            _check_hash("train", path, stamped[1], expected, config.force)
            return rankings

    logger.info("Recomputing rankings for %s", g.doc_id)
    try:
        rankings = precompute_rankings(
            g, providers.token_embedder, config.train.score_component
        )
    except GorError as e:
        raise PipelineError("rankings", f"Ranking failed for '{g.doc_id}': {e}", e) from e
    save_rankings(g.doc_id, rankings, path, expected)
    return rankings


def cmd_train(
    config: PipelineConfig,
    providers: Providers | None = None,
    resume_from: str | Path | None = None,
) -> TrainSummary:
    """Train the GAT on every built graph and write checkpoints and the loss log.

    Raises:
        PipelineError: Missing or mismatched artifacts, or a training failure.
    """
    documents = _load_documents(config)
    providers = providers if providers is not None else _providers_for(config)
    expected_build = build_hash(config)
    expected_train = train_hash(config)
    graphs = [_load_built_graph(config, doc.doc_id, expected_build) for doc in documents]

    try:
        if config.train.mode == TrainingMode.SUPERVISED:
            data = prepare_supervised_data(
                graphs,
                documents,
                providers.embedder,
                providers.token_embedder,
                config.train.global_query,
                config.train.score_component,
            )
        else:
            rankings = [_load_or_rank(config, g, providers, expected_build) for g in graphs]
            data = prepare_training_data(graphs, rankings, providers.embedder)
    except GorError as e:
        raise PipelineError("train", f"Failed to prepare training data: {e}", e) from e

    resume = None
    if resume_from is not None:
        try:
            resume = load_checkpoint(resume_from)
        except CheckpointError as e:
            raise PipelineError("train", str(e), e) from e
        _check_hash("train", Path(resume_from), resume.config_hash, expected_train, config.force)

    try:
        final = train(
            data,
            config.train,
            resume=resume,
            out_dir=checkpoint_dir(config),
            log_path=train_log_path(config),
            config_hash=expected_train,
        )
    except GorError as e:
        raise PipelineError("train", str(e), e) from e

    return TrainSummary(
        checkpoint=checkpoint_path(checkpoint_dir(config), final.epoch),
        epochs=final.epoch,
        steps=len(final.trace),
        final_loss=float(final.trace[-1]["total"]) if final.trace else float("nan"),
        config_hash=expected_train,
    )


# Summarize


def _load_summary_model(config: PipelineConfig, checkpoint: str | Path | None) -> GatModel:
    path = Path(checkpoint) if checkpoint is not None else final_checkpoint_path(config)
    if not path.exists():
        raise PipelineError(
            "summarize", f"Checkpoint not found at {path}; run 'gor train' or pass --checkpoint"
        )
    try:
        loaded = load_checkpoint(path)
    except CheckpointError as e:
        raise PipelineError("summarize", str(e), e) from e
    _check_hash("summarize", path, loaded.config_hash, train_hash(config), config.force)
    return loaded.model


def cmd_summarize(
    config: PipelineConfig,
    checkpoint: str | Path | None = None,
    query: str | None = None,
    k: int | None = None,
    providers: Providers | None = None,
    *,
    chunks_only: bool = False,
    untrained: bool = False,
) -> list[dict[str, Any]]:
    """Summarize every document from its graph and write ``summaries.jsonl``.

    The file starts with a provenance header carrying summaries_hash.

    Args:
        config: Pipeline configuration.
        checkpoint: Checkpoint file; defaults to the final epoch's checkpoint.
        query: Query text; the configured global query when None.
        k: Nodes to retrieve; ``config.k`` when None.
        providers: Provider bundle override.
        chunks_only: Retrieve from chunk nodes only.
        untrained: Retrieve with the initial node embeddings; no checkpoint is read.

    Returns:
        One summary record per document, in dataset order.

    Raises:
        PipelineError: Missing checkpoint (names the expected path), a checkpoint
            trained under another config hash (unless forced), missing graphs,
            or a retrieval/LLM failure.
    """
    model = None if untrained else _load_summary_model(config, checkpoint)

    documents = _load_documents(config)
    providers = providers if providers is not None else _providers_for(config)
    expected_build = build_hash(config)
    question = query if query is not None else config.train.global_query
    top_k = k if k is not None else config.k
    cache = NodeEmbeddingCache()

    def summarize_one(doc: Document) -> dict[str, Any]:
        g = _load_built_graph(config, doc.doc_id, expected_build)
        try:
            result = summarize(
                question,
                g,
                model,
                providers.embedder,
                providers.llm,
                top_k,
                chunks_only=chunks_only,
                cache=cache,
            )
        except GorError as e:
            raise PipelineError("summarize", f"Failed for '{doc.doc_id}': {e}", e) from e
        return summary_record(result, g)

    records = _fan_out(summarize_one, documents, config.workers)
    write_jsonl_artifact(
        summaries_path(config), records, summaries_hash(config, untrained=untrained)
    )
    logger.info("Wrote %d summaries to %s", len(records), summaries_path(config))
    return records


# Evaluate


@dataclass(frozen=True, slots=True)
class Predictions:
    """``(doc_id, summary)`` pairs and the config hash of their provenance header, if any."""

    pairs: list[tuple[str, str]]
    config_hash: str | None


def load_predictions(path: Path) -> Predictions:
    """Read a summaries JSON-lines file; a provenance header line is set apart.

    Raises:
        PipelineError: Missing file, malformed line, or no predictions at all.
    """
    if not path.exists():
        raise PipelineError("eval", f"Predictions file not found: {path}")
    predictions: list[tuple[str, str]] = []
    found_hash: str | None = None
    for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if is_provenance_record(record):
                found_hash = found_hash or read_config_hash(record)
                continue
            predictions.append((str(record["doc_id"]), str(record["summary"])))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise PipelineError("eval", f"{path} line {line_number}: bad record: {e}", e) from e
    if not predictions:
        raise PipelineError("eval", f"{path}: schema error, no predictions")
    return Predictions(pairs=predictions, config_hash=found_hash)


def cmd_eval(
    config: PipelineConfig,
    predictions: str | Path | None = None,
    *,
    untrained: bool = False,
) -> EvaluationReport:
    """Score predictions against the dataset's references and write ``eval_report.json``.

    Stamped predictions must carry summaries_hash(config, untrained=untrained)
    unless ``config.force`` is set; unstamped files are scored as given.

    Raises:
        PipelineError: Unreadable or mismatched predictions, or an evaluation error.
    """
    source = Path(predictions) if predictions is not None else summaries_path(config)
    loaded = load_predictions(source)
    if loaded.config_hash is not None:
        expected = summaries_hash(config, untrained=untrained)
        _check_hash("eval", source, loaded.config_hash, expected, config.force)
    documents = _load_documents(config)
    try:
        report = evaluate(loaded.pairs, documents)
    except GorError as e:
        raise PipelineError("eval", str(e), e) from e
    save_report(report, report_path(config), train_hash(config))
    return report


# Grad check


def cmd_grad_check(
    seed: int = 42, tau: float = 0.07, dropout: float = 0.2, alpha: float = 0.9
) -> GradCheckReport:
    """Finite-difference check of the GAT and loss gradients on a random toy batch."""
    return grad_check_report(seed, tau, dropout, alpha)


# Generate


def cmd_generate(
    path: str | Path, n_docs: int = 3, words_per_doc: int = 1200, seed: int = 0
) -> Path:
    """Write a seeded synthetic dataset for offline runs.

    Raises:
        PipelineError: Invalid counts or an unwritable path.
    """
    try:
        documents = synthetic_documents(n_docs, words_per_doc, seed)
    except ValueError as e:
        raise PipelineError("generate", str(e), e) from e
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        dump_documents(documents, target)
    except OSError as e:
        raise PipelineError("generate", f"Cannot write {target}: {e}", e) from e
    logger.info("Wrote %d synthetic documents to %s", len(documents), target)
    return target
