"""Tests for the staged pipeline: build, train, summarize, eval."""

import json
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path
from typing import Any

import pytest

from graph_of_records.corpus.loading import load_documents
from graph_of_records.domain.types import Document
from graph_of_records.errors import ArtifactMismatchError
from graph_of_records.output.artifacts import read_config_hash
from graph_of_records.pipeline import (
    PipelineConfig,
    PipelineError,
    apply_overrides,
    build_hash,
    cmd_build,
    cmd_eval,
    cmd_generate,
    cmd_grad_check,
    cmd_summarize,
    cmd_train,
    final_checkpoint_path,
    graph_path,
    load_pipeline_config,
    load_predictions,
    rankings_path,
    report_path,
    summaries_hash,
    summaries_path,
    train_hash,
    train_log_path,
)
from graph_of_records.providers.embedding import DeterministicEmbedder
from graph_of_records.providers.factory import Providers
from graph_of_records.providers.llm import CannedBackend, LlmClient
from graph_of_records.providers.settings import ProviderSettings
from graph_of_records.providers.tokens import DeterministicTokenEmbedder
from graph_of_records.synthetic import synthetic_documents
from graph_of_records.trainer.config import TrainingMode

DatasetWriter = Callable[[Path, list[Document]], Path]


class ExplodingBackend:
    """LLM backend that fails the test if it is ever reached."""

    def complete(self, prompt: str, temperature: float) -> str:
        raise AssertionError("backend should not be called")


class SilentOnBackend:
    """Canned backend that answers blank whenever the prompt mentions ``marker``."""

    def __init__(self, marker: str) -> None:
        self._marker = marker
        self._canned = CannedBackend()

    def complete(self, prompt: str, temperature: float) -> str:
        if self._marker in prompt:
            return ""
        return self._canned.complete(prompt, temperature)


def _payload(dataset: Path, output_dir: Path) -> dict[str, Any]:
    return {
        "dataset": str(dataset),
        "output_dir": str(output_dir),
        "providers": {"dimension": 16, "token_dim": 16},
        "chunking": {"chunk_size": 16, "overlap": 4},
        "n_queries": 3,
        "k": 2,
        "seed": 11,
        "train": {"epochs": 2, "batch_size": 2, "heads": 2, "hidden_dim": 8, "base_lr": 0.01},
    }


@pytest.fixture
def documents() -> list[Document]:
    return synthetic_documents(n_docs=2, words_per_doc=60, seed=4)


@pytest.fixture
def config(
    tmp_path: Path, dataset_writer: DatasetWriter, documents: list[Document]
) -> PipelineConfig:
    dataset = dataset_writer(tmp_path / "dataset.jsonl", documents)
    return PipelineConfig.from_dict(_payload(dataset, tmp_path / "out"))


def _offline_providers(config: PipelineConfig) -> Providers:
    return Providers(
        embedder=DeterministicEmbedder(config.providers.dimension),
        token_embedder=DeterministicTokenEmbedder(config.providers.token_dim),
        llm=LlmClient(ExplodingBackend()),
    )


class TestPipelineConfig:
    """Tests for PipelineConfig and config loading."""

    def test_paths_normalized(self, tmp_path: Path) -> None:
        """String paths become Path objects."""
        config = PipelineConfig(dataset="data.jsonl", output_dir=str(tmp_path))
        assert config.dataset_path == Path("data.jsonl")
        assert config.out == tmp_path

    @pytest.mark.parametrize("field", ["n_queries", "k", "workers"])
    def test_validation(self, field: str) -> None:
        """Counts must be positive."""
        with pytest.raises(ValueError, match=field):
            PipelineConfig(dataset="d", output_dir="o", **{field: 0})  # type: ignore[arg-type]

    def test_train_inherits_root_seed(self) -> None:
        """The training seed follows the root seed unless set explicitly."""
        inherited = PipelineConfig.from_dict({"dataset": "d", "output_dir": "o", "seed": 9})
        explicit = PipelineConfig.from_dict(
            {"dataset": "d", "output_dir": "o", "seed": 9, "train": {"seed": 2}}
        )
        assert inherited.train.seed == 9
        assert explicit.train.seed == 2

    def test_apply_overrides(self) -> None:
        """Dotted keys set nested values without touching the input."""
        payload = {"train": {"loss": {"alpha": 0.9}}}
        result = apply_overrides(payload, {"train.loss.alpha": 0.5, "providers.dimension": 8})
        assert result == {"train": {"loss": {"alpha": 0.5}}, "providers": {"dimension": 8}}
        assert payload["train"]["loss"]["alpha"] == 0.9

    def test_load_with_overrides(self, tmp_path: Path) -> None:
        """Overrides win over the file."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"dataset": "d", "output_dir": "o", "k": 4}), encoding="utf-8")
        config = load_pipeline_config(path, {"k": 3, "train.mode": "supervised"})
        assert config.k == 3
        assert config.train.mode == TrainingMode.SUPERVISED

    def test_load_bad_json(self, tmp_path: Path) -> None:
        """Unparseable files are config-stage errors."""
        path = tmp_path / "config.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(PipelineError) as excinfo:
            load_pipeline_config(path)
        assert excinfo.value.stage == "config"

    def test_load_not_an_object(self, tmp_path: Path) -> None:
        """The file must hold a JSON object."""
        path = tmp_path / "config.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(PipelineError, match="JSON object"):
            load_pipeline_config(path)

    def test_load_unknown_key(self) -> None:
        """Unknown fields are reported as invalid configuration."""
        with pytest.raises(PipelineError, match="Invalid configuration"):
            load_pipeline_config(None, {"dataset": "d", "output_dir": "o", "colour": "red"})

    def test_error_format(self) -> None:
        """PipelineError prefixes the stage."""
        error = PipelineError("train", "boom")
        assert str(error) == "[train] boom"


class TestBuild:
    """Tests for cmd_build."""

    def test_writes_artifacts(self, config: PipelineConfig, documents: list[Document]) -> None:
        """Every document gets a stamped graph and ranking file."""
        summary = cmd_build(config)
        assert summary.built == tuple(d.doc_id for d in documents)
        assert summary.skipped == ()
        assert summary.failed == {}
        for doc in documents:
            graph = json.loads(graph_path(config, doc.doc_id).read_text(encoding="utf-8"))
            assert read_config_hash(graph) == build_hash(config)
            assert rankings_path(config, doc.doc_id).exists()

    def test_rerun_is_skipped(self, config: PipelineConfig) -> None:
        """A second build skips everything and never reaches the LLM."""
        cmd_build(config)
        providers = _offline_providers(config)
        summary = cmd_build(config, providers)
        assert summary.built == ()
        assert len(summary.skipped) == 2
        assert providers.llm.backend_calls == 0

    def test_corrupted_graph_is_rebuilt(self, config: PipelineConfig) -> None:
        """A truncated graph file is rebuilt on the next run."""
        first = cmd_build(config)
        damaged = first.built[0]
        path = graph_path(config, damaged)
        path.write_text(path.read_text(encoding="utf-8")[:40], encoding="utf-8")
        summary = cmd_build(config)
        assert summary.built == (damaged,)

    def test_config_change_rebuilds(self, config: PipelineConfig) -> None:
        """Artifacts stamped under another build hash are rebuilt."""
        cmd_build(config)
        summary = cmd_build(replace(config, k=3))
        assert len(summary.built) == 2

    def test_force_rebuilds(self, config: PipelineConfig) -> None:
        """force ignores up-to-date artifacts."""
        cmd_build(config)
        assert len(cmd_build(replace(config, force=True)).built) == 2

    def test_failure_is_isolated(
        self, tmp_path: Path, dataset_writer: DatasetWriter, documents: list[Document]
    ) -> None:
        """A document whose questions come back empty fails alone."""
        broken = Document("tiny", "Unanswerable notes about nothing in particular.", ("Notes.",))
        dataset = dataset_writer(tmp_path / "mixed.jsonl", [*documents, broken])
        config = PipelineConfig.from_dict(_payload(dataset, tmp_path / "out"))
        providers = Providers(
            embedder=DeterministicEmbedder(16),
            token_embedder=DeterministicTokenEmbedder(16),
            llm=LlmClient(SilentOnBackend("Unanswerable")),
        )
        summary = cmd_build(config, providers)
        assert set(summary.failed) == {"tiny"}
        assert len(summary.built) == 2

    def test_default_query_count_builds(
        self, tmp_path: Path, dataset_writer: DatasetWriter
    ) -> None:
        """The offline backend reaches the default 30 queries on a long document."""
        dataset = dataset_writer(tmp_path / "long.jsonl", synthetic_documents(1, 1200, seed=2))
        config = PipelineConfig(
            dataset=dataset,
            output_dir=tmp_path / "out",
            providers=ProviderSettings(dimension=16, token_dim=16),
        )
        assert config.n_queries == 30
        summary = cmd_build(config)
        assert summary.failed == {}
        assert summary.built == ("doc-00",)

    def test_workers_match_serial(self, config: PipelineConfig, tmp_path: Path) -> None:
        """Threaded builds write the same graphs as serial ones."""
        cmd_build(config)
        threaded = replace(config, output_dir=tmp_path / "threaded", workers=2)
        cmd_build(threaded)
        for doc_id in ("doc-00", "doc-01"):
            assert graph_path(config, doc_id).read_bytes() == graph_path(
                threaded, doc_id
            ).read_bytes()

    def test_missing_dataset(self, tmp_path: Path) -> None:
        """An absent dataset is an ingest error."""
        config = PipelineConfig(dataset=tmp_path / "nope.jsonl", output_dir=tmp_path / "out")
        with pytest.raises(PipelineError) as excinfo:
            cmd_build(config)
        assert excinfo.value.stage == "ingest"


class TestTrain:
    """Tests for cmd_train."""

    def test_trains_on_built_graphs(self, config: PipelineConfig) -> None:
        """Training writes the final checkpoint and a stamped log with one line per step."""
        cmd_build(config)
        summary = cmd_train(config)
        assert summary.checkpoint == final_checkpoint_path(config)
        assert summary.checkpoint.exists()
        assert summary.epochs == 2
        assert summary.config_hash == train_hash(config)
        header, *steps = train_log_path(config).read_text(encoding="utf-8").splitlines()
        assert read_config_hash(json.loads(header)) == train_hash(config)
        assert len(steps) == summary.steps

    def test_missing_graph(self, config: PipelineConfig) -> None:
        """Training before building names the missing file."""
        with pytest.raises(PipelineError, match="Missing graph for 'doc-00'.*gor build"):
            cmd_train(config)

    def test_hash_mismatch(self, config: PipelineConfig) -> None:
        """Graphs built under another config are refused unless forced."""
        cmd_build(config)
        changed = replace(config, k=3)
        with pytest.raises(PipelineError, match="pass --force") as excinfo:
            cmd_train(changed)
        assert isinstance(excinfo.value.cause, ArtifactMismatchError)
        assert cmd_train(replace(changed, force=True)).checkpoint.exists()

    def test_missing_rankings_recomputed(self, config: PipelineConfig) -> None:
        """Deleted ranking files are recomputed during training."""
        cmd_build(config)
        rankings_path(config, "doc-00").unlink()
        cmd_train(config)
        assert rankings_path(config, "doc-00").exists()

    def test_supervised_mode(self, config: PipelineConfig) -> None:
        """Supervised training uses the reference summaries."""
        cmd_build(config)
        supervised = replace(config, train=replace(config.train, mode=TrainingMode.SUPERVISED))
        summary = cmd_train(supervised)
        assert summary.steps == 2

    def test_resume_under_other_config(self, config: PipelineConfig) -> None:
        """Resuming from a checkpoint of another training config is refused."""
        cmd_build(config)
        checkpoint = cmd_train(config).checkpoint
        other = replace(config, train=replace(config.train, epochs=3))
        with pytest.raises(PipelineError, match="config hash"):
            cmd_train(other, resume_from=checkpoint)


class TestSummarizeAndEval:
    """Tests for cmd_summarize, load_predictions and cmd_eval."""

    def test_missing_checkpoint(self, config: PipelineConfig) -> None:
        """The error names the checkpoint path it expected."""
        with pytest.raises(PipelineError, match="epoch2.ckpt; run 'gor train'"):
            cmd_summarize(config)

    def test_checkpoint_from_other_config(self, config: PipelineConfig) -> None:
        """A checkpoint trained under another train hash is refused unless forced."""
        cmd_build(config)
        cmd_train(config)
        changed = replace(config, train=replace(config.train, base_lr=0.05))
        with pytest.raises(PipelineError, match="pass --force") as excinfo:
            cmd_summarize(changed)
        assert excinfo.value.stage == "summarize"
        assert isinstance(excinfo.value.cause, ArtifactMismatchError)
        assert len(cmd_summarize(replace(changed, force=True))) == 2

    def test_summaries_are_stamped(self, config: PipelineConfig) -> None:
        """summaries.jsonl opens with the train hash; the loader sets it apart."""
        cmd_build(config)
        cmd_train(config)
        cmd_summarize(config)
        header = json.loads(summaries_path(config).read_text(encoding="utf-8").splitlines()[0])
        assert read_config_hash(header) == train_hash(config)
        loaded = load_predictions(summaries_path(config))
        assert loaded.config_hash == train_hash(config)
        assert [doc_id for doc_id, _ in loaded.pairs] == ["doc-00", "doc-01"]

    def test_eval_refuses_stale_summaries(self, config: PipelineConfig) -> None:
        """Summaries stamped under another config are not scored unless forced."""
        cmd_build(config)
        cmd_train(config)
        cmd_summarize(config)
        changed = replace(config, train=replace(config.train, epochs=3))
        with pytest.raises(PipelineError, match="pass --force") as excinfo:
            cmd_eval(changed)
        assert excinfo.value.stage == "eval"
        assert 0.0 <= cmd_eval(replace(changed, force=True)).rouge_l <= 100.0

    def test_untrained_retrieval(self, config: PipelineConfig) -> None:
        """Untrained summaries need no checkpoint and are evaluated in the same mode."""
        cmd_build(config)
        records = cmd_summarize(config, untrained=True)
        assert {r["checkpoint_hash"] for r in records} == {"untrained"}
        assert load_predictions(summaries_path(config)).config_hash == summaries_hash(
            config, untrained=True
        )
        with pytest.raises(PipelineError, match="config hash"):
            cmd_eval(config)
        assert 0.0 <= cmd_eval(config, untrained=True).rouge_l <= 100.0

    def test_predictions_missing(self, tmp_path: Path) -> None:
        with pytest.raises(PipelineError, match="not found"):
            load_predictions(tmp_path / "summaries.jsonl")

    def test_predictions_empty(self, tmp_path: Path) -> None:
        """An empty file is a schema error."""
        path = tmp_path / "summaries.jsonl"
        path.write_text("\n", encoding="utf-8")
        with pytest.raises(PipelineError, match="schema error"):
            load_predictions(path)

    def test_predictions_bad_line(self, tmp_path: Path) -> None:
        """A malformed record names its line."""
        path = tmp_path / "summaries.jsonl"
        path.write_text('{"doc_id": "a", "summary": "s"}\n{"doc_id": "b"}\n', encoding="utf-8")
        with pytest.raises(PipelineError, match="line 2"):
            load_predictions(path)

    def test_perfect_predictions(
        self, config: PipelineConfig, documents: list[Document], tmp_path: Path
    ) -> None:
        """Predictions equal to a reference score 100.0."""
        path = tmp_path / "perfect.jsonl"
        path.write_text(
            "".join(
                json.dumps({"doc_id": d.doc_id, "summary": d.reference_summaries[0]}) + "\n"
                for d in documents
            ),
            encoding="utf-8",
        )
        report = cmd_eval(config, path)
        assert (report.rouge_1, report.rouge_2, report.rouge_l) == (100.0, 100.0, 100.0)
        saved = json.loads(report_path(config).read_text(encoding="utf-8"))
        assert read_config_hash(saved) == train_hash(config)


def _run_all(config: PipelineConfig) -> list[dict[str, Any]]:
    cmd_build(config)
    cmd_train(config)
    records = cmd_summarize(config)
    cmd_eval(config)
    return records


class TestEndToEnd:
    """Offline runs of every stage."""

    def test_full_run(self, config: PipelineConfig, documents: list[Document]) -> None:
        """Each document gets a summary from k retrieved nodes and a score."""
        records = _run_all(config)
        assert [r["doc_id"] for r in records] == [d.doc_id for d in documents]
        assert all(len(r["retrieved"]) == config.k for r in records)
        assert all(r["summary"].startswith("SUMMARY[") for r in records)
        report = json.loads(report_path(config).read_text(encoding="utf-8"))
        assert 0.0 <= report["rouge_l"] <= 100.0

    def test_query_and_k_overrides(self, config: PipelineConfig) -> None:
        """An explicit query and k = 1 retrieve a single node."""
        cmd_build(config)
        cmd_train(config)
        records = cmd_summarize(config, query="What was decided?", k=1)
        assert all(len(r["retrieved"]) == 1 for r in records)
        assert all(r["query"] == "What was decided?" for r in records)

    def test_chunks_only(self, config: PipelineConfig) -> None:
        """Chunk-only retrieval never returns responses."""
        cmd_build(config)
        cmd_train(config)
        records = cmd_summarize(config, chunks_only=True)
        assert all(n["kind"] == "chunk" for r in records for n in r["retrieved"])

    def test_byte_identical_reruns(self, config: PipelineConfig, tmp_path: Path) -> None:
        """Two runs with one seed write byte-identical artifacts."""
        twin = replace(config, output_dir=tmp_path / "twin")
        _run_all(config)
        _run_all(twin)
        artifacts = [
            lambda c: graph_path(c, "doc-00"),
            lambda c: rankings_path(c, "doc-01"),
            final_checkpoint_path,
            train_log_path,
            summaries_path,
            report_path,
        ]
        for locate in artifacts:
            assert locate(config).read_bytes() == locate(twin).read_bytes()


def test_grad_check_passes() -> None:
    """The default gradient check passes."""
    assert cmd_grad_check().passed


class TestGenerate:
    """Tests for cmd_generate."""

    def test_writes_loadable_dataset(self, tmp_path: Path) -> None:
        """The written dataset loads back as the seeded synthetic documents."""
        path = cmd_generate(tmp_path / "data" / "synthetic.jsonl", n_docs=2, words_per_doc=40)
        assert load_documents(path) == synthetic_documents(2, 40, seed=0)

    def test_bad_counts(self, tmp_path: Path) -> None:
        """Zero documents is a generate-stage error."""
        with pytest.raises(PipelineError) as excinfo:
            cmd_generate(tmp_path / "d.jsonl", n_docs=0)
        assert excinfo.value.stage == "generate"
