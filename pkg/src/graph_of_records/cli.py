"""Command-line entry point: ``gor generate|build|train|summarize|eval|grad-check``.

A full offline run uses the deterministic providers (the default) and needs no
network access::

    gor generate --output dataset.jsonl
    gor build --dataset dataset.jsonl --output-dir out
    gor train --dataset dataset.jsonl --output-dir out
    gor summarize --dataset dataset.jsonl --output-dir out --global
    gor eval --dataset dataset.jsonl --output-dir out

``train --no-contrastive`` trains on the ranking loss alone and
``--set train.loss.alpha=0`` on the contrastive loss alone.
``--set train.loss.use_in_batch_negatives=false`` drops in-batch negatives.
``summarize --untrained`` retrieves with the initial node embeddings; score
those summaries with ``eval --untrained``.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from typing import Any

from graph_of_records.errors import GorError
from graph_of_records.pipeline import (
    PipelineError,
    cmd_build,
    cmd_eval,
    cmd_generate,
    cmd_grad_check,
    cmd_summarize,
    cmd_train,
    load_pipeline_config,
)
from graph_of_records.trainer.config import DATASET_PRESETS

logger = logging.getLogger(__name__)


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _parse_assignment(text: str) -> tuple[str, Any]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    return key, _parse_value(raw)


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--dataset", help="JSON-lines dataset file")
    parser.add_argument("--output-dir", help="Artifact directory")
    parser.add_argument("--seed", type=int, help="Root seed")
    parser.add_argument("--n-queries", type=int, help="Simulated queries per document")
    parser.add_argument("--k", type=int, help="Nodes retrieved per round and at inference")
    parser.add_argument("--workers", type=int, help="Threads for per-document work")
    parser.add_argument(
        "--provider-mode", choices=["live", "deterministic"], help="Provider backend"
    )
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        type=_parse_assignment,
        default=[],
        metavar="KEY=VALUE",
        help="Override a config field by dotted path, e.g. train.loss.alpha=0.5",
    )
    parser.add_argument(
        "--force", action="store_true", help="Ignore config-hash mismatches and rebuild"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gor", description="Graph of records for long-document summarization"
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Root logging level",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="Build graphs and ranking lists")
    _add_config_arguments(build)

    train = commands.add_parser("train", help="Train the GAT on built graphs")
    _add_config_arguments(train)
    train.add_argument("--epochs", type=int, help="Number of epochs")
    train.add_argument("--mode", choices=["self_supervised", "supervised"], help="Label source")
    train.add_argument("--dataset-preset", help="Dropout/alpha preset (qmsum, wcep, ...)")
    train.add_argument("--resume", help="Checkpoint to resume from")
    train.add_argument(
        "--no-contrastive",
        dest="no_contrastive",
        action="store_true",
        help="Train on the ranking loss alone",
    )

    summarize = commands.add_parser("summarize", help="Summarize every document")
    _add_config_arguments(summarize)
    summarize.add_argument("--checkpoint", help="Checkpoint file (default: final epoch)")
    query = summarize.add_mutually_exclusive_group()
    query.add_argument("--query", help="Query text")
    query.add_argument(
        "--global", dest="use_global", action="store_true", help="Use the global query"
    )
    summarize.add_argument("--chunks-only", action="store_true", help="Retrieve chunks only")
    summarize.add_argument(
        "--untrained", action="store_true", help="Retrieve with the initial node embeddings"
    )

    evaluate = commands.add_parser("eval", help="Score summaries with Rouge")
    _add_config_arguments(evaluate)
    evaluate.add_argument("--predictions", help="Summaries JSON-lines file")
    evaluate.add_argument(
        "--untrained", action="store_true", help="Expect summaries from untrained retrieval"
    )

    generate = commands.add_parser("generate", help="Write a synthetic dataset")
    generate.add_argument("--output", required=True, help="JSON-lines dataset to write")
    generate.add_argument("--n-docs", type=int, default=3)
    generate.add_argument("--words", type=int, default=1200, help="Words per document")
    generate.add_argument("--seed", type=int, default=0)

    grad = commands.add_parser("grad-check", help="Finite-difference gradient check")
    grad.add_argument("--seed", type=int, default=42)
    grad.add_argument("--tau", type=float, default=0.07)
    grad.add_argument("--dropout", type=float, default=0.2)
    grad.add_argument("--alpha", type=float, default=0.9)
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    flags = {
        "dataset": "dataset",
        "output_dir": "output_dir",
        "seed": "seed",
        "n_queries": "n_queries",
        "k": "k",
        "workers": "workers",
        "provider_mode": "providers.mode",
        "epochs": "train.epochs",
        "mode": "train.mode",
    }
    for attribute, dotted in flags.items():
        value = getattr(args, attribute, None)
        if value is not None:
            overrides[dotted] = value
    if getattr(args, "force", False):
        overrides["force"] = True
    if getattr(args, "no_contrastive", False):
        overrides["train.loss.use_contrastive"] = False
    overrides.update(dict(args.overrides))
    return overrides


def _apply_preset(overrides: dict[str, Any], preset_name: str | None) -> None:
    if preset_name is None:
        return
    preset = DATASET_PRESETS.get(preset_name.lower())
    if preset is None:
        raise PipelineError(
            "config", f"Unknown dataset preset '{preset_name}'; known: {sorted(DATASET_PRESETS)}"
        )
    overrides.setdefault("train.dropout", preset.dropout)
    overrides.setdefault("train.loss.alpha", preset.alpha)


def _run(args: argparse.Namespace) -> int:
    if args.command == "grad-check":
        report = cmd_grad_check(args.seed, args.tau, args.dropout, args.alpha)
        print(json.dumps({"max_relative_error": report.max_error, "per_tensor": report.per_tensor}))
        return 0 if report.passed else 1

    if args.command == "generate":
        path = cmd_generate(args.output, args.n_docs, args.words, args.seed)
        print(json.dumps({"dataset": str(path), "n_docs": args.n_docs}))
        return 0

    overrides = _collect_overrides(args)
    _apply_preset(overrides, getattr(args, "dataset_preset", None))
    config = load_pipeline_config(args.config, overrides)

    if args.command == "build":
        summary = cmd_build(config)
        print(
            json.dumps(
                {
                    "built": list(summary.built),
                    "skipped": list(summary.skipped),
                    "failed": summary.failed,
                    "output_dir": str(summary.output_dir),
                }
            )
        )
        return 1 if summary.failed else 0

    if args.command == "train":
        result = cmd_train(config, resume_from=args.resume)
        print(
            json.dumps(
                {
                    "checkpoint": str(result.checkpoint),
                    "epochs": result.epochs,
                    "steps": result.steps,
                    "final_loss": result.final_loss,
                    "config_hash": result.config_hash,
                }
            )
        )
        return 0

    if args.command == "summarize":
        records = cmd_summarize(
            config,
            checkpoint=args.checkpoint,
            query=None if args.use_global else args.query,
            k=args.k,
            chunks_only=args.chunks_only,
            untrained=args.untrained,
        )
        for record in records:
            print(json.dumps(record))
        return 0

    report = cmd_eval(config, args.predictions, untrained=args.untrained)
    print(json.dumps(report.to_dict()))
    return 0


def _error_payload(error: Exception) -> dict[str, str]:
    stage = error.stage if isinstance(error, PipelineError) else "unknown"
    message = error.message if isinstance(error, PipelineError) else str(error)
    root = error.cause if isinstance(error, PipelineError) and error.cause else error
    return {"error": type(root).__name__, "stage": stage, "message": message}


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except (PipelineError, GorError) as e:
        logger.debug("Command failed", exc_info=True)
        print(json.dumps(_error_payload(e)), file=sys.stderr)
        return 1
    except Exception as e:
        logger.error("Unexpected failure", exc_info=True)
        print(json.dumps(_error_payload(e)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
