"""Dataset-level Rouge evaluation, best over each document's references."""

from collections.abc import Sequence
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from graph_of_records.domain.types import Document
from graph_of_records.errors import EvaluationError
from graph_of_records.evaltools.rouge import rouge_l, rouge_n
from graph_of_records.output.artifacts import write_json_artifact


@dataclass(frozen=True, slots=True)
class DocScores:
    """Best F1 per metric over one document's references."""

    doc_id: str
    rouge_l: float
    rouge_1: float
    rouge_2: float


@dataclass(frozen=True, slots=True)
class EvaluationReport:
    """Mean Rouge F1 over documents, rendered x100 with one decimal."""

    rouge_l: float
    rouge_1: float
    rouge_2: float
    per_doc: tuple[DocScores, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rouge_l": self.rouge_l,
            "rouge_1": self.rouge_1,
            "rouge_2": self.rouge_2,
            "n_docs": len(self.per_doc),
            "per_doc": [asdict(d) for d in self.per_doc],
        }


def score_against_references(doc_id: str, summary: str, references: Sequence[str]) -> DocScores:
    """Per metric, the maximum F1 over ``references``.

    Raises:
        EvaluationError: No references.
    """
    if not references:
        raise EvaluationError(f"Document '{doc_id}' has no reference summary")
    return DocScores(
        doc_id=doc_id,
        rouge_l=max(rouge_l(summary, r).f1 for r in references),
        rouge_1=max(rouge_n(summary, r, 1).f1 for r in references),
        rouge_2=max(rouge_n(summary, r, 2).f1 for r in references),
    )


def render_percent(value: float) -> float:
    return round(value * 100.0, 1)


def evaluate(predictions: Sequence[tuple[str, str]], docs: Sequence[Document]) -> EvaluationReport:
    """Score ``(doc_id, summary)`` predictions against the documents' references.

    Raises:
        EvaluationError: No predictions, an unknown or repeated doc_id, or a
            document without references (the message names the doc_id).
    """
    if not predictions:
        raise EvaluationError("No predictions to evaluate")
    by_id = {d.doc_id: d for d in docs}

    per_doc = []
    seen: set[str] = set()
    for doc_id, summary in predictions:
        doc = by_id.get(doc_id)
        if doc is None:
            raise EvaluationError(f"Prediction for unknown document '{doc_id}'")
        if doc_id in seen:
            raise EvaluationError(f"More than one prediction for document '{doc_id}'")
        seen.add(doc_id)
        per_doc.append(score_against_references(doc_id, summary, doc.reference_summaries))

    return EvaluationReport(
        rouge_l=render_percent(float(np.mean([d.rouge_l for d in per_doc]))),
        rouge_1=render_percent(float(np.mean([d.rouge_1 for d in per_doc]))),
        rouge_2=render_percent(float(np.mean([d.rouge_2 for d in per_doc]))),
        per_doc=tuple(per_doc),
    )


def save_report(report: EvaluationReport, path: str | Path, config_hash: str | None = None) -> None:
    write_json_artifact(Path(path), report.to_dict(), config_hash)
