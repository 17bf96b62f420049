"""Rouge metrics and dataset-level evaluation."""

from graph_of_records.evaltools.evaluation import (
    DocScores,
    EvaluationReport,
    evaluate,
    render_percent,
    save_report,
    score_against_references,
)
from graph_of_records.evaltools.rouge import lcs_length, rouge_l, rouge_n, rouge_tokens

__all__ = [
    "DocScores",
    "EvaluationReport",
    "evaluate",
    "lcs_length",
    "render_percent",
    "rouge_l",
    "rouge_n",
    "rouge_tokens",
    "save_report",
    "score_against_references",
]
