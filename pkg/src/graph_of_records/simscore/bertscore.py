"""Greedy-matching BERTScore without IDF weighting or baseline rescaling.

Recall averages, over reference tokens, the best cosine to any candidate token;
precision does the same over candidate tokens; F1 is their harmonic mean.
"""

from dataclasses import dataclass
from enum import StrEnum

from graph_of_records.domain.types import FloatArray
from graph_of_records.errors import BertScoreError
from graph_of_records.providers.tokens import TokenEmbedder


class ScoreComponent(StrEnum):
    """Which BERTScore component drives node ranking."""

    PRECISION = "precision"
    RECALL = "recall"
    F1 = "f1"


@dataclass(frozen=True, slots=True)
class BertScore:
    precision: float
    recall: float
    f1: float

    def component(self, which: ScoreComponent) -> float:
        return {
            ScoreComponent.PRECISION: self.precision,
            ScoreComponent.RECALL: self.recall,
            ScoreComponent.F1: self.f1,
        }[which]


def greedy_match(candidate: FloatArray, reference: FloatArray) -> BertScore:
    """BERTScore of two unit-row token matrices.

    Raises:
        BertScoreError: If either matrix has no rows.
    """
    if candidate.shape[0] == 0 or reference.shape[0] == 0:
        raise BertScoreError("BERTScore needs at least one token on each side")

    similarity = candidate @ reference.T
    precision = float(similarity.max(axis=1).mean())
    recall = float(similarity.max(axis=0).mean())
    denominator = precision + recall
    f1 = 2.0 * precision * recall / denominator if denominator != 0.0 else 0.0
    return BertScore(precision=precision, recall=recall, f1=f1)


def score_texts(
    candidate: str, candidate_tokens: FloatArray, reference: str, reference_tokens: FloatArray
) -> BertScore:
    """BERTScore of two texts whose token matrices are already embedded.

    Both orientations reuse one similarity matrix, built with the
    lexicographically smaller text first, so swapping the arguments swaps
    precision and recall exactly.
    """
    if candidate <= reference:
        return greedy_match(candidate_tokens, reference_tokens)
    swapped = greedy_match(reference_tokens, candidate_tokens)
    return BertScore(precision=swapped.recall, recall=swapped.precision, f1=swapped.f1)


def bertscore(candidate: str, reference: str, embedder: TokenEmbedder) -> BertScore:
    """Full BERTScore triple for two texts."""
    return score_texts(
        candidate, embedder.embed_tokens(candidate), reference, embedder.embed_tokens(reference)
    )


def bertscore_f1(candidate: str, reference: str, embedder: TokenEmbedder) -> float:
    """BERTScore F1 in [-1, 1]; 1 for identical texts, symmetric in its arguments.

    Raises:
        BertScoreError: If either text has no tokens.
    """
    return bertscore(candidate, reference, embedder).f1

