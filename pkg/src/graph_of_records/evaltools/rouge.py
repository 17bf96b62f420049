"""Rouge-N and Rouge-L over lowercased Unicode alphanumeric tokens."""

import re
from collections import Counter

from graph_of_records.domain.types import RougeScore

_TOKEN_PATTERN = re.compile(r"[^\W_]+")

_ZERO = RougeScore(precision=0.0, recall=0.0, f1=0.0, degenerate=True)


def rouge_tokens(text: str) -> list[str]:
    """Lowercase, then split on every character that is not a Unicode letter or digit."""
    return _TOKEN_PATTERN.findall(text.lower())


def _f1(precision: float, recall: float) -> float:
    total = precision + recall
    return 2.0 * precision * recall / total if total > 0.0 else 0.0


def _ngrams(tokens: list[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int) -> RougeScore:
    """Clipped n-gram overlap, n in {1, 2}.

    A side with fewer than ``n`` tokens yields an all-zero score marked degenerate.

    Raises:
        ValueError: ``n`` is not 1 or 2.
    """
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand = _ngrams(rouge_tokens(candidate), n)
    ref = _ngrams(rouge_tokens(reference), n)
    if not cand or not ref:
        return _ZERO

    overlap = sum((cand & ref).values())
    precision = overlap / sum(cand.values())
    recall = overlap / sum(ref.values())
    return RougeScore(precision=precision, recall=recall, f1=_f1(precision, recall))


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length by dynamic programming, O(len(b)) memory."""
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0] * (len(b) + 1)
        for j, other in enumerate(b, start=1):
            if token == other:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(candidate: str, reference: str) -> RougeScore:
    """LCS-based recall, precision and F1 (beta = 1).

    An empty side yields an all-zero score marked degenerate.
    """
    cand = rouge_tokens(candidate)
    ref = rouge_tokens(reference)
    if not cand or not ref:
        return _ZERO

    lcs = lcs_length(cand, ref)
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return RougeScore(precision=precision, recall=recall, f1=_f1(precision, recall))
