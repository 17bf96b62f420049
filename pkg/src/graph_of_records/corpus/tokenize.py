"""Deterministic whitespace-plus-punctuation tokenizer.

Word-character runs form one token each; every other non-space character is a
token of its own. Offsets are half-open character offsets into the source text;
TokenSeq.byte_offsets converts them to UTF-8 byte offsets.
"""

import re
from collections.abc import Callable

from graph_of_records.domain.types import TokenSeq

_TOKEN_PATTERN = re.compile(r"\w+|[^\w\s]")

Tokenizer = Callable[[str], TokenSeq]


def tokenize(text: str) -> TokenSeq:
    """Split text into tokens with source offsets.

    Args:
        text: Source text (may be empty).

    Returns:
        TokenSeq whose spans slice back to each token exactly.

    Example:
        >>> tokenize("a  b").offsets
        ((0, 1), (3, 4))
    """
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    for match in _TOKEN_PATTERN.finditer(text):
        tokens.append(match.group())
        offsets.append(match.span())
    return TokenSeq(tokens=tuple(tokens), offsets=tuple(offsets))


def first_tokens(text: str, count: int) -> str:
    """The first ``count`` tokens of ``text`` joined by single spaces."""
    return " ".join(tokenize(text).tokens[:count])
