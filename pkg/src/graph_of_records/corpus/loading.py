"""JSON-lines document ingestion."""

import json
import logging
from pathlib import Path
from typing import Any

from graph_of_records.domain.types import Document
from graph_of_records.errors import DocumentFormatError, DuplicateDocumentError

logger = logging.getLogger(__name__)


def _parse_record(record: Any, line_number: int) -> Document:
    """Validate one decoded record against the dataset schema."""
    if not isinstance(record, dict):
        raise DocumentFormatError("record must be a JSON object", line_number)

    for key in ("doc_id", "text"):
        if key not in record:
            raise DocumentFormatError(f"missing required field '{key}'", line_number)
        if not isinstance(record[key], str):
            raise DocumentFormatError(f"field '{key}' must be a string", line_number)

    summaries = record.get("summaries", [])
    if not isinstance(summaries, list) or not all(isinstance(s, str) for s in summaries):
        raise DocumentFormatError("field 'summaries' must be a list of strings", line_number)

    try:
        return Document(
            doc_id=record["doc_id"],
            text=record["text"],
            reference_summaries=tuple(summaries),
        )
    except ValueError as e:
        raise DocumentFormatError(str(e), line_number) from e


def load_documents(path: str | Path) -> list[Document]:
    """Load documents from a JSON-lines file, preserving file order.

    Blank lines are ignored.

    Args:
        path: File with one ``{"doc_id", "text", "summaries"}`` object per line.

    Returns:
        Documents in file order.

    Raises:
        FileNotFoundError: If the file does not exist.
        DocumentFormatError: On malformed JSON or schema violations (names the line).
        DuplicateDocumentError: When a doc_id repeats (names the id).
    """
    documents: list[Document] = []
    seen: set[str] = set()

    with Path(path).open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DocumentFormatError(f"invalid JSON: {e.msg}", line_number) from e

            doc = _parse_record(record, line_number)
            if doc.doc_id in seen:
                raise DuplicateDocumentError(doc.doc_id)
            seen.add(doc.doc_id)
            documents.append(doc)

    logger.info("Loaded %d documents from %s", len(documents), path)
    return documents


def dump_documents(documents: list[Document], path: str | Path) -> None:
    """Write documents back to JSON-lines in the ingestion schema."""
    lines = [
        json.dumps(
            {"doc_id": d.doc_id, "text": d.text, "summaries": list(d.reference_summaries)},
            ensure_ascii=False,
        )
        for d in documents
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
