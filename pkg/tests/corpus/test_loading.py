"""Tests for JSON-lines document ingestion."""

import json
from pathlib import Path

import pytest

from graph_of_records.corpus.loading import dump_documents, load_documents
from graph_of_records.domain.types import Document
from graph_of_records.errors import DocumentFormatError, DuplicateDocumentError


def _write_lines(path: Path, records: list[object]) -> Path:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


class TestLoadDocuments:
    """Tests for load_documents."""

    def test_two_records_in_file_order(self, tmp_path: Path) -> None:
        """Valid records load in file order."""
        path = _write_lines(
            tmp_path / "data.jsonl",
            [
                {"doc_id": "b", "text": "second doc", "summaries": ["s"]},
                {"doc_id": "a", "text": "first doc"},
            ],
        )
        docs = load_documents(path)
        assert [d.doc_id for d in docs] == ["b", "a"]
        assert docs[0].reference_summaries == ("s",)
        assert docs[1].reference_summaries == ()

    def test_blank_lines_ignored(self, tmp_path: Path) -> None:
        """Blank lines between records are skipped."""
        path = tmp_path / "data.jsonl"
        path.write_text('{"doc_id": "a", "text": "x"}\n\n{"doc_id": "b", "text": "y"}\n')
        assert len(load_documents(path)) == 2

    def test_missing_text_names_line(self, tmp_path: Path) -> None:
        """A record missing 'text' fails at its line."""
        path = _write_lines(
            tmp_path / "data.jsonl",
            [{"doc_id": "a", "text": "ok"}, {"doc_id": "b"}],
        )
        with pytest.raises(DocumentFormatError, match="line 2.*text") as excinfo:
            load_documents(path)
        assert excinfo.value.line_number == 2

    def test_invalid_json_names_line(self, tmp_path: Path) -> None:
        """Unparseable JSON fails at its line."""
        path = tmp_path / "data.jsonl"
        path.write_text('{"doc_id": "a", "text": "ok"}\n{not json\n')
        with pytest.raises(DocumentFormatError, match="line 2"):
            load_documents(path)

    def test_summaries_must_be_strings(self, tmp_path: Path) -> None:
        """Non-string summaries are a schema violation."""
        path = _write_lines(tmp_path / "d.jsonl", [{"doc_id": "a", "text": "t", "summaries": [1]}])
        with pytest.raises(DocumentFormatError, match="summaries"):
            load_documents(path)

    def test_blank_text_rejected(self, tmp_path: Path) -> None:
        """Whitespace-only text is rejected with its line."""
        path = _write_lines(tmp_path / "d.jsonl", [{"doc_id": "a", "text": "   "}])
        with pytest.raises(DocumentFormatError, match="line 1"):
            load_documents(path)

    def test_duplicate_doc_id_named(self, tmp_path: Path) -> None:
        """A repeated doc_id fails naming the id."""
        path = _write_lines(
            tmp_path / "data.jsonl",
            [{"doc_id": "dup", "text": "one"}, {"doc_id": "dup", "text": "two"}],
        )
        with pytest.raises(DuplicateDocumentError, match="dup"):
            load_documents(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        """A missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_documents(tmp_path / "absent.jsonl")


class TestDumpDocuments:
    """Tests for dump_documents."""

    def test_dump_then_load(self, tmp_path: Path) -> None:
        """Dumped documents load back unchanged."""
        docs = [
            Document(doc_id="x", text="alpha beta", reference_summaries=("alpha",)),
            Document(doc_id="y", text="gamma"),
        ]
        path = tmp_path / "out.jsonl"
        dump_documents(docs, path)
        assert load_documents(path) == docs
