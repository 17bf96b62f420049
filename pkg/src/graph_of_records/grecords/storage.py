"""Graph file serialization.

Embeddings are written with Python's shortest round-trip float repr, so a
load after save reproduces every value bit for bit.
"""

import json
from pathlib import Path
from typing import Any

from graph_of_records.domain.types import Edge, GraphOfRecords, Node, NodeKind, TrainingPair
from graph_of_records.errors import GraphFormatError, GraphVersionError
from graph_of_records.output.artifacts import write_json_artifact

GRAPH_FORMAT_VERSION = 1


def graph_to_dict(g: GraphOfRecords) -> dict[str, Any]:
    return {
        "version": GRAPH_FORMAT_VERSION,
        "doc_id": g.doc_id,
        "nodes": [
            {
                "id": n.node_id,
                "kind": n.kind.value,
                "text": n.text,
                "round": n.round,
                "embedding": list(n.init_embedding),
            }
            for n in g.nodes
        ],
        "edges": [[e.src, e.dst] for e in g.edges],
        "training_pairs": [[p.query, p.label_chunk_id] for p in g.training_pairs],
    }


def graph_from_dict(payload: dict[str, Any]) -> GraphOfRecords:
    """Rebuild a graph from its decoded JSON form.

    Raises:
        GraphVersionError: Unknown ``version``.
        GraphFormatError: Missing or ill-typed fields.
    """
    file_version = payload.get("version")
    if file_version != GRAPH_FORMAT_VERSION:
        raise GraphVersionError(
            f"Unsupported graph format version {file_version!r}; "
            f"expected {GRAPH_FORMAT_VERSION}"
        )

    try:
        nodes = tuple(
            Node(
                node_id=n["id"],
                kind=NodeKind(n["kind"]),
                text=n["text"],
                init_embedding=tuple(float(x) for x in n["embedding"]),
                round=int(n["round"]),
            )
            for n in payload["nodes"]
        )
        return GraphOfRecords(
            doc_id=payload["doc_id"],
            nodes=nodes,
            edges=tuple(Edge(src, dst) for src, dst in payload["edges"]),
            training_pairs=tuple(TrainingPair(q, c) for q, c in payload["training_pairs"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise GraphFormatError(f"Malformed graph payload: {e}") from e


def decode_json_file(path: Path) -> dict[str, Any]:
    """Read a JSON object file, reporting parse failures with a byte offset.

    Raises:
        GraphFormatError: Unparseable or non-object content.
    """
    text = path.read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        byte_offset = len(text[: e.pos].encode("utf-8"))
        raise GraphFormatError(f"{path}: {e.msg} at byte offset {byte_offset}") from e
    if not isinstance(payload, dict):
        raise GraphFormatError(f"{path}: expected a JSON object")
    return payload


def save_graph(g: GraphOfRecords, path: str | Path, config_hash: str | None = None) -> None:
    """Write a graph file atomically, stamped with ``config_hash`` when given."""
    write_json_artifact(Path(path), graph_to_dict(g), config_hash)


def load_graph(path: str | Path) -> GraphOfRecords:
    """Load a graph file written by save_graph.

    Raises:
        FileNotFoundError: Missing file.
        GraphFormatError: Truncated or malformed file.
        GraphVersionError: Unsupported version.
    """
    return graph_from_dict(decode_json_file(Path(path)))
