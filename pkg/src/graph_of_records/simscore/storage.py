"""Rankings file serialization."""

from pathlib import Path
from typing import Any

from graph_of_records.domain.types import GraphOfRecords, RankingList
from graph_of_records.errors import GraphFormatError
from graph_of_records.grecords.storage import decode_json_file
from graph_of_records.output.artifacts import write_json_artifact


def rankings_to_dict(doc_id: str, rankings: list[RankingList]) -> dict[str, Any]:
    return {
        "doc_id": doc_id,
        "rankings": [
            {
                "pair_index": r.pair_index,
                "ordered_nodes": list(r.ordered_nodes),
                "scores": list(r.scores),
            }
            for r in rankings
        ],
    }


def rankings_from_dict(payload: dict[str, Any]) -> tuple[str, list[RankingList]]:
    """Decode a rankings payload into ``(doc_id, rankings)``.

    Raises:
        GraphFormatError: Missing or ill-typed fields.
    """
    try:
        rankings = [
            RankingList(
                pair_index=int(r["pair_index"]),
                ordered_nodes=tuple(r["ordered_nodes"]),
                scores=tuple(float(s) for s in r["scores"]),
            )
            for r in payload["rankings"]
        ]
        return str(payload["doc_id"]), rankings
    except (KeyError, TypeError, ValueError) as e:
        raise GraphFormatError(f"Malformed rankings payload: {e}") from e


def save_rankings(
    doc_id: str, rankings: list[RankingList], path: str | Path, config_hash: str | None = None
) -> None:
    write_json_artifact(Path(path), rankings_to_dict(doc_id, rankings), config_hash)


def load_rankings(path: str | Path) -> tuple[str, list[RankingList]]:
    """Load a rankings file written by save_rankings.

    Raises:
        FileNotFoundError: Missing file.
        GraphFormatError: Truncated or malformed file.
    """
    return rankings_from_dict(decode_json_file(Path(path)))


def rankings_match_graph(g: GraphOfRecords, rankings: list[RankingList]) -> bool:
    """True when there is one list per pair, in order, each a permutation of the nodes."""
    if len(rankings) != len(g.training_pairs):
        return False
    node_ids = {n.node_id for n in g.nodes}
    return all(
        r.pair_index == i
        and len(r.ordered_nodes) == len(node_ids)
        and set(r.ordered_nodes) == node_ids
        for i, r in enumerate(rankings)
    )
