"""Graph of records: construction, retrieval over the growing corpus, persistence."""

from graph_of_records.grecords.construction import (
    DEFAULT_N_QUERIES,
    MAX_QUERY_RESAMPLES,
    add_self_loops,
    build_graph,
    response_id_for,
)
from graph_of_records.grecords.retrieval import DEFAULT_TOP_K, retrieve_corpus, top_k_indices
from graph_of_records.grecords.storage import (
    GRAPH_FORMAT_VERSION,
    decode_json_file,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    save_graph,
)

__all__ = [
    "DEFAULT_N_QUERIES",
    "DEFAULT_TOP_K",
    "GRAPH_FORMAT_VERSION",
    "MAX_QUERY_RESAMPLES",
    "add_self_loops",
    "build_graph",
    "decode_json_file",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "response_id_for",
    "retrieve_corpus",
    "save_graph",
    "top_k_indices",
]
