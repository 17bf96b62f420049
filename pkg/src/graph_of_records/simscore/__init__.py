"""BERTScore similarity and the precomputed node ranking lists."""

from graph_of_records.simscore.bertscore import (
    BertScore,
    ScoreComponent,
    bertscore,
    bertscore_f1,
    greedy_match,
    score_texts,
)
from graph_of_records.simscore.ranking import precompute_rankings, rank_nodes, rank_nodes_against
from graph_of_records.simscore.storage import (
    load_rankings,
    rankings_from_dict,
    rankings_match_graph,
    rankings_to_dict,
    save_rankings,
)

__all__ = [
    "BertScore",
    "ScoreComponent",
    "bertscore",
    "bertscore_f1",
    "greedy_match",
    "load_rankings",
    "precompute_rankings",
    "rank_nodes",
    "rank_nodes_against",
    "rankings_from_dict",
    "rankings_match_graph",
    "rankings_to_dict",
    "save_rankings",
    "score_texts",
]
