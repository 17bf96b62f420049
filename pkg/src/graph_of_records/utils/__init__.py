"""Utility functions for graph-of-records."""

from graph_of_records.utils.seeds import (
    GOR_NAMESPACE,
    artifact_stem,
    canonical_json,
    config_hash,
    derive_seed,
    generate_deterministic_uuid,
    stable_hash64,
)

__all__ = [
    "GOR_NAMESPACE",
    "artifact_stem",
    "canonical_json",
    "config_hash",
    "derive_seed",
    "generate_deterministic_uuid",
    "stable_hash64",
]
