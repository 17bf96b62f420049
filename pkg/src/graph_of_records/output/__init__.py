"""Artifact writing: provenance stamps and atomic file replacement."""

from graph_of_records.output.artifacts import (
    PROVENANCE_KEY,
    add_provenance,
    generate_provenance,
    is_provenance_record,
    package_version,
    provenance_record,
    read_config_hash,
    write_bytes_atomically,
    write_file_atomically,
    write_json_artifact,
    write_jsonl_artifact,
)

__all__ = [
    "PROVENANCE_KEY",
    "add_provenance",
    "generate_provenance",
    "is_provenance_record",
    "package_version",
    "provenance_record",
    "read_config_hash",
    "write_bytes_atomically",
    "write_file_atomically",
    "write_json_artifact",
    "write_jsonl_artifact",
]
