"""Provenance stamping and atomic writes for pipeline artifacts.

Artifacts carry a ``_provenance`` first key naming the tool, its version and the
configuration hash they were produced under. No wall-clock time is recorded, so
identical inputs give byte-identical files.
"""

import json
import os
import tempfile
from collections.abc import Callable
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import IO, Any

TOOL_NAME = "graph-of-records"
PROVENANCE_KEY = "_provenance"


def package_version() -> str:
    try:
        return version(TOOL_NAME)
    except PackageNotFoundError:
        return "0.0.0+unknown"


def generate_provenance(config_hash: str, tool_version: str | None = None) -> dict[str, str]:
    """Provenance record for an artifact.

    Args:
        config_hash: Hash of the configuration the artifact was produced under.
        tool_version: Version string; defaults to the installed package version.
    """
    return {
        "tool": TOOL_NAME,
        "version": tool_version if tool_version is not None else package_version(),
        "config_hash": config_hash,
    }


def add_provenance(
    payload: dict[str, Any], config_hash: str, tool_version: str | None = None
) -> dict[str, Any]:
    """Copy of ``payload`` with the provenance record inserted as the first key."""
    stamped: dict[str, Any] = {PROVENANCE_KEY: generate_provenance(config_hash, tool_version)}
    stamped.update({k: v for k, v in payload.items() if k != PROVENANCE_KEY})
    return stamped


def provenance_record(config_hash: str, tool_version: str | None = None) -> dict[str, Any]:
    """Header line stamping a JSON-lines artifact."""
    return {PROVENANCE_KEY: generate_provenance(config_hash, tool_version)}


def is_provenance_record(record: object) -> bool:
    return isinstance(record, dict) and set(record) == {PROVENANCE_KEY}


def read_config_hash(payload: dict[str, Any]) -> str | None:
    """Config hash stamped on a decoded artifact, or None if unstamped."""
    provenance = payload.get(PROVENANCE_KEY)
    if not isinstance(provenance, dict):
        return None
    value = provenance.get("config_hash")
    return value if isinstance(value, str) else None


def _replace_atomically(path: Path, write: Callable[[IO[Any]], object], mode: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=path.parent)

    try:
        if "b" in mode:
            with os.fdopen(fd, mode) as f:
                write(f)
        else:
            with os.fdopen(fd, mode, encoding="utf-8", newline="\n") as f:
                write(f)
        os.replace(temp_path, path)
    except Exception:
        try:
            os.unlink(temp_path)
        except OSError:
            pass  # already moved or never created
        raise


def write_file_atomically(path: Path, content: str) -> None:
    """Write text atomically (temp file in the same directory + os.replace).

    Creates parent directories if needed. UTF-8 with LF newlines.

    Raises:
        OSError: If the write fails; the temp file is removed.
    """
    _replace_atomically(path, lambda f: f.write(content), "w")


def write_bytes_atomically(path: Path, data: bytes) -> None:
    """Binary counterpart of write_file_atomically."""
    _replace_atomically(path, lambda f: f.write(data), "wb")


def write_json_artifact(path: Path, payload: dict[str, Any], config_hash: str | None) -> None:
    """Serialize an artifact (stamped when ``config_hash`` is given) and write it atomically."""
    body = add_provenance(payload, config_hash) if config_hash is not None else payload
    write_file_atomically(path, json.dumps(body, ensure_ascii=False) + "\n")


def write_jsonl_artifact(
    path: Path, records: list[dict[str, Any]], config_hash: str | None = None
) -> None:
    """Write JSON-lines records atomically.

    A ``config_hash`` adds a provenance header as the first line.
    """
    if config_hash is not None:
        records = [provenance_record(config_hash), *records]
    lines = "".join(json.dumps(record, ensure_ascii=False) + "\n" for record in records)
    write_file_atomically(path, lines)
