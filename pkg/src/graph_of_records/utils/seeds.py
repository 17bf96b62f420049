"""Deterministic identifiers, seeds and hashes.

Every random stream in the pipeline is derived from one root seed through a
labelled uuid5 so that a single knob fixes sampling, initialization and dropout.
"""

import hashlib
import json
import re
import uuid
from typing import Any

# Project-specific namespace for uuid5 generation.
GOR_NAMESPACE = uuid.UUID("5d0f9a3e-2b7c-4e61-8f4a-c3a91e6b7d20")

_SEED_MASK = (1 << 63) - 1


def generate_deterministic_uuid(object_type: str, object_name: str) -> uuid.UUID:
    """Generate a stable UUID for a named pipeline object.

    Args:
        object_type: Kind of object (e.g., "document", "seed").
            Normalized to lowercase, stripped of whitespace.
        object_name: Name of the object. Stripped of whitespace, case preserved.

    Returns:
        Deterministic UUID based on object type and name.

    Raises:
        ValueError: If object_type or object_name is empty after stripping.
    """
    normalized_type = object_type.strip().lower()
    normalized_name = object_name.strip()

    if not normalized_type:
        raise ValueError("object_type cannot be empty")
    if not normalized_name:
        raise ValueError("object_name cannot be empty")

    return uuid.uuid5(GOR_NAMESPACE, f"{normalized_type}:{normalized_name}")


def derive_seed(root_seed: int, label: str) -> int:
    """Derive a labelled 63-bit sub-seed from the root seed.

    Args:
        root_seed: The pipeline's single seed.
        label: Purpose of the stream (e.g., "init", "dropout", "shuffle").

    Returns:
        Non-negative integer usable with numpy.random.default_rng.
    """
    return generate_deterministic_uuid("seed", f"{root_seed}/{label}").int & _SEED_MASK


def stable_hash64(text: str) -> int:
    """64-bit hash of a string that is identical across processes and platforms."""
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and no insignificant whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(payload: Any) -> str:
    """SHA-256 hex digest of the canonical JSON form of ``payload``."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def artifact_stem(doc_id: str) -> str:
    """Filesystem-safe, collision-resistant file stem for a document.

    Example:
        >>> artifact_stem("meeting/01")  # doctest: +SKIP
        'meeting_01-1a2b3c4d'
    """
    slug = re.sub(r"[^A-Za-z0-9_.-]+", "_", doc_id).strip("._")[:48] or "doc"
    suffix = generate_deterministic_uuid("document", doc_id).hex[:8]
    return f"{slug}-{suffix}"
