"""Stable content digests for caching and recorded-backend fixtures.

Inputs are serialized to canonical JSON (sorted string keys, no
whitespace, shortest-round-trip float text), so a digest changes exactly
when the serialized content changes.
"""

import hashlib
import json

import numpy as np


def to_jsonable(obj):
    """Convert nested data (incl. numpy arrays) to canonical JSON types."""
    if obj is None or isinstance(obj, (str, int, bool)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__} for digesting")


def canonical_json(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True,
                      separators=(",", ":"), allow_nan=False)


def digest_of(stage, payload):
    """Hex digest keyed by a stage label and a canonical payload."""
    h = hashlib.sha256()
    h.update(stage.encode("utf-8"))
    h.update(b"\x00")
    h.update(canonical_json(payload).encode("utf-8"))
    return h.hexdigest()


def derive_seed(*parts):
    """Deterministic 63-bit seed from arbitrary serializable parts."""
    h = hashlib.sha256(canonical_json(list(parts)).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big") >> 1
