"""Deterministic text formatting shared by CSV, JSON, and CLI output."""

from __future__ import annotations

import json
from typing import Any

FLOAT_FMT = "%.12g"


def fmt_float(x: float) -> str:
    """Render a float with 12 significant digits, the fixed output format."""
    return FLOAT_FMT % float(x)


def round_float(x: float) -> float:
    """Round a float to its 12-significant-digit text form and back."""
    return float(FLOAT_FMT % float(x))


def _walk(obj: Any) -> Any:
    if isinstance(obj, float):
        return round_float(obj)
    if isinstance(obj, dict):
        return {k: _walk(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_walk(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    """Serialize to JSON with sorted keys and 12-digit floats.

    The same object always yields the same bytes, so reports written by
    repeated runs can be compared with a plain byte diff.  NaN and infinity
    are rejected; no pipeline value should ever reach them.
    """
    return json.dumps(_walk(obj), sort_keys=True, indent=2, allow_nan=False)
