"""Infer which existing columns a newly added column was computed from."""

from __future__ import annotations

import json
import logging

from ..diffs import ChangeSet
from ..gateway import (
    GatewayDisabledError,
    LlmGateway,
    MalformedReplyError,
    TransportError,
)
from ..values import is_missing
from .codescan import scan_code
from .classify import _ONEHOT_PATTERN

logger = logging.getLogger("snapcards.insight")


def _binary_values(values) -> bool:
    present = [v for v in values if not is_missing(v)]
    if not present:
        return False
    return all(
        (isinstance(v, bool))
        or (isinstance(v, float) and v in (0.0, 1.0))
        or (isinstance(v, str) and v in ("0", "1", "true", "false", "True", "False"))
        for v in present
    )


def _prefix_source(added: str, existing: list[str]) -> str | None:
    candidates = [x for x in existing if added == x or added.startswith(x + "_")]
    if not candidates:
        return None
    return max(candidates, key=len)


def _deterministic(
    code: str, existing: list[str], added: list[str], changes: ChangeSet | None
) -> dict[str, list[str]]:
    result: dict[str, list[str]] = {}
    existing_set = set(existing)

    # Explicit arithmetic assignments: df["BMI"] = df["Weight"] / df["Height"]**2
    scan = scan_code(code)
    for target, referenced in scan.subscript_assignments:
        if target in added:
            sources = [c for c in referenced if c in existing_set]
            if sources:
                seen = set()
                result[target] = [c for c in sources if not (c in seen or seen.add(c))]

    removed = set(changes.removed_column_names) if changes is not None else set()
    binary_added = set()
    if changes is not None:
        for col in changes.added_columns:
            if col.values and _binary_values(col.values.values()):
                binary_added.add(col.name)
    onehot_code = bool(_ONEHOT_PATTERN.search(code or ""))

    for name in added:
        if name in result:
            continue
        source = _prefix_source(name, existing)
        if source is None:
            continue
        if source in removed or name in binary_added or onehot_code:
            result[name] = [source]
    return result


def infer_column_relationships(
    code: str,
    existing: list[str],
    added: list[str],
    backend: str = "deterministic",
    gateway: LlmGateway | None = None,
    changes: ChangeSet | None = None,
) -> dict[str, list[str]]:
    """Map each derived (added) column to the existing columns it came from.

    Keys are always a subset of ``added`` and values a subset of
    ``existing``; with nothing added the map is empty.
    """
    if not added:
        return {}
    if backend == "llm" and gateway is not None:
        bindings = {
            "code": code,
            "existing_columns": json.dumps(existing),
            "added_columns": json.dumps(added),
        }
        try:
            raw = gateway.complete_structured("column_relationships", bindings)
        except (GatewayDisabledError, TransportError):
            logger.warning("column relationships: gateway unavailable, using deterministic backend")
            return _deterministic(code, existing, added, changes)
        except MalformedReplyError:
            logger.warning("column relationships: malformed completion after retry, returning empty map")
            return {}
        existing_set = set(existing)
        added_set = set(added)
        return {
            key: [v for v in values if v in existing_set]
            for key, values in raw.items()
            if key in added_set and any(v in existing_set for v in values)
        }
    return _deterministic(code, existing, added, changes)
