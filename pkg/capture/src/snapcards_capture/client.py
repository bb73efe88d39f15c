"""Capture client: detect changed tabular variables and post snapshot events.

Runs on the kernel's execution thread after every cell. Change detection is
by content hash of the serialized frame, so in-place mutation is caught the
same as reassignment. Events that cannot reach the service are buffered and
retried on the next execution; a cell never blocks beyond the post timeout.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Callable

import pandas as pd
import requests

logger = logging.getLogger("snapcards_capture")

ROW_ID_COLUMN = "__row_id"
DEFAULT_TIMEOUT_SECONDS = 5.0

# poster(path, payload) -> HTTP status code
Poster = Callable[[str, dict], int]


def _encode_scalar(value: Any) -> str | None:
    """Snapshot field text; None marks a missing cell."""
    if value is None:
        return None
    try:
        if pd.isna(value):
            return None
    except (TypeError, ValueError):
        pass
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return str(value)


def serialize_frame(frame: pd.DataFrame) -> str:
    """Snapshot CSV: header + __row_id column; every non-missing field quoted.

    Row ids come from the frame's index (the source row position at first
    sighting); pandas preserves them across drops/joins, which keeps diff
    alignment stable downstream.
    """

    def quoted(text: str) -> str:
        return '"' + text.replace('"', '""') + '"'

    lines = [",".join(quoted(name) for name in [ROW_ID_COLUMN, *map(str, frame.columns)])]
    for row_id, row in zip(frame.index, frame.itertuples(index=False, name=None)):
        fields = [quoted(str(int(row_id)))]
        for value in row:
            encoded = _encode_scalar(value)
            fields.append("" if encoded is None else quoted(encoded))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def is_tabular(value: Any) -> bool:
    return isinstance(value, pd.DataFrame)


def collect_scalars(namespace: dict[str, Any]) -> dict[str, float]:
    """Numeric scalar variables, forwarded so metric values can be resolved."""
    out: dict[str, float] = {}
    for name, value in namespace.items():
        if name.startswith("_"):
            continue
        if isinstance(value, bool):
            continue
        if isinstance(value, (int, float)):
            out[name] = float(value)
    return out


@dataclass
class _PendingEvent:
    payload: dict
    variable: str


@dataclass
class CaptureClient:
    """Posts one event per changed tabular variable after each execution."""

    base_url: str = "http://127.0.0.1:8000"
    poster: Poster | None = None
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    _hashes: dict[str, str] = field(default_factory=dict)
    _buffer: list[_PendingEvent] = field(default_factory=list)

    def _post(self, path: str, payload: dict) -> int:
        if self.poster is not None:
            return self.poster(path, payload)
        response = requests.post(
            self.base_url.rstrip("/") + path, json=payload, timeout=self.timeout_seconds
        )
        return response.status_code

    def _try_post_event(self, event: _PendingEvent) -> bool:
        try:
            status = self._post("/events", event.payload)
        except requests.RequestException as exc:
            logger.warning("event for %r buffered, service unreachable: %s", event.variable, exc)
            return False
        if status >= 500:
            logger.warning("event for %r buffered, service returned %s", event.variable, status)
            return False
        if status >= 400:
            # Rejected payloads are dropped, not retried forever.
            logger.error("event for %r rejected with status %s", event.variable, status)
            return True
        return True

    def on_cell_executed(
        self, namespace: dict[str, Any], cell_source: str, execution_count: int, cell_id: str = ""
    ) -> int:
        """Detect changed tabular variables and post them; returns the number
        of events successfully posted during this invocation (including any
        buffered backlog that got through)."""
        posted = 0

        backlog, self._buffer = self._buffer, []
        for event in backlog:
            if self._try_post_event(event):
                posted += 1
            else:
                self._buffer.append(event)

        scalars = collect_scalars(namespace)
        for name in list(namespace):
            if name.startswith("_"):
                continue
            value = namespace[name]
            if not is_tabular(value):
                continue
            snapshot = serialize_frame(value)
            digest = hashlib.sha256(snapshot.encode("utf-8")).hexdigest()
            if self._hashes.get(name) == digest:
                continue
            self._hashes[name] = digest
            event = _PendingEvent(
                payload={
                    "variable": name,
                    "snapshot_csv": snapshot,
                    "cell": {
                        "cell_id": cell_id or f"exec-{execution_count}",
                        "code": cell_source,
                        "execution_count": execution_count,
                    },
                    "scalars": scalars,
                },
                variable=name,
            )
            if self._try_post_event(event):
                posted += 1
            else:
                self._buffer.append(event)
        return posted

    @property
    def pending_events(self) -> int:
        return len(self._buffer)

    # -- chat side-panel -------------------------------------------------

    def fetch_updates(self, subscriber: str = "data_scientist", cursor: int = 0) -> dict:
        if self.poster is not None:
            raise RuntimeError("fetch_updates needs a live service URL")
        response = requests.get(
            self.base_url.rstrip("/") + "/poll",
            params={"cursor": cursor, "subscriber": subscriber},
            timeout=self.timeout_seconds,
        )
        response.raise_for_status()
        return response.json()

    def send_comment(self, variable: str, version: int, text: str) -> int:
        return self._post(
            "/comments",
            {"variable": variable, "version": version, "author_role": "data_scientist", "text": text},
        )
