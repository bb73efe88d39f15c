"""File-backed store of immutable dataset versions and their cards.

Layout: one directory per tracked variable holding ``v{index}.csv`` (the
snapshot) and ``v{index}.meta`` (JSON: provenance plus the derived card).
Version indices per variable are dense, starting at 0. Concurrent readers
are always allowed; writes to one variable's stream are serialized, writes
to different variables may proceed in parallel.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from difflib import get_close_matches

from .frame import TabularFrame, read_snapshot, write_snapshot
from .stats import ColumnStats, compute_column_stats


class StoreError(Exception):
    pass


class UnknownVariableError(StoreError):
    def __init__(self, variable: str):
        super().__init__(f"unknown variable {variable!r}")
        self.variable = variable


class UnknownVersionError(StoreError):
    pass


class UnknownStatsColumnError(StoreError):
    def __init__(self, column: str, candidates: list[str]):
        hint = f"; nearest match: {', '.join(candidates)}" if candidates else ""
        super().__init__(f"unknown column {column!r}{hint}")
        self.column = column
        self.candidates = candidates


_VARIABLE_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class LogicalClock:
    """Counter-based clock for deterministic runs (byte-identical histories)."""

    def __init__(self, start: int = 0):
        self._tick = start
        self._lock = threading.Lock()

    def __call__(self) -> str:
        with self._lock:
            self._tick += 1
            tick = self._tick
        moment = datetime(2000, 1, 1, tzinfo=timezone.utc) + timedelta(seconds=tick)
        return moment.isoformat()


@dataclass(frozen=True)
class CellExecution:
    cell_id: str
    code: str
    execution_count: int

    def to_jsonable(self) -> dict:
        return {"cell_id": self.cell_id, "code": self.code, "execution_count": self.execution_count}

    @classmethod
    def from_jsonable(cls, data: dict) -> "CellExecution":
        return cls(
            cell_id=data.get("cell_id", ""),
            code=data.get("code", ""),
            execution_count=int(data.get("execution_count", 0)),
        )


@dataclass
class DatasetVersion:
    variable: str
    index: int
    frame: TabularFrame
    provenance: CellExecution
    created_at: str


@dataclass
class DataVersionCard:
    """One unit of provenance: summary, kind, grid, metadata, comment info."""

    variable: str
    version: int
    summary: str
    operation_kind: str
    snapgrid: dict
    model_metadata: dict | None = None
    relationships: dict[str, list[str]] = field(default_factory=dict)
    changes: dict = field(default_factory=dict)
    created_at: str = ""
    comment_count: int = 0
    has_unread: bool = False

    def to_jsonable(self) -> dict:
        return {
            "variable": self.variable,
            "version": self.version,
            "summary": self.summary,
            "operation_kind": self.operation_kind,
            "snapgrid": self.snapgrid,
            "model_metadata": self.model_metadata,
            "relationships": self.relationships,
            "changes": self.changes,
            "created_at": self.created_at,
            "comment_count": self.comment_count,
            "has_unread": self.has_unread,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "DataVersionCard":
        return cls(
            variable=data["variable"],
            version=int(data["version"]),
            summary=data.get("summary", ""),
            operation_kind=data.get("operation_kind", "other"),
            snapgrid=data.get("snapgrid", {}),
            model_metadata=data.get("model_metadata"),
            relationships=data.get("relationships", {}),
            changes=data.get("changes", {}),
            created_at=data.get("created_at", ""),
            comment_count=int(data.get("comment_count", 0)),
            has_unread=bool(data.get("has_unread", False)),
        )


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


class VersionStore:
    """Persist versions per variable and assemble card histories."""

    def __init__(self, root: str, clock=None):
        self.root = root
        self.clock = clock or utc_now_iso
        os.makedirs(root, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._variable_locks: dict[str, threading.Lock] = {}

    # -- paths -----------------------------------------------------------

    def _variable_dir(self, variable: str) -> str:
        return os.path.join(self.root, variable)

    def _csv_path(self, variable: str, index: int) -> str:
        return os.path.join(self._variable_dir(variable), f"v{index}.csv")

    def _meta_path(self, variable: str, index: int) -> str:
        return os.path.join(self._variable_dir(variable), f"v{index}.meta")

    def _registry_path(self) -> str:
        return os.path.join(self.root, "_variables.json")

    def _lock_for(self, variable: str) -> threading.Lock:
        with self._registry_lock:
            if variable not in self._variable_locks:
                self._variable_locks[variable] = threading.Lock()
            return self._variable_locks[variable]

    # -- registry --------------------------------------------------------

    def list_variables(self) -> list[str]:
        path = self._registry_path()
        if not os.path.exists(path):
            return []
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def _register_variable(self, variable: str) -> None:
        with self._registry_lock:
            names = self.list_variables()
            if variable not in names:
                names.append(variable)
                _atomic_write(self._registry_path(), json.dumps(names, indent=1))

    # -- versions --------------------------------------------------------

    def latest_index(self, variable: str) -> int | None:
        directory = self._variable_dir(variable)
        if not os.path.isdir(directory):
            return None
        indices = [
            int(m.group(1))
            for name in os.listdir(directory)
            if (m := re.fullmatch(r"v(\d+)\.meta", name))
        ]
        return max(indices) if indices else None

    def record_version(self, variable: str, frame: TabularFrame, provenance: CellExecution) -> int:
        """Persist a new version; a duplicate post is a no-op returning the
        existing index. Per-variable indices increase by exactly 1."""
        if not variable or not _VARIABLE_NAME.match(variable):
            raise StoreError(f"invalid variable name {variable!r}")
        with self._lock_for(variable):
            latest = self.latest_index(variable)
            if latest is not None:
                current = self.load_version(variable, latest)
                if current.provenance == provenance and current.frame.equals(frame):
                    return latest
                # Only the initial version may lack provenance code.
                if not provenance.code.strip():
                    raise StoreError(
                        f"version {latest + 1} of {variable!r} needs non-empty cell code"
                    )
            index = 0 if latest is None else latest + 1
            directory = self._variable_dir(variable)
            os.makedirs(directory, exist_ok=True)
            _atomic_write(self._csv_path(variable, index), write_snapshot(frame))
            meta = {
                "variable": variable,
                "index": index,
                "created_at": self.clock(),
                "provenance": provenance.to_jsonable(),
                "card": None,
            }
            _atomic_write(self._meta_path(variable, index), json.dumps(meta, indent=1))
            self._register_variable(variable)
            return index

    def load_frame(self, variable: str, index: int) -> TabularFrame:
        path = self._csv_path(variable, index)
        if not os.path.exists(path):
            if not os.path.isdir(self._variable_dir(variable)):
                raise UnknownVariableError(variable)
            raise UnknownVersionError(f"{variable} has no version {index}")
        with open(path, encoding="utf-8", newline="") as fh:
            return read_snapshot(fh.read())

    def _load_meta(self, variable: str, index: int) -> dict:
        path = self._meta_path(variable, index)
        if not os.path.exists(path):
            if not os.path.isdir(self._variable_dir(variable)):
                raise UnknownVariableError(variable)
            raise UnknownVersionError(f"{variable} has no version {index}")
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def load_version(self, variable: str, index: int) -> DatasetVersion:
        meta = self._load_meta(variable, index)
        return DatasetVersion(
            variable=variable,
            index=index,
            frame=self.load_frame(variable, index),
            provenance=CellExecution.from_jsonable(meta.get("provenance", {})),
            created_at=meta.get("created_at", ""),
        )

    def attach_card(self, variable: str, index: int, card: dict) -> None:
        with self._lock_for(variable):
            meta = self._load_meta(variable, index)
            meta["card"] = card
            _atomic_write(self._meta_path(variable, index), json.dumps(meta, indent=1))

    # -- cards -----------------------------------------------------------

    def get_history(
        self, variable: str, comment_source=None, subscriber: str | None = None
    ) -> list[DataVersionCard]:
        """Cards in version order. ``comment_source(variable, index,
        subscriber)`` supplies (comment_count, has_unread) when given."""
        latest = self.latest_index(variable)
        if latest is None:
            raise UnknownVariableError(variable)
        cards = []
        for index in range(latest + 1):
            meta = self._load_meta(variable, index)
            card_data = meta.get("card") or {
                "variable": variable,
                "version": index,
                "summary": "",
                "operation_kind": "other",
                "snapgrid": {},
            }
            card = DataVersionCard.from_jsonable(card_data)
            card.created_at = meta.get("created_at", "")
            if comment_source is not None:
                count, unread = comment_source(variable, index, subscriber)
                card.comment_count = count
                card.has_unread = unread
            cards.append(card)
        return cards

    # -- statistics ------------------------------------------------------

    def column_stats(self, variable: str, version: int, column: str) -> ColumnStats:
        frame = self.load_frame(variable, version)
        if column not in frame.column_names:
            candidates = get_close_matches(column, frame.column_names, n=3, cutoff=0.3)
            raise UnknownStatsColumnError(column, candidates or frame.column_names[:3])
        return compute_column_stats(frame, column)
