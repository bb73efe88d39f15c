"""Sync service: the rendezvous between the capture client and the dashboard.

Ingests (code cell, snapshot) events, runs the card pipeline
(diff, relationships, subset, insight), hosts per-card comment threads,
and serves cursor-based deltas so every item is delivered exactly once per
cursor chain. Pipeline stages backed by the LLM degrade to the
deterministic analyzers when the gateway is unavailable.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field

from .diffs import ChangeSet, diff
from .frame import FrameError, TabularFrame, read_snapshot
from .gateway import LlmGateway, disabled_gateway
from .insight import (
    classify_operation,
    extract_model_metadata,
    infer_column_relationships,
    summarize,
)
from .query import FilterCondition, QueryResult, apply_filters, parse_query
from .snapgrid import render_snapgrid, select_subset
from .store import CellExecution, DataVersionCard, UnknownVariableError, VersionStore

logger = logging.getLogger("snapcards.service")

SUBSCRIBER_ROLES = ("domain_expert", "data_scientist")
DEFAULT_POLL_SECONDS = 15


def poll_interval_seconds() -> int:
    try:
        return int(os.environ.get("SYNC_POLL_SECONDS", DEFAULT_POLL_SECONDS))
    except ValueError:
        return DEFAULT_POLL_SECONDS


@dataclass
class Comment:
    id: str
    variable: str
    version: int
    author_role: str
    text: str
    created_at: str
    read_by: set[str] = field(default_factory=set)

    def to_jsonable(self) -> dict:
        return {
            "id": self.id,
            "variable": self.variable,
            "version": self.version,
            "author_role": self.author_role,
            "text": self.text,
            "created_at": self.created_at,
            "read_by": sorted(self.read_by),
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "Comment":
        return cls(
            id=data["id"],
            variable=data["variable"],
            version=int(data["version"]),
            author_role=data["author_role"],
            text=data["text"],
            created_at=data.get("created_at", ""),
            read_by=set(data.get("read_by", [])),
        )


@dataclass
class SyncDelta:
    cards: list[dict]
    comments: list[dict]
    unread: dict[str, bool]
    next_cursor: int
    notifications: list[str] = field(default_factory=list)
    poll_seconds: int = DEFAULT_POLL_SECONDS
    resync: bool = False

    def to_jsonable(self) -> dict:
        return {
            "cards": self.cards,
            "comments": self.comments,
            "unread": self.unread,
            "next_cursor": self.next_cursor,
            "notifications": self.notifications,
            "poll_seconds": self.poll_seconds,
            "resync": self.resync,
        }


@dataclass
class IngestResult:
    variable: str
    index: int
    duplicate: bool
    card: dict | None = None


class SyncService:
    def __init__(
        self,
        store: VersionStore,
        gateway: LlmGateway | None = None,
        backend: str = "deterministic",
        poll_seconds: int | None = None,
    ):
        self.store = store
        self.gateway = gateway or disabled_gateway()
        self.backend = backend
        self.poll_seconds = poll_seconds if poll_seconds is not None else poll_interval_seconds()
        self._events_path = os.path.join(store.root, "_events.jsonl")
        self._comments_path = os.path.join(store.root, "_comments.json")
        self._event_lock = threading.Lock()
        self._comment_lock = threading.Lock()
        self._next_seq: int | None = None

    # -- event log ---------------------------------------------------------

    def _load_events(self) -> list[dict]:
        if not os.path.exists(self._events_path):
            return []
        events = []
        with open(self._events_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events

    def _append_event(self, payload: dict) -> int:
        with self._event_lock:
            if self._next_seq is None:
                events = self._load_events()
                self._next_seq = events[-1]["seq"] + 1 if events else 1
            seq = self._next_seq
            self._next_seq += 1
            payload = {"seq": seq, **payload}
            with open(self._events_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(payload) + "\n")
            return seq

    def latest_cursor(self) -> int:
        events = self._load_events()
        return events[-1]["seq"] if events else 0

    # -- comments ----------------------------------------------------------

    def _load_comments(self) -> list[Comment]:
        if not os.path.exists(self._comments_path):
            return []
        with open(self._comments_path, encoding="utf-8") as fh:
            return [Comment.from_jsonable(c) for c in json.load(fh)]

    def _save_comments(self, comments: list[Comment]) -> None:
        tmp = self._comments_path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump([c.to_jsonable() for c in comments], fh, indent=1)
        os.replace(tmp, self._comments_path)

    def _comment_source(self, variable: str, index: int, subscriber: str | None):
        comments = [
            c for c in self._load_comments() if c.variable == variable and c.version == index
        ]
        unread = any(subscriber not in c.read_by for c in comments) if subscriber else False
        return len(comments), unread

    def add_comment(self, variable: str, version: int, author_role: str, text: str) -> Comment:
        if author_role not in SUBSCRIBER_ROLES:
            raise ValueError(f"unknown author role {author_role!r}")
        if not text or not text.strip():
            raise ValueError("comment text must be non-empty")
        latest = self.store.latest_index(variable)
        if latest is None:
            raise UnknownVariableError(variable)
        if not (0 <= version <= latest):
            raise ValueError(f"no card {variable} v{version} to anchor the comment to")
        with self._comment_lock:
            comments = self._load_comments()
            comment = Comment(
                id=f"c{len(comments) + 1}",
                variable=variable,
                version=version,
                author_role=author_role,
                text=text,
                created_at=self.store.clock(),
                read_by={author_role},
            )
            comments.append(comment)
            self._save_comments(comments)
        self._append_event({"kind": "comment", "id": comment.id})
        return comment

    # -- ingest pipeline -----------------------------------------------------

    def post_event(
        self,
        variable: str,
        snapshot_csv: str | None = None,
        provenance: CellExecution | None = None,
        frame: TabularFrame | None = None,
        scalars: dict[str, float] | None = None,
    ) -> IngestResult:
        """Record a version then assemble its card (diff -> relationships ->
        subset -> insight). Raises FrameError/StoreError on malformed input."""
        if frame is None:
            if snapshot_csv is None:
                raise FrameError("event needs a snapshot")
            frame = read_snapshot(snapshot_csv)
        provenance = provenance or CellExecution("", "", 0)

        before = self.store.latest_index(variable)
        index = self.store.record_version(variable, frame, provenance)
        if before is not None and index <= before:
            return IngestResult(variable=variable, index=index, duplicate=True)

        prev = self.store.load_frame(variable, index - 1) if index > 0 else None
        changes = diff(prev, frame)
        card = self._assemble_card(variable, index, provenance.code, changes, prev, frame, scalars)
        self.store.attach_card(variable, index, card)
        self._append_event({"kind": "card", "variable": variable, "version": index})
        return IngestResult(variable=variable, index=index, duplicate=False, card=card)

    def _assemble_card(
        self,
        variable: str,
        index: int,
        code: str,
        changes: ChangeSet,
        prev: TabularFrame | None,
        frame: TabularFrame,
        scalars: dict[str, float] | None,
    ) -> dict:
        kind = classify_operation(code, changes)
        existing = prev.column_names if prev is not None else []
        relationships = infer_column_relationships(
            code,
            existing,
            changes.added_column_names,
            backend=self.backend,
            gateway=self.gateway,
            changes=changes,
        )
        source_to_derived: dict[str, list[str]] = {}
        for derived, sources in relationships.items():
            for source in sources:
                source_to_derived.setdefault(source, []).append(derived)
        spec = select_subset(changes, prev, frame, source_to_derived)
        grid = render_snapgrid(spec, changes, prev, frame)
        summary = summarize(
            code, variable, changes, backend=self.backend, gateway=self.gateway, kind=kind
        )
        metadata = extract_model_metadata(
            code, backend=self.backend, gateway=self.gateway, scalars=scalars
        )
        card = DataVersionCard(
            variable=variable,
            version=index,
            summary=summary,
            operation_kind=kind.value,
            snapgrid=grid.to_jsonable(),
            model_metadata=metadata.to_jsonable() if metadata else None,
            relationships=relationships,
            changes={
                "added_columns": changes.added_column_names,
                "removed_columns": changes.removed_column_names,
                "added_rows": list(changes.added_rows),
                "removed_rows": list(changes.removed_rows),
                "modified_cell_count": len(changes.modified_cells),
                "full_replacement": changes.full_replacement,
            },
        )
        return card.to_jsonable()

    # -- reads ---------------------------------------------------------------

    def list_variables(self) -> list[str]:
        return self.store.list_variables()

    def get_history(self, variable: str, subscriber: str | None = None) -> list[DataVersionCard]:
        return self.store.get_history(variable, comment_source=self._comment_source, subscriber=subscriber)

    def column_stats(self, variable: str, version: int, column: str):
        return self.store.column_stats(variable, version, column)

    # -- query -----------------------------------------------------------------

    def run_query(
        self, variable: str, version: int, text: str, backend: str | None = None
    ) -> tuple[list[FilterCondition], QueryResult, dict]:
        frame = self.store.load_frame(variable, version)
        conditions = parse_query(
            text, frame.columns, backend=backend or self.backend_for_query(), gateway=self.gateway
        )
        result = apply_filters(frame, conditions)
        prev = self.store.load_frame(variable, version - 1) if version > 0 else None
        changes = diff(prev, frame)
        meta_card = self.store.get_history(variable)[version]
        source_to_derived: dict[str, list[str]] = {}
        for derived, sources in (meta_card.relationships or {}).items():
            for source in sources:
                source_to_derived.setdefault(source, []).append(derived)
        spec = select_subset(
            changes, prev, frame, source_to_derived, query_rows=result.matching_row_ids
        )
        grid = render_snapgrid(
            spec, changes, prev, frame, query_matches=set(result.matching_cells)
        )
        return conditions, result, grid.to_jsonable()

    def backend_for_query(self) -> str:
        return "llm" if self.backend == "llm" else "grammar"

    # -- polling -----------------------------------------------------------------

    def poll(self, subscriber: str, cursor: int | None) -> SyncDelta:
        events = self._load_events()
        latest = events[-1]["seq"] if events else 0
        resync = False
        if cursor is None or not isinstance(cursor, int) or cursor < 0 or cursor > latest:
            cursor = 0
            resync = True

        fresh = [e for e in events if e["seq"] > cursor]
        cards: list[dict] = []
        comment_payloads: list[dict] = []
        notifications: list[str] = []

        all_comments = {c.id: c for c in self._load_comments()}
        for event in fresh:
            if event["kind"] == "card":
                history = self.store.get_history(
                    event["variable"], comment_source=self._comment_source, subscriber=subscriber
                )
                cards.append(history[event["version"]].to_jsonable())
            elif event["kind"] == "comment":
                comment = all_comments.get(event["id"])
                if comment is not None:
                    comment_payloads.append(comment.to_jsonable())
                    if comment.author_role != subscriber:
                        notifications.append(
                            f"A new comment has been added for variable '{comment.variable}'!"
                        )

        # Unread flags reflect the pre-poll state; fetching marks them read.
        unread = {
            variable: any(
                subscriber not in c.read_by
                for c in all_comments.values()
                if c.variable == variable
            )
            for variable in self.list_variables()
        }

        delivered_ids = {p["id"] for p in comment_payloads}
        if delivered_ids:
            with self._comment_lock:
                comments = self._load_comments()
                for comment in comments:
                    if comment.id in delivered_ids:
                        comment.read_by.add(subscriber)
                self._save_comments(comments)

        return SyncDelta(
            cards=cards,
            comments=comment_payloads,
            unread=unread,
            next_cursor=latest,
            notifications=notifications,
            poll_seconds=self.poll_seconds,
            resync=resync,
        )
