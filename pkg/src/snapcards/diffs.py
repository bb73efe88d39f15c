"""Structured diffs between consecutive versions of a tracked variable.

Rows align by stable row id, columns by exact name; there is no rename
detection (a renamed column is a remove plus an add) and no fuzzy row
matching. ``diff`` is total; ``apply_changes`` inverts it exactly, so the
round trip ``apply_changes(prev, diff(prev, next)) == next`` holds
cell-for-cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frame import ColumnDescriptor, TabularFrame, infer_dtype_from_values
from .values import CellValue, from_jsonable, to_jsonable, values_equal


class InconsistentChangeError(ValueError):
    """A ChangeSet references rows or columns its base frame does not have."""


@dataclass
class CellEdit:
    row_id: int
    column: str
    old: CellValue
    new: CellValue

    def to_jsonable(self) -> dict:
        return {
            "row_id": self.row_id,
            "column": self.column,
            "old": to_jsonable(self.old),
            "new": to_jsonable(self.new),
        }


@dataclass
class ColumnChange:
    """An added or removed column together with its per-row values."""

    name: str
    values: dict[int, CellValue] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "values": [[rid, to_jsonable(v)] for rid, v in self.values.items()],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "ColumnChange":
        return cls(
            name=data["name"],
            values={int(rid): from_jsonable(v) for rid, v in data.get("values", [])},
        )


@dataclass
class ChangeSet:
    """Difference between two frames.

    A column appears in at most one of added/removed; cells of added columns
    or added rows never also appear in modified_cells. ``added_row_values``
    carries the full contents of added rows (per resulting column order) so
    the diff can be replayed. ``row_order`` / ``column_order`` are only set
    when the next frame's ordering differs from the canonical one
    (surviving entries in prev order, then additions).
    """

    modified_cells: list[CellEdit] = field(default_factory=list)
    added_columns: list[ColumnChange] = field(default_factory=list)
    removed_columns: list[ColumnChange] = field(default_factory=list)
    added_rows: list[int] = field(default_factory=list)
    removed_rows: list[int] = field(default_factory=list)
    added_row_values: dict[int, list[CellValue]] = field(default_factory=dict)
    full_replacement: bool = False
    row_order: list[int] | None = None
    column_order: list[str] | None = None

    def is_empty(self) -> bool:
        return not (
            self.modified_cells
            or self.added_columns
            or self.removed_columns
            or self.added_rows
            or self.removed_rows
            or self.full_replacement
            or self.row_order is not None
            or self.column_order is not None
        )

    @property
    def added_column_names(self) -> list[str]:
        return [c.name for c in self.added_columns]

    @property
    def removed_column_names(self) -> list[str]:
        return [c.name for c in self.removed_columns]

    def modified_by_column(self) -> dict[str, list[CellEdit]]:
        out: dict[str, list[CellEdit]] = {}
        for edit in self.modified_cells:
            out.setdefault(edit.column, []).append(edit)
        return out

    def to_jsonable(self) -> dict:
        out = {
            "modified_cells": [e.to_jsonable() for e in self.modified_cells],
            "added_columns": [c.to_jsonable() for c in self.added_columns],
            "removed_columns": [c.to_jsonable() for c in self.removed_columns],
            "added_rows": list(self.added_rows),
            "removed_rows": list(self.removed_rows),
            "added_row_values": [
                [rid, [to_jsonable(v) for v in row]] for rid, row in self.added_row_values.items()
            ],
            "full_replacement": self.full_replacement,
        }
        if self.row_order is not None:
            out["row_order"] = list(self.row_order)
        if self.column_order is not None:
            out["column_order"] = list(self.column_order)
        return out

    @classmethod
    def from_jsonable(cls, data: dict) -> "ChangeSet":
        return cls(
            modified_cells=[
                CellEdit(
                    row_id=int(e["row_id"]),
                    column=e["column"],
                    old=from_jsonable(e["old"]),
                    new=from_jsonable(e["new"]),
                )
                for e in data.get("modified_cells", [])
            ],
            added_columns=[ColumnChange.from_jsonable(c) for c in data.get("added_columns", [])],
            removed_columns=[ColumnChange.from_jsonable(c) for c in data.get("removed_columns", [])],
            added_rows=[int(r) for r in data.get("added_rows", [])],
            removed_rows=[int(r) for r in data.get("removed_rows", [])],
            added_row_values={
                int(rid): [from_jsonable(v) for v in row]
                for rid, row in data.get("added_row_values", [])
            },
            full_replacement=bool(data.get("full_replacement", False)),
            row_order=data.get("row_order"),
            column_order=data.get("column_order"),
        )


def diff(prev: TabularFrame | None, next_frame: TabularFrame) -> ChangeSet:
    """Compute the structured difference between two frames.

    With ``prev`` absent the result is a full replacement: every column and
    row of ``next_frame`` is reported added. Ordering is deterministic:
    modified cells by (row id ascending, column order of next), row lists
    by ascending row id.
    """
    if prev is None:
        # Row contents live in added_row_values; added_columns just name the schema.
        changes = ChangeSet(full_replacement=True)
        changes.added_columns = [ColumnChange(c.name) for c in next_frame.columns]
        changes.added_rows = sorted(next_frame.row_ids)
        changes.added_row_values = {rid: list(next_frame.row(rid)) for rid in changes.added_rows}
        if next_frame.row_ids != changes.added_rows:
            changes.row_order = list(next_frame.row_ids)
        return changes

    prev_cols = prev.column_names
    next_cols = next_frame.column_names
    shared_cols = [c for c in next_cols if c in set(prev_cols)]
    added_cols = [c for c in next_cols if c not in set(prev_cols)]
    removed_cols = [c for c in prev_cols if c not in set(next_cols)]

    prev_ids = set(prev.row_ids)
    next_ids = set(next_frame.row_ids)
    shared_rows = sorted(prev_ids & next_ids)
    added_rows = sorted(next_ids - prev_ids)
    removed_rows = sorted(prev_ids - next_ids)

    changes = ChangeSet(added_rows=added_rows, removed_rows=removed_rows)

    changes.added_columns = [
        ColumnChange(
            name,
            {rid: next_frame.cell(rid, name) for rid in next_frame.row_ids if rid in prev_ids},
        )
        for name in added_cols
    ]
    changes.removed_columns = [
        ColumnChange(name, dict(zip(prev.row_ids, prev.column_values(name))))
        for name in removed_cols
    ]
    changes.added_row_values = {rid: list(next_frame.row(rid)) for rid in added_rows}

    prev_idx = {c: prev.column_index(c) for c in shared_cols}
    next_idx = {c: next_frame.column_index(c) for c in shared_cols}
    for rid in shared_rows:
        prev_row = prev.row(rid)
        next_row = next_frame.row(rid)
        for name in shared_cols:
            old = prev_row[prev_idx[name]]
            new = next_row[next_idx[name]]
            if not values_equal(old, new):
                changes.modified_cells.append(CellEdit(rid, name, old, new))
    changes.modified_cells.sort(key=lambda e: (e.row_id, next_idx[e.column]))

    prev_had_content = bool(prev.column_names or prev.row_ids)
    next_has_content = bool(next_frame.column_names or next_frame.row_ids)
    if prev_had_content and next_has_content and not shared_cols and not shared_rows:
        changes.full_replacement = True

    canonical_rows = [r for r in prev.row_ids if r in next_ids] + added_rows
    if next_frame.row_ids != canonical_rows:
        changes.row_order = list(next_frame.row_ids)
    canonical_cols = [c for c in prev_cols if c in set(next_cols)] + added_cols
    if next_cols != canonical_cols:
        changes.column_order = list(next_cols)
    return changes


def apply_changes(prev: TabularFrame, changes: ChangeSet) -> TabularFrame:
    """Replay a ChangeSet produced by ``diff(prev, ...)`` onto ``prev``.

    Raises InconsistentChangeError when the changes reference rows or
    columns that do not exist where they should.
    """
    prev_cols = set(prev.column_names)
    for col in changes.removed_columns:
        if col.name not in prev_cols:
            raise InconsistentChangeError(f"removed column {col.name!r} not in frame")
    for col in changes.added_columns:
        if col.name in prev_cols:
            raise InconsistentChangeError(f"added column {col.name!r} already present")
    prev_ids = set(prev.row_ids)
    for rid in changes.removed_rows:
        if rid not in prev_ids:
            raise InconsistentChangeError(f"removed row {rid} not in frame")
    for rid in changes.added_rows:
        if rid in prev_ids:
            raise InconsistentChangeError(f"added row {rid} already present")
        if rid not in changes.added_row_values:
            raise InconsistentChangeError(f"added row {rid} has no values")

    removed_col_names = set(changes.removed_column_names)
    surviving_cols = [c for c in prev.column_names if c not in removed_col_names]
    column_names = surviving_cols + changes.added_column_names
    if changes.column_order is not None:
        if sorted(changes.column_order) != sorted(column_names):
            raise InconsistentChangeError("column_order does not match resulting columns")
        column_names = list(changes.column_order)

    removed_row_ids = set(changes.removed_rows)
    surviving_rows = [r for r in prev.row_ids if r not in removed_row_ids]
    row_ids = surviving_rows + list(changes.added_rows)
    if changes.row_order is not None:
        if sorted(changes.row_order) != sorted(row_ids):
            raise InconsistentChangeError("row_order does not match resulting rows")
        row_ids = list(changes.row_order)

    added_col_values = {c.name: c.values for c in changes.added_columns}
    edits: dict[tuple[int, str], CellValue] = {}
    for e in changes.modified_cells:
        if e.row_id not in prev_ids or e.row_id in removed_row_ids:
            raise InconsistentChangeError(f"modified cell references unknown row {e.row_id}")
        if e.column not in prev_cols or e.column in removed_col_names:
            raise InconsistentChangeError(f"modified cell references unknown column {e.column!r}")
        edits[(e.row_id, e.column)] = e.new

    added_row_set = set(changes.added_rows)
    cells: dict[int, dict[str, CellValue]] = {}
    for rid in row_ids:
        if rid in added_row_set:
            row_values = changes.added_row_values[rid]
            if len(row_values) != len(column_names):
                raise InconsistentChangeError(f"added row {rid} has wrong width")
            cells[rid] = dict(zip(column_names, row_values))
            continue
        row: dict[str, CellValue] = {}
        for name in column_names:
            if name in added_col_values:
                values = added_col_values[name]
                if rid not in values:
                    raise InconsistentChangeError(f"added column {name!r} missing value for row {rid}")
                row[name] = values[rid]
            elif (rid, name) in edits:
                row[name] = edits[(rid, name)]
            else:
                row[name] = prev.cell(rid, name)
        cells[rid] = row

    columns = [
        ColumnDescriptor(name, infer_dtype_from_values([cells[rid][name] for rid in row_ids]))
        for name in column_names
    ]
    rows = [[cells[rid][name] for name in column_names] for rid in row_ids]
    return TabularFrame(columns=columns, row_ids=row_ids, rows=rows)
