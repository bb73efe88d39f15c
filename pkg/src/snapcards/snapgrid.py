"""SnapGrid: the bounded display window over a data operation.

Selects at most 9 rows and 9 columns maximizing coverage of the ChangeSet,
then renders each cell into one of six glyph states with its previous and
new values. Columns whose changes do not fit carry an overflow count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .diffs import ChangeSet
from .frame import TabularFrame
from .values import CellValue, MISSING, format_value, is_missing, to_jsonable

GRID_LIMIT = 9
VALUE_DISPLAY_LIMIT = 12
LEGEND_VERSION = "1"


class CellState(str, Enum):
    UNCHANGED = "unchanged"
    MODIFIED = "modified"
    ADDED = "added"
    REMOVED = "removed"
    NOT_PRESENT = "not_present"
    QUERY_MATCH = "query_match"


@dataclass
class SnapGridSpec:
    """Which rows/columns the grid shows, plus relationship boxes.

    relationship_boxes pairs a source column with the columns derived from
    it (for example a one-hot encoded original and its indicator columns).
    """

    selected_row_ids: list[int]
    selected_columns: list[str]
    relationship_boxes: list[tuple[str, list[str]]] = field(default_factory=list)


@dataclass
class GridCell:
    row_id: int
    column: str
    state: CellState
    old: CellValue = MISSING
    new: CellValue = MISSING
    has_old: bool = False
    has_new: bool = False
    in_relationship_box: bool = False

    def to_jsonable(self) -> dict:
        out = {"state": self.state.value, "in_relationship_box": self.in_relationship_box}
        if self.has_old:
            out["old"] = to_jsonable(self.old)
            out["old_display"] = display_value(self.old)
        if self.has_new:
            out["new"] = to_jsonable(self.new)
            out["new_display"] = display_value(self.new)
        return out


@dataclass
class SnapGrid:
    spec: SnapGridSpec
    cells: list[list[GridCell]]
    column_change_totals: dict[str, int]
    legend_version: str = LEGEND_VERSION
    warnings: list[str] = field(default_factory=list)

    def cell(self, row_id: int, column: str) -> GridCell:
        i = self.spec.selected_row_ids.index(row_id)
        j = self.spec.selected_columns.index(column)
        return self.cells[i][j]

    def overflow_counts(self) -> dict[str, int]:
        """Total changed cells for columns with more changes than the grid can show."""
        return {
            c: n
            for c, n in self.column_change_totals.items()
            if c in self.spec.selected_columns and n > GRID_LIMIT
        }

    def to_jsonable(self) -> dict:
        return {
            "rows": list(self.spec.selected_row_ids),
            "columns": list(self.spec.selected_columns),
            "cells": [[cell.to_jsonable() for cell in row] for row in self.cells],
            "overflow": self.overflow_counts(),
            "relationship_boxes": [
                {"source": src, "derived": list(derived)}
                for src, derived in self.spec.relationship_boxes
            ],
            "legend_version": self.legend_version,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "SnapGrid":
        from .values import MISSING, from_jsonable

        spec = SnapGridSpec(
            selected_row_ids=list(data.get("rows", [])),
            selected_columns=list(data.get("columns", [])),
            relationship_boxes=[
                (box["source"], list(box["derived"]))
                for box in data.get("relationship_boxes", [])
            ],
        )
        cells = []
        for rid, row in zip(spec.selected_row_ids, data.get("cells", [])):
            row_cells = []
            for col, cell in zip(spec.selected_columns, row):
                row_cells.append(
                    GridCell(
                        row_id=rid,
                        column=col,
                        state=CellState(cell["state"]),
                        old=from_jsonable(cell.get("old")) if "old" in cell else MISSING,
                        new=from_jsonable(cell.get("new")) if "new" in cell else MISSING,
                        has_old="old" in cell,
                        has_new="new" in cell,
                        in_relationship_box=bool(cell.get("in_relationship_box", False)),
                    )
                )
            cells.append(row_cells)
        totals = {c: int(n) for c, n in data.get("overflow", {}).items()}
        return cls(
            spec=spec,
            cells=cells,
            column_change_totals=totals,
            legend_version=data.get("legend_version", LEGEND_VERSION),
            warnings=list(data.get("warnings", [])),
        )


def display_value(value: CellValue) -> str:
    """Grid display form: full data is kept elsewhere, long text is ellipsized."""
    if is_missing(value):
        return ""
    text = format_value(value)
    if len(text) > VALUE_DISPLAY_LIMIT:
        return text[: VALUE_DISPLAY_LIMIT - 1] + "…"
    return text


def _combined_columns(prev: TabularFrame | None, next_frame: TabularFrame) -> list[str]:
    # Next's columns in order, then removed-only columns in prev order.
    cols = list(next_frame.column_names)
    if prev is not None:
        seen = set(cols)
        cols += [c for c in prev.column_names if c not in seen]
    return cols


def _column_change_totals(
    changes: ChangeSet, prev: TabularFrame | None, next_frame: TabularFrame
) -> dict[str, int]:
    totals: dict[str, int] = {c: 0 for c in _combined_columns(prev, next_frame)}
    for edit in changes.modified_cells:
        totals[edit.column] = totals.get(edit.column, 0) + 1
    added_cols = set(changes.added_column_names)
    removed_cols = set(changes.removed_column_names)
    n_next_rows = len(next_frame.row_ids)
    n_prev_rows = len(prev.row_ids) if prev is not None else 0
    for c in totals:
        if c in added_cols:
            totals[c] += n_next_rows
        elif c in removed_cols:
            totals[c] += n_prev_rows
        else:
            totals[c] += len(changes.added_rows) + len(changes.removed_rows)
    return totals


def _row_change_count(
    row_id: int,
    selected_columns: list[str],
    changes: ChangeSet,
    prev: TabularFrame | None,
    next_frame: TabularFrame,
    modified_by_row: dict[int, set[str]],
) -> int:
    selected = set(selected_columns)
    next_cols = set(next_frame.column_names)
    if changes.full_replacement or row_id in set(changes.added_rows):
        return len(selected & next_cols) if next_frame.has_row(row_id) else 0
    if row_id in set(changes.removed_rows):
        prev_cols = set(prev.column_names) if prev is not None else set()
        return len(selected & prev_cols)
    count = len(modified_by_row.get(row_id, set()) & selected)
    count += len(set(changes.added_column_names) & selected)
    count += len(set(changes.removed_column_names) & selected)
    return count


def select_subset(
    changes: ChangeSet,
    prev: TabularFrame | None,
    next_frame: TabularFrame,
    relationships: dict[str, list[str]] | None = None,
    query_rows: list[int] | None = None,
) -> SnapGridSpec:
    """Pick the grid window that maximizes visible change coverage.

    Columns: every added/removed/modified column plus relationship source
    columns; when more than 9 qualify they are ranked by changed-cell count,
    otherwise the window pads with unchanged columns in frame order. Rows:
    the 9 row ids with the highest changed-cell count inside the selected
    columns (ties by ascending row id, padding with unchanged rows). An
    active query replaces row selection with up to 9 matching rows.
    """
    relationships = relationships or {}
    combined_cols = _combined_columns(prev, next_frame)
    totals = _column_change_totals(changes, prev, next_frame)

    modified_cols: list[str] = []
    seen_modified = set()
    for edit in changes.modified_cells:
        if edit.column not in seen_modified:
            seen_modified.add(edit.column)
            modified_cols.append(edit.column)
    qualifying: list[str] = []
    qualifying_set = set()
    for name in combined_cols:
        is_affected = (
            name in set(changes.added_column_names)
            or name in set(changes.removed_column_names)
            or name in seen_modified
            or name in relationships
        )
        if is_affected and name not in qualifying_set:
            qualifying.append(name)
            qualifying_set.add(name)

    col_pos = {c: i for i, c in enumerate(combined_cols)}
    if len(qualifying) > GRID_LIMIT:
        ranked = sorted(qualifying, key=lambda c: (-totals[c], col_pos[c]))
        selected_columns = sorted(ranked[:GRID_LIMIT], key=lambda c: col_pos[c])
    else:
        selected_columns = list(qualifying)
        for name in combined_cols:
            if len(selected_columns) >= GRID_LIMIT:
                break
            if name not in qualifying_set:
                selected_columns.append(name)
        selected_columns = sorted(selected_columns, key=lambda c: col_pos[c])

    if query_rows is not None:
        selected_rows = sorted(query_rows)[:GRID_LIMIT]
    else:
        candidates = list(next_frame.row_ids)
        next_ids = set(next_frame.row_ids)
        if prev is not None:
            candidates += [r for r in prev.row_ids if r not in next_ids]
        modified_by_row: dict[int, set[str]] = {}
        for edit in changes.modified_cells:
            modified_by_row.setdefault(edit.row_id, set()).add(edit.column)
        counts = {
            rid: _row_change_count(rid, selected_columns, changes, prev, next_frame, modified_by_row)
            for rid in candidates
        }
        ranked_rows = sorted(candidates, key=lambda r: (-counts[r], r))
        selected_rows = sorted(ranked_rows[:GRID_LIMIT])

    boxes = [(src, list(derived)) for src, derived in relationships.items() if src in selected_columns]
    boxes.sort(key=lambda b: col_pos.get(b[0], len(combined_cols)))
    return SnapGridSpec(
        selected_row_ids=selected_rows,
        selected_columns=selected_columns,
        relationship_boxes=boxes,
    )


def render_snapgrid(
    spec: SnapGridSpec,
    changes: ChangeSet,
    prev: TabularFrame | None,
    next_frame: TabularFrame,
    query_matches: set[tuple[int, str]] | None = None,
) -> SnapGrid:
    """Assign one state per cell with precedence removed > added > modified >
    query_match > unchanged; cells outside both frames are not_present."""
    warnings: list[str] = []
    matches: set[tuple[int, str]] = set()
    if query_matches:
        for rid, col in query_matches:
            if next_frame.has_row(rid) and col in next_frame.column_names:
                matches.add((rid, col))
            else:
                warnings.append(f"query match ({rid}, {col!r}) outside frame ignored")

    added_rows = set(changes.added_rows)
    removed_rows = set(changes.removed_rows)
    added_cols = set(changes.added_column_names)
    removed_cols = set(changes.removed_column_names)
    edits = {(e.row_id, e.column): e for e in changes.modified_cells}
    boxed_columns = set()
    for src, derived in spec.relationship_boxes:
        boxed_columns.add(src)
        boxed_columns.update(derived)

    prev_cols = set(prev.column_names) if prev is not None else set()
    next_cols = set(next_frame.column_names)

    grid: list[list[GridCell]] = []
    for rid in spec.selected_row_ids:
        row_cells: list[GridCell] = []
        in_prev_row = prev is not None and prev.has_row(rid)
        in_next_row = next_frame.has_row(rid)
        for col in spec.selected_columns:
            exists_prev = in_prev_row and col in prev_cols
            exists_next = in_next_row and col in next_cols
            old = prev.cell(rid, col) if exists_prev else MISSING
            new = next_frame.cell(rid, col) if exists_next else MISSING
            cell = GridCell(
                row_id=rid,
                column=col,
                state=CellState.UNCHANGED,
                old=old,
                new=new,
                has_old=exists_prev,
                has_new=exists_next,
                in_relationship_box=col in boxed_columns,
            )
            if not exists_prev and not exists_next:
                cell.state = CellState.NOT_PRESENT
            elif exists_prev and (rid in removed_rows or col in removed_cols):
                cell.state = CellState.REMOVED
            elif exists_next and (
                changes.full_replacement or rid in added_rows or col in added_cols
            ):
                cell.state = CellState.ADDED
            elif (rid, col) in edits:
                cell.state = CellState.MODIFIED
            elif (rid, col) in matches:
                cell.state = CellState.QUERY_MATCH
            row_cells.append(cell)
        grid.append(row_cells)

    totals = _column_change_totals(changes, prev, next_frame)
    return SnapGrid(
        spec=spec,
        cells=grid,
        column_change_totals=totals,
        warnings=warnings,
    )
