"""Shared test utilities: random frame/edit generators and oracles."""

from __future__ import annotations

import random
import string

from snapcards.frame import TabularFrame
from snapcards.values import values_equal

CATEGORY_POOL = ["alpha", "beta", "gamma", "delta", "epsilon", ""]


def random_raw_frame(
    rng: random.Random,
    max_rows: int = 12,
    max_cols: int = 6,
    min_rows: int = 1,
    min_cols: int = 1,
) -> tuple[list[str], list[list[str | None]], list[int]]:
    """Raw (column names, cells, row ids) for TabularFrame.from_raw."""
    n_cols = rng.randint(min_cols, max_cols)
    n_rows = rng.randint(min_rows, max_rows)
    names = [f"col_{i}_{rng.choice(string.ascii_lowercase)}" for i in range(n_cols)]
    kinds = [rng.choice(["numeric", "categorical", "boolean"]) for _ in range(n_cols)]
    rows: list[list[str | None]] = []
    for _r in range(n_rows):
        row: list[str | None] = []
        for kind in kinds:
            if rng.random() < 0.08:
                row.append(None)
            elif kind == "numeric":
                row.append(str(round(rng.uniform(-100, 100), 3)))
            elif kind == "boolean":
                row.append(rng.choice(["true", "false"]))
            else:
                row.append(rng.choice(CATEGORY_POOL))
        rows.append(row)
    return names, rows, list(range(n_rows))


def random_frame(rng: random.Random, **kwargs) -> TabularFrame:
    names, rows, ids = random_raw_frame(rng, **kwargs)
    return TabularFrame.from_raw(names, rows, ids)


def random_edited_pair(
    rng: random.Random, max_rows: int = 50, max_cols: int = 20
) -> tuple[TabularFrame, TabularFrame]:
    """A (prev, next) pair built from one raw matrix plus random edits:
    cell modifications, row/column adds and removes, optional reordering."""
    names, rows, ids = random_raw_frame(rng, max_rows=max_rows, max_cols=max_cols, min_rows=2, min_cols=2)
    prev = TabularFrame.from_raw(names, rows, ids)

    next_names = list(names)
    next_rows = [list(r) for r in rows]
    next_ids = list(ids)

    # Modify random cells.
    for _ in range(rng.randint(0, max(1, len(ids) * len(names) // 4))):
        r = rng.randrange(len(next_rows))
        c = rng.randrange(len(next_names))
        next_rows[r][c] = rng.choice(
            [str(round(rng.uniform(-100, 100), 3)), rng.choice(CATEGORY_POOL), None, "true"]
        )

    # Remove rows.
    for _ in range(rng.randint(0, len(next_ids) // 3)):
        victim = rng.randrange(len(next_ids))
        next_ids.pop(victim)
        next_rows.pop(victim)

    # Remove columns.
    for _ in range(rng.randint(0, len(next_names) // 3)):
        victim = rng.randrange(len(next_names))
        next_names.pop(victim)
        for row in next_rows:
            row.pop(victim)

    # Add columns at random positions.
    for i in range(rng.randint(0, 2)):
        pos = rng.randint(0, len(next_names))
        next_names.insert(pos, f"new_col_{i}")
        for row in next_rows:
            row.insert(pos, rng.choice([str(rng.randint(0, 9)), rng.choice(CATEGORY_POOL), None]))

    # Add rows with fresh ids.
    next_id_set = set(next_ids)
    fresh = max(ids, default=-1) + 1
    for _ in range(rng.randint(0, 3)):
        while fresh in next_id_set:
            fresh += 1
        next_ids.append(fresh)
        next_id_set.add(fresh)
        next_rows.append(
            [rng.choice([str(rng.randint(-50, 50)), rng.choice(CATEGORY_POOL), None]) for _ in next_names]
        )
        fresh += 1

    # Occasionally shuffle row order to exercise non-canonical ordering.
    if rng.random() < 0.3 and len(next_ids) > 1:
        paired = list(zip(next_ids, next_rows))
        rng.shuffle(paired)
        next_ids = [p[0] for p in paired]
        next_rows = [p[1] for p in paired]

    next_frame = TabularFrame.from_raw(next_names, next_rows, next_ids)
    return prev, next_frame


def brute_force_modified(prev: TabularFrame, next_frame: TabularFrame) -> set[tuple[int, str]]:
    """Cell-by-cell comparison over shared rows and columns."""
    shared_cols = [c for c in next_frame.column_names if c in set(prev.column_names)]
    shared_rows = [r for r in prev.row_ids if next_frame.has_row(r)]
    out = set()
    for rid in shared_rows:
        for col in shared_cols:
            if not values_equal(prev.cell(rid, col), next_frame.cell(rid, col)):
                out.add((rid, col))
    return out


def cell_changed(prev: TabularFrame | None, next_frame: TabularFrame, rid: int, col: str) -> bool:
    """Independent changed-cell predicate straight from the two frames."""
    in_prev = prev is not None and prev.has_row(rid) and col in set(prev.column_names)
    in_next = next_frame.has_row(rid) and col in set(next_frame.column_names)
    if in_prev and in_next:
        return not values_equal(prev.cell(rid, col), next_frame.cell(rid, col))
    return in_prev != in_next


def coverage(
    prev: TabularFrame | None,
    next_frame: TabularFrame,
    row_ids,
    columns,
) -> int:
    return sum(1 for rid in row_ids for col in columns if cell_changed(prev, next_frame, rid, col))


def naive_filter_matches(frame: TabularFrame, conditions) -> list[int]:
    """Row-by-row predicate evaluation, independent of apply_filters."""
    from snapcards.values import is_missing

    out = []
    for rid in frame.row_ids:
        ok = True
        for cond in conditions:
            cell = frame.cell(rid, cond.column)
            if is_missing(cell):
                ok = False
                break
            if cond.operator == "==":
                ok = cell == cond.value
            elif cond.operator == "!=":
                ok = cell != cond.value
            elif cond.operator == "<":
                ok = cell < cond.value
            elif cond.operator == "<=":
                ok = cell <= cond.value
            elif cond.operator == ">":
                ok = cell > cond.value
            else:
                ok = cell >= cond.value
            if not ok:
                break
        if ok:
            out.append(rid)
    return out


def random_filter_conditions(rng: random.Random, frame: TabularFrame):
    """Random schema-valid condition lists for oracle-equivalence checks."""
    from snapcards.query import FilterCondition
    from snapcards.values import is_missing

    conditions = []
    for _ in range(rng.randint(1, 3)):
        descriptor = rng.choice(frame.columns)
        values = [v for v in frame.column_values(descriptor.name) if not is_missing(v)]
        if descriptor.dtype == "numeric":
            operator = rng.choice(["==", "!=", "<", "<=", ">", ">="])
            value = rng.choice(values) if values and rng.random() < 0.7 else round(rng.uniform(-50, 50), 2)
            conditions.append(FilterCondition(descriptor.name, operator, float(value)))
        elif descriptor.dtype == "boolean":
            conditions.append(
                FilterCondition(descriptor.name, rng.choice(["==", "!="]), rng.random() < 0.5)
            )
        else:
            value = rng.choice(values) if values else "alpha"
            conditions.append(FilterCondition(descriptor.name, rng.choice(["==", "!="]), value))
    return conditions
