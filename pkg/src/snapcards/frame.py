"""Tabular frames: the immutable snapshot payload tracked per variable.

A frame is an ordered list of typed columns plus rows keyed by stable row
ids (the source row index at ingest). Snapshots serialize to CSV with a
header row and a leading ``__row_id`` column; every non-missing field is
quoted so that a missing cell (unquoted empty) stays distinct from the
empty string (``""``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .values import (
    MISSING,
    CellValue,
    coerce_cell,
    format_value,
    is_missing,
    parse_boolean,
    parse_number,
    to_jsonable,
    values_equal,
)

ROW_ID_COLUMN = "__row_id"

DTYPES = ("numeric", "categorical", "boolean", "text")

# Columns with at most this many distinct values are categorical, else text.
CATEGORICAL_MAX_DISTINCT = 20


class FrameError(ValueError):
    """Raised when a frame payload violates its invariants."""


@dataclass(frozen=True)
class ColumnDescriptor:
    name: str
    dtype: str

    def __post_init__(self):
        if self.dtype not in DTYPES:
            raise FrameError(f"unknown dtype {self.dtype!r} for column {self.name!r}")


def infer_dtype(raw_values: list[str | None]) -> str:
    """Infer a column dtype from raw text fields (None marks missing).

    Numeric iff every non-missing cell parses as a decimal; boolean iff all
    cells are in {0, 1, true, false}; else categorical when the distinct
    non-missing count is at most CATEGORICAL_MAX_DISTINCT, else text.
    """
    present = [v for v in raw_values if v is not None]
    if present and all(parse_number(v) is not None for v in present):
        return "numeric"
    if present and all(parse_boolean(v) is not None for v in present):
        return "boolean"
    if len(set(present)) <= CATEGORICAL_MAX_DISTINCT:
        return "categorical"
    return "text"


def infer_dtype_from_values(values: list[CellValue]) -> str:
    """Typed-value counterpart of infer_dtype; the two agree on parsed frames."""
    present = [v for v in values if not is_missing(v)]
    if present and all(isinstance(v, float) and not isinstance(v, bool) for v in present):
        return "numeric"
    if present and all(isinstance(v, bool) for v in present):
        return "boolean"
    if all(isinstance(v, str) for v in present):
        if len(set(present)) <= CATEGORICAL_MAX_DISTINCT:
            return "categorical"
        return "text"
    return "text"


@dataclass
class TabularFrame:
    """Immutable-by-convention tabular snapshot.

    All rows have exactly one cell per column; column names are unique;
    row ids are unique.
    """

    columns: list[ColumnDescriptor]
    row_ids: list[int]
    rows: list[list[CellValue]] = field(default_factory=list)

    def __post_init__(self):
        names = [c.name for c in self.columns]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise FrameError(f"duplicate column names: {dupes}")
        if ROW_ID_COLUMN in names:
            raise FrameError(f"{ROW_ID_COLUMN} is reserved")
        if len(set(self.row_ids)) != len(self.row_ids):
            raise FrameError("duplicate row ids")
        if len(self.rows) != len(self.row_ids):
            raise FrameError("row_ids and rows length mismatch")
        width = len(self.columns)
        for rid, row in zip(self.row_ids, self.rows):
            if len(row) != width:
                raise FrameError(f"row {rid} has {len(row)} cells, expected {width}")

    # -- accessors -------------------------------------------------------

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise KeyError(name)

    def descriptor(self, name: str) -> ColumnDescriptor:
        return self.columns[self.column_index(name)]

    def row(self, row_id: int) -> list[CellValue]:
        return self.rows[self._row_pos[row_id]]

    def has_row(self, row_id: int) -> bool:
        return row_id in self._row_pos

    def cell(self, row_id: int, column: str) -> CellValue:
        return self.row(row_id)[self.column_index(column)]

    def column_values(self, name: str) -> list[CellValue]:
        idx = self.column_index(name)
        return [row[idx] for row in self.rows]

    @property
    def _row_pos(self) -> dict[int, int]:
        cached = self.__dict__.get("_row_pos_cache")
        if cached is None or len(cached) != len(self.row_ids):
            cached = {rid: i for i, rid in enumerate(self.row_ids)}
            self.__dict__["_row_pos_cache"] = cached
        return cached

    def equals(self, other: "TabularFrame") -> bool:
        if self.columns != other.columns or self.row_ids != other.row_ids:
            return False
        for a, b in zip(self.rows, other.rows):
            if not all(values_equal(x, y) for x, y in zip(a, b)):
                return False
        return True

    # -- construction ----------------------------------------------------

    @classmethod
    def from_raw(
        cls,
        column_names: list[str],
        raw_rows: list[list[str | None]],
        row_ids: list[int] | None = None,
    ) -> "TabularFrame":
        """Build a frame from raw text fields, inferring one dtype per column."""
        if row_ids is None:
            row_ids = list(range(len(raw_rows)))
        for i, row in enumerate(raw_rows):
            if len(row) != len(column_names):
                raise FrameError(f"raw row {i} width {len(row)} != {len(column_names)}")
        columns = []
        for j, name in enumerate(column_names):
            dtype = infer_dtype([row[j] for row in raw_rows])
            columns.append(ColumnDescriptor(name, dtype))
        rows = [
            [MISSING if raw is None else coerce_cell(raw, col.dtype) for raw, col in zip(row, columns)]
            for row in raw_rows
        ]
        return cls(columns=columns, row_ids=list(row_ids), rows=rows)

    def to_jsonable(self) -> dict:
        return {
            "columns": [{"name": c.name, "dtype": c.dtype} for c in self.columns],
            "row_ids": list(self.row_ids),
            "rows": [[to_jsonable(v) for v in row] for row in self.rows],
        }


# -- snapshot CSV format ---------------------------------------------------
#
# Every non-missing field is written quoted ('"' doubled inside); a missing
# cell is the unquoted empty field. This stays plain CSV for outside tools
# while keeping missing distinct from the empty string on read-back.


def _encode_field(value: CellValue) -> str:
    if is_missing(value):
        return ""
    text = format_value(value)
    return '"' + text.replace('"', '""') + '"'


def _parse_snapshot_records(text: str) -> list[list[str | None]]:
    """Parse the canonical snapshot dialect: every field is either the
    unquoted empty string (missing) or fully quoted; quoted fields may
    contain commas, quotes (doubled), and newlines."""
    text = text.replace("\r\n", "\n")
    records: list[list[str | None]] = []
    i, n = 0, len(text)
    line = 1
    while i < n:
        fields: list[str | None] = []
        while True:
            if i < n and text[i] == '"':
                buf = []
                i += 1
                while True:
                    if i >= n:
                        raise FrameError(f"line {line}: unterminated quoted field")
                    ch = text[i]
                    if ch == '"':
                        if i + 1 < n and text[i + 1] == '"':
                            buf.append('"')
                            i += 2
                            continue
                        i += 1
                        break
                    if ch == "\n":
                        line += 1
                    buf.append(ch)
                    i += 1
                fields.append("".join(buf))
            else:
                if i < n and text[i] not in (",", "\n"):
                    raise FrameError(f"line {line}: unquoted field at offset {i}")
                fields.append(None)
            if i < n and text[i] == ",":
                i += 1
                continue
            break
        if not (len(fields) == 1 and fields[0] is None):
            records.append(fields)
        if i < n:
            if text[i] != "\n":
                raise FrameError(f"line {line}: unexpected character {text[i]!r}")
            i += 1
            line += 1
    return records


def write_snapshot(frame: TabularFrame) -> str:
    """Serialize a frame to snapshot CSV text (header + __row_id column)."""
    header = ",".join(
        '"' + name.replace('"', '""') + '"' for name in [ROW_ID_COLUMN, *frame.column_names]
    )
    lines = [header]
    for rid, row in zip(frame.row_ids, frame.rows):
        fields = [_encode_field(float(rid))] + [_encode_field(v) for v in row]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def read_snapshot(text: str) -> TabularFrame:
    """Parse snapshot CSV text back into a typed frame.

    A leading ``__row_id`` column supplies stable row ids; without one, ids
    are assigned from the row position. Dtypes are re-inferred, so a frame
    round-trips to identical values, column order, and row ids.
    """
    records = _parse_snapshot_records(text)
    if not records:
        raise FrameError("empty snapshot")
    header = records[0]
    if any(h is None for h in header):
        raise FrameError("missing column name in header")
    names = [h for h in header if h is not None]
    has_row_ids = bool(names) and names[0] == ROW_ID_COLUMN
    data_names = names[1:] if has_row_ids else names
    dupes = sorted({n for n in data_names if data_names.count(n) > 1})
    if dupes:
        raise FrameError(f"duplicate column names: {dupes}")

    raw_rows: list[list[str | None]] = []
    row_ids: list[int] = []
    for recno, fields in enumerate(records[1:], start=2):
        if len(fields) != len(names):
            raise FrameError(f"record {recno}: {len(fields)} fields, expected {len(names)}")
        if has_row_ids:
            raw_id = fields[0]
            if raw_id is None or parse_number(raw_id) is None:
                raise FrameError(f"record {recno}: bad {ROW_ID_COLUMN} {raw_id!r}")
            row_ids.append(int(float(raw_id)))
            raw_rows.append(fields[1:])
        else:
            row_ids.append(recno - 2)
            raw_rows.append(fields)
    if len(set(row_ids)) != len(row_ids):
        raise FrameError("duplicate row ids in snapshot")
    return TabularFrame.from_raw(data_names, raw_rows, row_ids)
