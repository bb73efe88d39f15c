"""Cell values: the tagged scalar type stored in tabular frames.

A cell is either MISSING, a number (float), a boolean, or text. Missingness
is first-class: it is distinct from the empty string and from zero.
"""

from __future__ import annotations

from typing import Union


class _Missing:
    """Singleton marker for an absent cell value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()

CellValue = Union[_Missing, float, bool, str]

# Relative tolerance for numeric cell equality. Re-serialization jitter must
# not create phantom diffs.
NUMERIC_RTOL = 1e-12

_TRUE_TOKENS = {"true", "1"}
_FALSE_TOKENS = {"false", "0"}


def is_missing(value: CellValue) -> bool:
    return value is MISSING or isinstance(value, _Missing)


def values_equal(a: CellValue, b: CellValue) -> bool:
    """Equality rule used by the diff engine.

    Missing equals only missing; numbers compare with relative tolerance
    ``|a-b| <= NUMERIC_RTOL * max(1, |a|, |b|)``; text byte-exact; booleans
    exact. Values of different tags are never equal.
    """
    if is_missing(a) or is_missing(b):
        return is_missing(a) and is_missing(b)
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, float) and isinstance(b, float):
        return abs(a - b) <= NUMERIC_RTOL * max(1.0, abs(a), abs(b))
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    return False


def parse_number(text: str) -> float | None:
    """Parse a decimal literal, rejecting inf/nan spellings and Python's
    underscore digit separators (data like "1_0" stays text)."""
    t = text.strip()
    if not t or "_" in t:
        return None
    lowered = t.lower()
    if lowered in ("nan", "inf", "-inf", "+inf", "infinity", "-infinity"):
        return None
    try:
        return float(t)
    except ValueError:
        return None


def parse_boolean(text: str) -> bool | None:
    lowered = text.strip().lower()
    if lowered in _TRUE_TOKENS:
        return True
    if lowered in _FALSE_TOKENS:
        return False
    return None


def format_value(value: CellValue) -> str:
    """Canonical text form used in snapshots and grid rendering."""
    if is_missing(value):
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return value


def coerce_cell(raw: str | None, dtype: str) -> CellValue:
    """Decode a raw snapshot field into a typed cell for the given dtype."""
    if raw is None:
        return MISSING
    if dtype == "numeric":
        num = parse_number(raw)
        if num is None:
            raise ValueError(f"cell {raw!r} is not numeric")
        return num
    if dtype == "boolean":
        flag = parse_boolean(raw)
        if flag is None:
            raise ValueError(f"cell {raw!r} is not boolean")
        return flag
    return raw


def to_jsonable(value: CellValue):
    """JSON interchange form: missing maps to null."""
    if is_missing(value):
        return None
    return value


def from_jsonable(value) -> CellValue:
    if value is None:
        return MISSING
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return value
    raise ValueError(f"unsupported cell value {value!r}")
