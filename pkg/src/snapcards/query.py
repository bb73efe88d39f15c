"""Compile natural-language queries into filter conditions and evaluate them.

The grammar backend covers the constrained phrasings domain experts use
("below", "greater than", "between A and B", conjunctions with "and"),
resolving column references case-, spacing-, and punctuation-insensitively.
The LLM backend renders the filter prompt and normalizes its reply to the
same canonical conditions. Conditions always conjoin; "or" is rejected.
"""

from __future__ import annotations

import difflib
import json
import logging
import re
from dataclasses import dataclass, field

from .frame import ColumnDescriptor, TabularFrame
from .gateway import (
    GatewayDisabledError,
    LlmGateway,
    MalformedReplyError,
    TransportError,
)
from .values import CellValue, is_missing, parse_boolean, parse_number

logger = logging.getLogger("snapcards.query")

CANONICAL_OPERATORS = ("==", "!=", "<", "<=", ">", ">=")
_ORDER_OPERATORS = {"<", "<=", ">", ">="}


class QueryError(ValueError):
    pass


class QueryParseError(QueryError):
    """The text could not be compiled into at least one condition."""


class UnknownColumnError(QueryError):
    def __init__(self, token: str, candidates: list[str]):
        hint = f"; nearest candidates: {', '.join(candidates)}" if candidates else ""
        super().__init__(f"no column matches {token!r}{hint}")
        self.token = token
        self.candidates = candidates


class FilterTypeError(QueryError):
    """Operator or value incompatible with the column dtype."""


@dataclass
class FilterCondition:
    column: str
    operator: str
    value: CellValue

    def to_jsonable(self) -> dict:
        return {"column": self.column, "operator": self.operator, "value": self.value}


@dataclass
class QueryResult:
    matching_row_ids: list[int]
    matching_cells: list[tuple[int, str]] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "matching_row_ids": list(self.matching_row_ids),
            "matching_cells": [[rid, col] for rid, col in self.matching_cells],
        }


def normalize_name(name: str) -> str:
    """Lowercase and drop every non-alphanumeric character."""
    return "".join(ch for ch in name.lower() if ch.isalnum())


def resolve_column(token: str, columns: list[ColumnDescriptor]) -> str | None:
    wanted = normalize_name(token)
    if not wanted:
        return None
    for col in columns:
        if normalize_name(col.name) == wanted:
            return col.name
    return None


def nearest_columns(token: str, columns: list[ColumnDescriptor]) -> list[str]:
    names = [c.name for c in columns]
    matches = difflib.get_close_matches(token, names, n=3, cutoff=0.3)
    if matches:
        return matches
    return names[:3]


# -- grammar backend ---------------------------------------------------------

_SYMBOL_RE = re.compile(r"(>=|<=|==|!=|>|<|=)")
_FILLERS = {
    "show", "me", "all", "rows", "patients", "students", "subjects", "records",
    "entries", "people", "those", "whose", "having", "with", "where", "that",
    "which", "who", "the", "a", "an", "of", "for", "in", "to", "please",
}
_CONNECTIVES = {"is", "are", "was", "were", "value", "values", "has", "have", "equals"}

# Comparator phrases, longest first. "=" normalizes to "==".
_COMPARATORS: list[tuple[tuple[str, ...], str]] = [
    (("less", "than"), "<"),
    (("lower", "than"), "<"),
    (("smaller", "than"), "<"),
    (("fewer", "than"), "<"),
    (("greater", "than"), ">"),
    (("more", "than"), ">"),
    (("higher", "than"), ">"),
    (("larger", "than"), ">"),
    (("bigger", "than"), ">"),
    (("at", "least"), ">="),
    (("at", "most"), "<="),
    (("not", "equal", "to"), "!="),
    (("equal", "to"), "=="),
    (("below",), "<"),
    (("under",), "<"),
    (("above",), ">"),
    (("over",), ">"),
    (("exactly",), "=="),
    ((">=",), ">="),
    (("<=",), "<="),
    (("==",), "=="),
    (("!=",), "!="),
    (("=",), "=="),
    ((">",), ">"),
    (("<",), "<"),
]

# Bare value words that imply an equality on a well-known column.
_VALUE_LEXICON = {
    "female": ("gender", "sex"),
    "male": ("gender", "sex"),
}

_MAX_SPAN = 4


def _tokenize(text: str) -> list[str]:
    spaced = _SYMBOL_RE.sub(r" \1 ", text)
    tokens = []
    for raw in spaced.split():
        stripped = raw.strip(".,;:!?\"“”")
        if stripped:
            tokens.append(stripped)
    return tokens


def _split_conjuncts(tokens: list[str]) -> list[list[str]]:
    conjuncts: list[list[str]] = []
    current: list[str] = []
    numbers_since_between = 0
    in_between = False
    for tok in tokens:
        low = tok.lower()
        if low == "or":
            raise QueryParseError("disjunction ('or') is not supported; use 'and'")
        if low == "and" and not in_between:
            if current:
                conjuncts.append(current)
                current = []
            continue
        current.append(tok)
        if low == "between":
            in_between = True
            numbers_since_between = 0
        elif in_between and parse_number(tok) is not None:
            numbers_since_between += 1
            if numbers_since_between >= 2:
                in_between = False
    if current:
        conjuncts.append(current)
    return conjuncts


def _find_column_span(
    tokens: list[str], start: int, columns: list[ColumnDescriptor]
) -> tuple[str, int, int] | None:
    """Leftmost longest token window that resolves to a column. Windows may
    not contain symbol tokens (they vanish under normalization)."""
    for length in range(min(_MAX_SPAN, len(tokens) - start), 0, -1):
        for i in range(start, len(tokens) - length + 1):
            window = tokens[i : i + length]
            if any(normalize_name(t) == "" for t in window):
                continue
            resolved = resolve_column(" ".join(window), columns)
            if resolved is not None:
                return resolved, i, i + length
    return None


def _typed_value(raw: str, column: str, columns: list[ColumnDescriptor]) -> CellValue:
    dtype = next(c.dtype for c in columns if c.name == column)
    if dtype == "numeric":
        number = parse_number(raw)
        if number is None:
            raise FilterTypeError(f"column {column!r} is numeric but value {raw!r} is not")
        return number
    if dtype == "boolean":
        flag = parse_boolean(raw)
        if flag is None:
            raise FilterTypeError(f"column {column!r} is boolean but value {raw!r} is not")
        return flag
    return raw.strip("'\"")


def _match_comparator(tokens: list[str], start: int) -> tuple[str, int] | None:
    lowered = [t.lower() for t in tokens]
    for phrase, op in _COMPARATORS:
        end = start + len(phrase)
        if end <= len(tokens) and tuple(lowered[start:end]) == phrase:
            return op, end
    return None


def _parse_between(
    tokens: list[str], columns: list[ColumnDescriptor]
) -> list[FilterCondition]:
    span = _find_column_span(tokens, 0, columns)
    if span is None:
        raise UnknownColumnError(" ".join(tokens), nearest_columns(" ".join(tokens), columns))
    column, _s, _e = span
    idx = next(i for i, t in enumerate(tokens) if t.lower() == "between")
    numbers = [parse_number(t) for t in tokens[idx + 1 :]]
    bounds = [n for n in numbers if n is not None][:2]
    if len(bounds) < 2:
        raise QueryParseError(f"'between' needs two bounds near {' '.join(tokens)!r}")
    dtype = next(c.dtype for c in columns if c.name == column)
    if dtype != "numeric":
        raise FilterTypeError(f"'between' requires a numeric column, {column!r} is {dtype}")
    return [
        FilterCondition(column, ">=", bounds[0]),
        FilterCondition(column, "<=", bounds[1]),
    ]


def _parse_conjunct(
    tokens: list[str], columns: list[ColumnDescriptor]
) -> list[FilterCondition]:
    if any(t.lower() == "between" for t in tokens):
        return _parse_between(tokens, columns)

    conditions: list[FilterCondition] = []
    i = 0
    unresolved: list[str] = []
    while i < len(tokens):
        span = _find_column_span(tokens, i, columns)
        span_start = span[1] if span else len(tokens)

        # Bare lexicon values ("Female") before any column reference.
        j = i
        while j < span_start:
            low = tokens[j].lower()
            if low in _VALUE_LEXICON:
                targets = _VALUE_LEXICON[low]
                target_col = None
                for col in columns:
                    if normalize_name(col.name) in targets:
                        target_col = col.name
                        break
                if target_col is not None:
                    conditions.append(
                        FilterCondition(target_col, "==", _typed_value(tokens[j], target_col, columns))
                    )
            elif low not in _FILLERS and low not in _CONNECTIVES:
                unresolved.append(tokens[j])
            j += 1

        if span is None:
            break
        column, _s, k = span

        while k < len(tokens) and (
            tokens[k].lower() in {"the", "a", "an", "of"} or tokens[k].lower() in _CONNECTIVES
        ):
            found = _match_comparator(tokens, k)
            if found:
                break
            k += 1
        found = _match_comparator(tokens, k)
        if found:
            operator, k = found
        elif any(t.lower() in ("is", "are", "was", "were", "equals") for t in tokens[max(0, k - 3) : k]):
            operator = "=="
        else:
            raise QueryParseError(
                f"no comparator found for column {column!r} in {' '.join(tokens)!r}"
            )

        value_tokens = tokens[k:]
        if not value_tokens:
            raise QueryParseError(f"no value found for column {column!r}")
        dtype = next(c.dtype for c in columns if c.name == column)
        if dtype == "numeric":
            number_tok = next((t for t in value_tokens if parse_number(t) is not None), None)
            if number_tok is None:
                raise FilterTypeError(
                    f"column {column!r} is numeric but no numeric value follows"
                )
            conditions.append(FilterCondition(column, operator, parse_number(number_tok)))
            consumed = value_tokens.index(number_tok) + 1
        else:
            text = " ".join(value_tokens).strip("'\"")
            conditions.append(FilterCondition(column, operator, _typed_value(text, column, columns)))
            consumed = len(value_tokens)
        i = k + consumed

    if not conditions and unresolved:
        token = " ".join(unresolved[:3])
        raise UnknownColumnError(token, nearest_columns(token, columns))
    return conditions


def parse_query(
    text: str,
    columns: list[ColumnDescriptor],
    backend: str = "grammar",
    gateway: LlmGateway | None = None,
) -> list[FilterCondition]:
    """Compile query text to conditions; raises QueryError when nothing parses."""
    if not text or not text.strip():
        raise QueryParseError("empty query")
    if backend == "llm" and gateway is not None:
        bindings = {
            "columns": "[" + ", ".join(c.name for c in columns) + "]",
            "natural_language_query": text,
        }
        try:
            raw = gateway.complete_structured("query_to_filters", bindings)
        except (GatewayDisabledError, TransportError):
            logger.warning("query: gateway unavailable, using grammar backend")
            return parse_query(text, columns, backend="grammar")
        except MalformedReplyError as exc:
            raise QueryParseError(f"completion reply unusable: {exc}") from exc
        conditions = []
        for entry in raw:
            resolved = resolve_column(entry["column"], columns)
            if resolved is None:
                raise UnknownColumnError(entry["column"], nearest_columns(entry["column"], columns))
            conditions.append(
                FilterCondition(resolved, entry["operator"], _typed_value(str(entry["value"]), resolved, columns))
            )
        if not conditions:
            raise QueryParseError("no conditions in completion reply")
        return conditions

    tokens = _tokenize(text)
    conditions: list[FilterCondition] = []
    for conjunct in _split_conjuncts(tokens):
        conditions.extend(_parse_conjunct(conjunct, columns))
    if not conditions:
        raise QueryParseError(f"no filter conditions found in {text!r}")
    return conditions


# -- evaluation --------------------------------------------------------------


def validate_conditions(frame: TabularFrame, conditions: list[FilterCondition]) -> None:
    if not conditions:
        raise QueryError("empty condition list")
    for cond in conditions:
        if cond.operator not in CANONICAL_OPERATORS:
            raise QueryError(f"unsupported operator {cond.operator!r}")
        try:
            descriptor = frame.descriptor(cond.column)
        except KeyError:
            raise UnknownColumnError(cond.column, nearest_columns(cond.column, frame.columns))
        if cond.operator in _ORDER_OPERATORS and descriptor.dtype != "numeric":
            raise FilterTypeError(
                f"operator {cond.operator!r} needs a numeric column, "
                f"{cond.column!r} is {descriptor.dtype}"
            )
        if descriptor.dtype == "numeric" and not isinstance(cond.value, float):
            raise FilterTypeError(f"column {cond.column!r} is numeric, got {cond.value!r}")


def _holds(cell: CellValue, operator: str, value: CellValue) -> bool:
    if is_missing(cell):
        return False
    if operator == "==":
        return cell == value
    if operator == "!=":
        return cell != value
    if not isinstance(cell, float) or not isinstance(value, float):
        return False
    if operator == "<":
        return cell < value
    if operator == "<=":
        return cell <= value
    if operator == ">":
        return cell > value
    return cell >= value


def apply_filters(version, conditions: list[FilterCondition]) -> QueryResult:
    """Rows matching every condition (conjunction); missing never matches."""
    frame: TabularFrame = version.frame if hasattr(version, "frame") else version
    validate_conditions(frame, conditions)

    condition_columns: list[str] = []
    for cond in conditions:
        if cond.column not in condition_columns:
            condition_columns.append(cond.column)
    col_idx = {c: frame.column_index(c) for c in condition_columns}

    matching: list[int] = []
    for rid, row in zip(frame.row_ids, frame.rows):
        if all(_holds(row[col_idx[c.column]], c.operator, c.value) for c in conditions):
            matching.append(rid)
    cells = [(rid, col) for rid in matching for col in condition_columns]
    return QueryResult(matching_row_ids=matching, matching_cells=cells)
