"""Domain-expert-readable summaries of a data operation.

The deterministic backend fills a per-kind template from ChangeSet facts;
the LLM backend sends the code-summary prompt and falls back to the
deterministic text when the gateway is unavailable. Neither output ever
contains the word "dataframe", and deterministic summaries only mention
column names present in the code or the ChangeSet.
"""

from __future__ import annotations

import logging
import re

from ..diffs import ChangeSet
from ..gateway import GatewayDisabledError, LlmGateway, TransportError
from ..values import format_value, is_missing
from .classify import OperationKind, classify_operation
from .codescan import loaded_file_name, scan_code
from .models import extract_model_metadata
from .vocab import Vocabulary, load_vocabulary

logger = logging.getLogger("snapcards.insight")

NO_CHANGE_SUMMARY = "No changes to the data."

_FORBIDDEN = re.compile(r"(?i)\bdata\s*frames?\b|\bdataframes?\b")


def scrub(text: str) -> str:
    """Replace any 'dataframe' mention; the term is banned for both backends."""
    return _FORBIDDEN.sub("data", text)


def _join(names: list[str], quote: bool = True) -> str:
    shown = [f"'{n}'" if quote else str(n) for n in names]
    if len(shown) == 1:
        return shown[0]
    if len(shown) == 2:
        return f"{shown[0]} and {shown[1]}"
    return ", ".join(shown[:-1]) + f", and {shown[-1]}"


def _fill_strategy(code: str) -> str | None:
    match = re.search(r"strategy\s*=\s*['\"](\w+)['\"]", code)
    if match:
        return {
            "most_frequent": "most frequent value",
            "mean": "mean value",
            "median": "median value",
            "constant": "constant value",
        }.get(match.group(1), match.group(1))
    if re.search(r"\.mode\(\)", code):
        return "most frequent value"
    if re.search(r"\.mean\(\)", code):
        return "mean value"
    if re.search(r"\.median\(\)", code):
        return "median value"
    return None


def _fill_label(code: str, changes: ChangeSet) -> str | None:
    match = re.search(r"fillna\s*\(\s*['\"]([^'\"]*)['\"]", code)
    if match:
        return match.group(1)
    new_values = {
        format_value(e.new) for e in changes.modified_cells if not is_missing(e.new)
    }
    if len(new_values) == 1:
        return new_values.pop()
    return None


def _split_targets(code: str, vocab: Vocabulary) -> list[str]:
    scan = scan_code(code)
    for targets, fn in scan.tuple_call_targets:
        if fn in vocab.split_fns:
            return targets
    for call in scan.calls:
        if call.name in vocab.split_fns and call.assign_targets:
            return call.assign_targets
    return []


def _generic_summary(changes: ChangeSet) -> str:
    pieces = []
    if changes.modified_cells:
        cols = sorted({e.column for e in changes.modified_cells})
        pieces.append(f"{len(changes.modified_cells)} values changed in {_join(cols)}")
    if changes.added_columns:
        pieces.append(f"added {_join(changes.added_column_names)}")
    if changes.removed_columns:
        pieces.append(f"removed {_join(changes.removed_column_names)}")
    if changes.added_rows:
        pieces.append(f"added {len(changes.added_rows)} rows")
    if changes.removed_rows:
        pieces.append(f"removed {len(changes.removed_rows)} rows")
    if not pieces:
        return NO_CHANGE_SUMMARY
    return "The data was updated: " + "; ".join(pieces) + "."


def _deterministic_summary(
    code: str,
    variable: str,
    changes: ChangeSet | None,
    kind: OperationKind,
    vocab: Vocabulary,
) -> str:
    code = code or ""
    if kind == OperationKind.MODEL_TRAINING:
        meta = extract_model_metadata(code, backend="deterministic", vocab=vocab)
        if meta is not None:
            parts = f"Trained a {meta.model_name} model"
            if meta.train_variables:
                parts += f" using {_join(meta.train_variables, quote=False)}"
            if meta.metrics:
                names = [m.name for m in meta.metrics]
                parts += f", evaluated with {_join(names, quote=False)}"
            return parts + "."
        return "Trained a model on the data."

    if changes is None or changes.is_empty():
        return NO_CHANGE_SUMMARY

    if kind == OperationKind.DATASET_LOADING:
        filename = loaded_file_name(code, vocab.read_fns)
        rows = len(changes.added_rows) if changes else 0
        cols = len(changes.added_columns) if changes else 0
        if filename:
            return f"Loading data from the {filename} file into '{variable}' ({rows} rows, {cols} columns)."
        return f"Loaded a new dataset into '{variable}' with {rows} rows and {cols} columns."

    if kind == OperationKind.MISSING_VALUE_IMPUTATION:
        cols = sorted({e.column for e in changes.modified_cells})
        strategy = _fill_strategy(code) or "most frequent value"
        col_part = f"the {_join(cols)} column" + ("s" if len(cols) > 1 else "")
        return (
            f"Missing values in {col_part} were filled in with the {strategy} "
            f"of that column ({len(changes.modified_cells)} values)."
        )

    if kind == OperationKind.REPLACE_MISSING_WITH_LABEL:
        cols = sorted({e.column for e in changes.modified_cells})
        label = _fill_label(code, changes) or "a label"
        col_part = f"the {_join(cols)} column" + ("s" if len(cols) > 1 else "")
        return (
            f"Empty values in {col_part} were replaced with the value '{label}' "
            f"({len(changes.modified_cells)} values)."
        )

    if kind == OperationKind.OUTLIER_REMOVAL:
        ids = list(changes.removed_rows)
        if len(ids) <= 10:
            id_part = " (" + ", ".join(str(i) for i in ids) + ")"
        else:
            id_part = ""
        plural = "row" if len(ids) == 1 else "rows"
        return f"Removed {len(ids)} {plural}{id_part} from the data that contained outlier values."

    if kind == OperationKind.ONE_HOT_ENCODING:
        added = changes.added_column_names
        removed = changes.removed_column_names
        source = _join(removed) if removed else "the original column"
        return (
            f"Created new columns ({_join(added)}) with a 0 or 1 for each unique value "
            f"of {source}, which was removed."
        )

    if kind == OperationKind.CATEGORICAL_TO_NUMERIC:
        cols = sorted({e.column for e in changes.modified_cells})
        col_part = f"the {_join(cols)} column" + ("s" if len(cols) > 1 else "")
        return f"The values in {col_part} were converted from labels to numbers."

    if kind == OperationKind.FEATURE_FILTERING:
        removed = changes.removed_column_names
        plural = "column" if len(removed) == 1 else "columns"
        return f"Removed the {plural} named {_join(removed)} from the data."

    if kind == OperationKind.DATASET_SPLITTING:
        targets = _split_targets(code, vocab)
        if targets:
            return (
                f"The data was split into separate sets: {_join(targets, quote=False)}. "
                f"'{variable}' holds one of the parts."
            )
        return f"The data was split into separate training and testing sets; '{variable}' holds one part."

    return _generic_summary(changes)


def summarize(
    code: str,
    variable: str,
    changes: ChangeSet | None,
    backend: str = "deterministic",
    gateway: LlmGateway | None = None,
    kind: OperationKind | None = None,
    vocab: Vocabulary | None = None,
) -> str:
    """One or two plain sentences describing what happened to the data."""
    vocab = vocab or load_vocabulary()
    if kind is None:
        kind = classify_operation(code, changes, vocab)
    if backend == "llm" and gateway is not None:
        try:
            reply = gateway.complete("code_summary", {"dataframe_var": variable, "code": code or ""})
            text = reply.strip()
            if text:
                return scrub(text)
        except (GatewayDisabledError, TransportError):
            logger.warning("summary: gateway unavailable, using deterministic backend")
    return scrub(_deterministic_summary(code, variable, changes, kind, vocab))
