"""Classify a data operation from its cell code and observed ChangeSet.

ChangeSet evidence wins over code text: a diff that only removes columns is
feature filtering no matter what the cell looks like, as long as no model
is being trained. Unknown patterns fall back to ``other``.
"""

from __future__ import annotations

import re
from enum import Enum

from ..diffs import ChangeSet
from ..values import is_missing
from .codescan import scan_code
from .vocab import Vocabulary, load_vocabulary


class OperationKind(str, Enum):
    DATASET_LOADING = "dataset_loading"
    MISSING_VALUE_IMPUTATION = "missing_value_imputation"
    REPLACE_MISSING_WITH_LABEL = "replace_missing_with_label"
    OUTLIER_REMOVAL = "outlier_removal"
    ONE_HOT_ENCODING = "one_hot_encoding"
    CATEGORICAL_TO_NUMERIC = "categorical_to_numeric"
    FEATURE_FILTERING = "feature_filtering"
    DATASET_SPLITTING = "dataset_splitting"
    MODEL_TRAINING = "model_training"
    OTHER = "other"


_ONEHOT_PATTERN = re.compile(r"\bget_dummies\b|\bOneHotEncoder\b")
_IMPUTER_PATTERN = re.compile(
    r"\bSimpleImputer\b|\bKNNImputer\b|\bIterativeImputer\b|\bstrategy\s*=|"
    r"\.mode\(\)|\.mean\(\)|\.median\(\)|most_frequent|\binterpolate\b"
)
_FILLNA_LITERAL_PATTERN = re.compile(r"\bfillna\s*\(\s*['\"]|\breplace\s*\(\s*np\.nan\s*,\s*['\"]")


def _is_binary(values) -> bool:
    present = [v for v in values if not is_missing(v)]
    if not present:
        return False
    for v in present:
        if isinstance(v, bool):
            continue
        if isinstance(v, float) and v in (0.0, 1.0):
            continue
        if isinstance(v, str) and v in ("0", "1", "true", "false", "True", "False"):
            continue
        return False
    return True


def _added_columns_binary(changes: ChangeSet) -> bool:
    if not changes.added_columns:
        return False
    return all(col.values and _is_binary(col.values.values()) for col in changes.added_columns)


def has_model_call(code: str, vocab: Vocabulary) -> bool:
    scan = scan_code(code)
    if not scan.parsed:
        return any(re.search(rf"\b{re.escape(n)}\s*\(", code) for n in vocab.estimators)
    constructed = set()
    for call in scan.calls:
        if call.name in vocab.estimators:
            constructed.add(call.name)
            constructed.update(call.assign_targets)
    if not constructed:
        return False
    for call in scan.calls:
        if call.name in ("fit", "fit_transform", "evaluate"):
            if call.receiver in constructed or call.chained_constructor in vocab.estimators:
                return True
    return False


def classify_operation(
    code: str, changes: ChangeSet | None, vocab: Vocabulary | None = None
) -> OperationKind:
    vocab = vocab or load_vocabulary()
    code = code or ""
    has_split = bool(re.search(r"\b({})\s*\(".format("|".join(vocab.split_fns)), code))
    has_read = bool(
        re.search(r"\b({})\s*\(".format("|".join(re.escape(f) for f in vocab.read_fns)), code)
    )
    has_model = has_model_call(code, vocab) if code else False

    if changes is not None and changes.full_replacement:
        if has_split:
            return OperationKind.DATASET_SPLITTING
        if has_read or code:
            return OperationKind.DATASET_LOADING
        return OperationKind.OTHER

    if changes is not None and not changes.is_empty():
        mods = changes.modified_cells
        only_removed_cols = bool(changes.removed_columns) and not (
            changes.added_columns or changes.added_rows or changes.removed_rows or mods
        )
        only_removed_rows = bool(changes.removed_rows) and not (
            changes.added_columns or changes.removed_columns or changes.added_rows or mods
        )

        if changes.added_columns and _added_columns_binary(changes) and (
            changes.removed_columns or _ONEHOT_PATTERN.search(code)
        ):
            return OperationKind.ONE_HOT_ENCODING
        if only_removed_cols and not has_model:
            return OperationKind.FEATURE_FILTERING
        if only_removed_rows:
            return OperationKind.OUTLIER_REMOVAL
        if mods and not (
            changes.added_columns
            or changes.removed_columns
            or changes.added_rows
            or changes.removed_rows
        ):
            if all(is_missing(e.old) for e in mods):
                if _IMPUTER_PATTERN.search(code):
                    return OperationKind.MISSING_VALUE_IMPUTATION
                if _FILLNA_LITERAL_PATTERN.search(code):
                    return OperationKind.REPLACE_MISSING_WITH_LABEL
                if len({str(e.new) for e in mods}) == 1 and isinstance(mods[0].new, str):
                    return OperationKind.REPLACE_MISSING_WITH_LABEL
                return OperationKind.MISSING_VALUE_IMPUTATION
            if all(
                isinstance(e.old, str) and isinstance(e.new, (float, bool)) and not is_missing(e.new)
                for e in mods
            ):
                return OperationKind.CATEGORICAL_TO_NUMERIC

    # Code-text fallback. A fresh variable stream (full replacement) already
    # preferred splitting above; on a quiet diff a trained model wins.
    if has_model:
        return OperationKind.MODEL_TRAINING
    if has_split:
        return OperationKind.DATASET_SPLITTING
    if has_read and changes is not None and not changes.is_empty():
        return OperationKind.DATASET_LOADING
    return OperationKind.OTHER
