from __future__ import annotations

import json
import os

import pytest

from snapcards.diffs import ChangeSet, ColumnChange, diff
from snapcards.frame import TabularFrame
from snapcards.insight import (
    OperationKind,
    classify_operation,
    extract_model_metadata,
    infer_column_relationships,
    summarize,
)
from snapcards.insight.vocab import load_vocabulary, parse_vocabulary
from snapcards.values import MISSING

from conftest import EDUCATION_DIR, expected_metadata, snippet


def load_session_steps():
    with open(os.path.join(EDUCATION_DIR, "session.jsonl"), encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def session_changesets():
    """Replay the fixture snapshots into (code, changes) pairs per step."""
    from snapcards.frame import read_snapshot

    steps = load_session_steps()
    frames = {}
    out = []
    for step in steps:
        path = os.path.join(EDUCATION_DIR, step["snapshot"])
        with open(path, encoding="utf-8", newline="") as fh:
            frame = read_snapshot(fh.read())
        prev = frames.get(step["variable"])
        out.append((step["code"], diff(prev, frame), prev, frame))
        frames[step["variable"]] = frame
    return out


EXPECTED_KINDS = [
    OperationKind.DATASET_LOADING,
    OperationKind.MISSING_VALUE_IMPUTATION,
    OperationKind.REPLACE_MISSING_WITH_LABEL,
    OperationKind.OUTLIER_REMOVAL,
    OperationKind.ONE_HOT_ENCODING,
    OperationKind.CATEGORICAL_TO_NUMERIC,
    OperationKind.FEATURE_FILTERING,
    OperationKind.DATASET_SPLITTING,
]


def test_fixture_session_classifies_in_order():
    kinds = [classify_operation(code, changes) for code, changes, _p, _n in session_changesets()]
    assert kinds == EXPECTED_KINDS


def test_classify_loading_needs_full_replacement_and_read():
    frame = TabularFrame.from_raw(["a"], [["1"]])
    changes = diff(None, frame)
    assert classify_operation('df = pd.read_csv("x.csv")', changes) == OperationKind.DATASET_LOADING


def test_classify_empty_code_is_other():
    assert classify_operation("", ChangeSet()) == OperationKind.OTHER
    assert classify_operation("", None) == OperationKind.OTHER


def test_classify_feature_filtering_prefers_changeset():
    changes = ChangeSet(removed_columns=[ColumnChange("Noise", {0: "x"})])
    assert classify_operation("something_opaque()", changes) == OperationKind.FEATURE_FILTERING


def test_classify_removed_columns_with_model_is_training():
    changes = ChangeSet(removed_columns=[ColumnChange("Target", {0: "x"})])
    code = "reg = LinearRegression().fit(X, y)"
    assert classify_operation(code, changes) == OperationKind.MODEL_TRAINING


def test_classify_model_training_on_quiet_diff():
    code = snippet("logreg")
    assert classify_operation(code, ChangeSet()) == OperationKind.MODEL_TRAINING


def test_classify_preprocessing_only_is_not_training():
    assert classify_operation(snippet("imputer"), ChangeSet()) == OperationKind.OTHER


# -- summaries ----------------------------------------------------------------


def test_summary_noop():
    assert summarize("x = 1", "df", ChangeSet()) == "No changes to the data."


def test_summary_never_contains_dataframe_token():
    for code, changes, _p, _n in session_changesets():
        text = summarize(code, "df", changes)
        assert "dataframe" not in text.lower()


def test_summary_mentions_only_known_columns():
    known_steps = session_changesets()
    for code, changes, prev, nxt in known_steps:
        text = summarize(code, "df", changes)
        quoted = [part for part in text.split("'")[1::2]]
        known = set(nxt.column_names) | set(prev.column_names if prev else [])
        known |= {"df", "X_train", "unknown"}
        known |= set(code.split())
        for name in quoted:
            assert name in known or name in code, f"{name!r} not grounded in {text!r}"


def test_summary_drop_column_names_it():
    _, changes, _p, _n = session_changesets()[6]
    text = summarize('df = df.drop(columns=["PracticeSport"])', "df", changes)
    assert "PracticeSport" in text
    assert "removed" in text.lower()


def test_summary_imputation_mentions_column_and_strategy():
    code, changes, _p, _n = session_changesets()[1]
    text = summarize(code, "df", changes)
    assert "ParentEducation" in text
    assert "most frequent" in text


def test_summary_loading_mentions_file():
    code, changes, _p, _n = session_changesets()[0]
    text = summarize(code, "df", changes)
    assert "student_exam_scores.csv" in text


def test_summary_llm_backend_scrubs_and_falls_back(recorded_gateway, disabled_gateway_counting):
    code, changes, _p, _n = session_changesets()[0]
    text = summarize(code, "df", changes, backend="llm", gateway=recorded_gateway)
    assert text == "The code is loading data from the student_exam_scores.csv file."
    gateway, transport = disabled_gateway_counting
    fallback = summarize(code, "df", changes, backend="llm", gateway=gateway)
    assert "student_exam_scores.csv" in fallback  # deterministic fallback
    assert transport.calls == 0


# -- column relationships -------------------------------------------------------


def test_relationships_one_hot_prefix_heuristic():
    code = 'df = pd.get_dummies(df, columns=["Gender"])'
    rel = infer_column_relationships(
        code, ["Gender", "Age"], ["Gender_Female", "Gender_Male"]
    )
    assert rel == {"Gender_Female": ["Gender"], "Gender_Male": ["Gender"]}


def test_relationships_empty_added_is_empty_map():
    assert infer_column_relationships("whatever", ["A"], []) == {}


def test_relationships_assignment_scan():
    code = 'df["BMI"] = df["Weight"] / (df["Height"] / 100) ** 2'
    rel = infer_column_relationships(code, ["Weight", "Height", "Age"], ["BMI"])
    assert rel == {"BMI": ["Weight", "Height"]}


def test_relationships_prefix_requires_corroboration():
    # No removal, non-binary values, no one-hot code: prefix alone is not enough.
    changes = ChangeSet(added_columns=[ColumnChange("Score_scaled", {0: 3.7, 1: 9.9})])
    rel = infer_column_relationships(
        "df['Score_scaled'] = scale(df)", ["Score"], ["Score_scaled"], changes=changes
    )
    assert rel == {}


def test_relationships_binary_values_trigger_prefix(recorded_gateway):
    changes = ChangeSet(added_columns=[ColumnChange("Flag_yes", {0: 1.0, 1: 0.0})])
    rel = infer_column_relationships("opaque()", ["Flag"], ["Flag_yes"], changes=changes)
    assert rel == {"Flag_yes": ["Flag"]}


def test_relationships_llm_backend_validates_subset(recorded_gateway):
    code = 'df = pd.get_dummies(df, columns=["Gender"])'
    rel = infer_column_relationships(
        code, ["Gender", "Age"], ["Gender_Female", "Gender_Male"],
        backend="llm", gateway=recorded_gateway,
    )
    assert rel == {"Gender_Female": ["Gender"], "Gender_Male": ["Gender"]}
    assert set(rel) <= {"Gender_Female", "Gender_Male"}
    for sources in rel.values():
        assert set(sources) <= {"Gender", "Age"}


# -- model metadata --------------------------------------------------------------


@pytest.mark.parametrize("backend", ["deterministic", "llm"])
@pytest.mark.parametrize("name", ["linreg", "linreg_trainonly", "logreg", "keras", "imputer"])
def test_model_metadata_fixture_corpus(name, backend, recorded_gateway):
    expected = expected_metadata()[name]
    meta = extract_model_metadata(snippet(name), backend=backend, gateway=recorded_gateway)
    if expected is None:
        assert meta is None
    else:
        assert meta is not None and meta.to_jsonable() == expected


def test_model_metadata_metric_values_from_scalars():
    meta = extract_model_metadata(snippet("linreg"), scalars={"mse_test": 3.25, "mae_test": 1.5})
    values = {m.variable: m.value for m in meta.metrics}
    assert values == {"mse_test": 3.25, "mae_test": 1.5}


def test_model_metadata_absent_never_blank_record():
    for code in ("", "x = 1 + 1", "scaler = StandardScaler()\nscaler.fit(X)"):
        assert extract_model_metadata(code) is None


def test_vocabulary_file_parses_and_covers_needed_names():
    vocab = load_vocabulary()
    assert "LinearRegression" in vocab.estimators
    assert vocab.estimators["Sequential"] == "Keras Sequential"
    assert "SimpleImputer" in vocab.preprocessors
    assert vocab.metric_fns["mean_squared_error"] == "Mean Squared Error"
    assert vocab.metric_vars["mae"] == "Mean Absolute Error"
    assert "train_test_split" in vocab.split_fns
    assert "read_csv" in vocab.read_fns


def test_vocabulary_rejects_malformed_lines():
    with pytest.raises(ValueError):
        parse_vocabulary("estimator\tOnlyTwoFields")
    with pytest.raises(ValueError):
        parse_vocabulary("witchcraft\tX\tY")


def test_deterministic_backend_covers_llm_shapes(recorded_gateway):
    # Wherever the recorded backend produces a record, the deterministic one
    # must produce a schema-valid record of the same shape.
    for name in ("linreg", "logreg", "keras"):
        llm = extract_model_metadata(snippet(name), backend="llm", gateway=recorded_gateway)
        det = extract_model_metadata(snippet(name), backend="deterministic")
        assert llm is not None and det is not None
        assert det.model_name
        assert isinstance(det.train_variables, list) and det.train_variables
        assert isinstance(det.test_variables, list)
        assert all(m.name for m in det.metrics)
