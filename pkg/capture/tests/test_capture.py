"""Capture client tests against the real sync-service HTTP surface."""

from __future__ import annotations

import numpy as np
import pandas as pd
import pytest
import requests
from fastapi.testclient import TestClient

from snapcards.frame import read_snapshot
from snapcards.httpapi import create_app
from snapcards.service import SyncService
from snapcards.store import LogicalClock, VersionStore

from snapcards_capture import CaptureClient, serialize_frame


@pytest.fixture
def backend(tmp_path):
    store = VersionStore(str(tmp_path / "store"), clock=LogicalClock())
    service = SyncService(store, poll_seconds=15)
    return service, TestClient(create_app(service))


@pytest.fixture
def client(backend):
    _service, http = backend

    def poster(path: str, payload: dict) -> int:
        return http.post(path, json=payload).status_code

    return CaptureClient(poster=poster)


def student_df() -> pd.DataFrame:
    return pd.DataFrame(
        {
            "Gender": ["female", "male", "female", "male"],
            "EthnicGroup": ["group A", None, "group B", "group C"],
            "WritingScore": [72, 88, 64, 91],
        }
    )


def test_scripted_session_posts_expected_event_counts(backend, client):
    service, _http = backend
    namespace: dict = {}

    # Cell 1: load the dataset.
    namespace["df"] = student_df()
    assert client.on_cell_executed(namespace, 'df = pd.read_csv("student_exam_scores.csv")', 1) == 1

    # Cell 2: impute in place.
    namespace["df"] = namespace["df"].copy()
    namespace["df"]["EthnicGroup"] = namespace["df"]["EthnicGroup"].fillna("group A")
    code2 = "df['EthnicGroup'] = df['EthnicGroup'].fillna(df['EthnicGroup'].mode()[0])"
    assert client.on_cell_executed(namespace, code2, 2) == 1

    # Cell 3: split creates two new variables; df unchanged.
    shuffled = namespace["df"].sample(frac=1.0, random_state=7)
    namespace["X_train"] = shuffled.iloc[:3].drop(columns=["WritingScore"])
    namespace["X_test"] = shuffled.iloc[3:].drop(columns=["WritingScore"])
    code3 = "X_train, X_test = train_test_split(df, test_size=0.25)"
    assert client.on_cell_executed(namespace, code3, 3) == 2

    # No-op cell: nothing changed, nothing posted.
    assert client.on_cell_executed(namespace, "df.head()", 4) == 0

    assert service.list_variables() == ["df", "X_train", "X_test"]
    assert service.store.latest_index("df") == 1


def test_in_place_mutation_detected_by_content_hash(backend, client):
    service, _http = backend
    namespace = {"df": student_df()}
    client.on_cell_executed(namespace, "load", 1)
    namespace["df"].loc[0, "WritingScore"] = 99  # same object, mutated
    assert client.on_cell_executed(namespace, "df.loc[0, ...] = 99", 2) == 1
    assert service.store.latest_index("df") == 1


def test_posted_snapshots_round_trip_through_store_loader(backend, client):
    service, _http = backend
    df = student_df()
    client.on_cell_executed({"df": df}, "load", 1)
    loaded = service.store.load_frame("df", 0)
    direct = read_snapshot(serialize_frame(df))
    assert loaded.equals(direct)
    assert loaded.row_ids == list(df.index)
    # Missing cell survives; numeric column typed numeric.
    assert loaded.descriptor("WritingScore").dtype == "numeric"
    from snapcards.values import is_missing

    assert is_missing(loaded.cell(1, "EthnicGroup"))


def test_row_ids_preserved_across_row_drops(backend, client):
    service, _http = backend
    namespace = {"df": student_df()}
    client.on_cell_executed(namespace, "load", 1)
    namespace["df"] = namespace["df"].drop(index=[1, 2])
    client.on_cell_executed(namespace, "df = df.drop(index=[1, 2])", 2)
    frame = service.store.load_frame("df", 1)
    assert frame.row_ids == [0, 3]
    history = service.get_history("df")
    assert history[1].changes["removed_rows"] == [1, 2]


def test_scalars_forwarded_for_metric_values(backend, client):
    service, _http = backend
    df = student_df()
    namespace = {
        "X_train": df.drop(columns=["WritingScore"]),
        "mse_test": 12.25,
        "epoch": 3,
        "flag": True,
        "_hidden": 9.9,
    }
    code = (
        "reg = LinearRegression().fit(X_train, y_train)\n"
        "mse_test = mean_squared_error(y_test, reg.predict(X_test))"
    )
    client.on_cell_executed(namespace, code, 1)
    card = service.get_history("X_train")[0]
    metrics = {m["variable"]: m["value"] for m in card.model_metadata["metrics"]}
    assert metrics["mse_test"] == 12.25


def test_unreachable_service_buffers_and_retries(backend):
    _service, http = backend
    flaky = {"down": True}

    def poster(path: str, payload: dict) -> int:
        if flaky["down"]:
            raise requests.ConnectionError("service down")
        return http.post(path, json=payload).status_code

    client = CaptureClient(poster=poster)
    namespace = {"df": student_df()}
    assert client.on_cell_executed(namespace, "load", 1) == 0
    assert client.pending_events == 1

    flaky["down"] = False
    namespace["other"] = 1  # no tabular change this cell
    assert client.on_cell_executed(namespace, "noop", 2) == 1
    assert client.pending_events == 0
    assert _service.store.latest_index("df") == 0


def test_serialize_frame_handles_nan_bool_and_floats():
    df = pd.DataFrame(
        {"a": [1.0, np.nan, 2.5], "b": [True, False, True], "c": ["x", "", None]},
        index=[10, 11, 12],
    )
    text = serialize_frame(df)
    frame = read_snapshot(text)
    assert frame.row_ids == [10, 11, 12]
    assert frame.descriptor("a").dtype == "numeric"
    assert frame.descriptor("b").dtype == "boolean"
    from snapcards.values import MISSING, is_missing

    assert is_missing(frame.cell(11, "a"))
    assert frame.cell(11, "c") == ""
    assert is_missing(frame.cell(12, "c"))
    assert frame.cell(10, "b") is True
