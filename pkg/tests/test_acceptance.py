"""Acceptance suite: one test per release criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL lines.
Every tolerance and time budget is pinned here; nothing is calibrated later.
"""

from __future__ import annotations

import json
import os
import random
import time
from itertools import combinations

import pytest

from snapcards.diffs import apply_changes, diff
from snapcards.frame import ColumnDescriptor
from snapcards.gateway import (
    CountingTransport,
    GatewayConfig,
    LlmGateway,
    RecordedTransport,
    load_templates,
)
from snapcards.insight import extract_model_metadata, infer_column_relationships
from snapcards.query import apply_filters, parse_query
from snapcards.service import SyncService
from snapcards.snapgrid import GRID_LIMIT, select_subset
from snapcards.store import CellExecution, LogicalClock, VersionStore

from conftest import GOLDEN_DIR, RECORDINGS_PATH, SESSION_PATH, expected_metadata, snippet
from helpers import (
    cell_changed,
    naive_filter_matches,
    random_edited_pair,
    random_filter_conditions,
    random_frame,
)


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name} failed{suffix}"


def recorded_gateway() -> LlmGateway:
    return LlmGateway(
        GatewayConfig(mode="live"), transport=RecordedTransport.from_file(RECORDINGS_PATH)
    )


def test_diff_round_trip_500_random_pairs():
    rng = random.Random(20240601)
    started = time.perf_counter()
    ok = True
    for _ in range(500):
        prev, nxt = random_edited_pair(rng, max_rows=50, max_cols=20)
        if not apply_changes(prev, diff(prev, nxt)).equals(nxt):
            ok = False
            break
    elapsed = time.perf_counter() - started
    report("diff-round-trip", ok and elapsed < 5.0, f"500 pairs in {elapsed:.2f}s, budget 5s")


def test_snapgrid_greedy_matches_exhaustive_on_200_instances():
    rng = random.Random(20240602)
    started = time.perf_counter()
    ok = True
    for _ in range(200):
        prev, nxt = random_edited_pair(rng, max_rows=12, max_cols=10)
        changes = diff(prev, nxt)
        spec = select_subset(changes, prev, nxt)
        candidates = sorted(set(prev.row_ids) | set(nxt.row_ids))
        row_counts = {
            rid: sum(1 for col in spec.selected_columns if cell_changed(prev, nxt, rid, col))
            for rid in candidates
        }
        k = min(GRID_LIMIT, len(candidates))
        best = max(sum(row_counts[r] for r in combo) for combo in combinations(candidates, k))
        greedy = sum(row_counts[r] for r in spec.selected_row_ids)
        if greedy != best:
            ok = False
            break
    elapsed = time.perf_counter() - started
    report(
        "snapgrid-optimality",
        ok and elapsed < 30.0,
        f"200 instances in {elapsed:.2f}s, budget 30s",
    )


PAPER_QUERY_CASES = [
    (
        "WritingScore is below 75 and SportsPracticeFrequency is less than 2",
        [
            ColumnDescriptor("Gender", "categorical"),
            ColumnDescriptor("EthnicGroup", "categorical"),
            ColumnDescriptor("ParentEducation", "categorical"),
            ColumnDescriptor("LunchType", "categorical"),
            ColumnDescriptor("TestPrepCourse", "categorical"),
            ColumnDescriptor("PracticeSport", "categorical"),
            ColumnDescriptor("SportsPracticeFrequency", "numeric"),
            ColumnDescriptor("Siblings", "numeric"),
            ColumnDescriptor("WeeklyStudyHours", "numeric"),
            ColumnDescriptor("ReadingScore", "numeric"),
            ColumnDescriptor("MathScore", "numeric"),
            ColumnDescriptor("WritingScore", "numeric"),
        ],
        [("WritingScore", "<", 75.0), ("SportsPracticeFrequency", "<", 2.0)],
    ),
    (
        "Show me rows/patients having glucose value > 90 and between the age of 25 to 35",
        [
            ColumnDescriptor("Glucose", "numeric"),
            ColumnDescriptor("Age", "numeric"),
            ColumnDescriptor("Gender", "categorical"),
            ColumnDescriptor("Outcome", "numeric"),
        ],
        [("Glucose", ">", 90.0), ("Age", ">=", 25.0), ("Age", "<=", 35.0)],
    ),
    (
        "Show me Female subjects whose melatonin is greater than 3.5",
        [
            ColumnDescriptor("Melatonin", "numeric"),
            ColumnDescriptor("Sickness level", "numeric"),
            ColumnDescriptor("Gender", "categorical"),
            ColumnDescriptor("Race", "categorical"),
            ColumnDescriptor("Predicted age", "numeric"),
        ],
        [("Gender", "==", "Female"), ("Melatonin", ">", 3.5)],
    ),
    (
        "Show me students whose parents' education level is High School and whose Dropped out is 1",
        [
            ColumnDescriptor("Students Name", "text"),
            ColumnDescriptor("Education level", "categorical"),
            ColumnDescriptor("Parents education level", "categorical"),
            ColumnDescriptor("Dropped out", "numeric"),
        ],
        [("Parents education level", "==", "High School"), ("Dropped out", "==", 1.0)],
    ),
]


def test_query_compiler_paper_examples_and_filter_oracle():
    gateway = recorded_gateway()
    ok = True
    for text, columns, expected in PAPER_QUERY_CASES:
        grammar = [(c.column, c.operator, c.value) for c in parse_query(text, columns)]
        llm = [
            (c.column, c.operator, c.value)
            for c in parse_query(text, columns, backend="llm", gateway=gateway)
        ]
        if grammar != expected or llm != expected:
            ok = False
            break
        if any(op == "=" for _c, op, _v in grammar + llm):
            ok = False
            break

    oracle_ok = True
    rng = random.Random(20240603)
    for _ in range(1000):
        frame = random_frame(rng, max_rows=30, max_cols=6)
        conditions = random_filter_conditions(rng, frame)
        if apply_filters(frame, conditions).matching_row_ids != naive_filter_matches(frame, conditions):
            oracle_ok = False
            break
    report(
        "query-compiler-regression",
        ok and oracle_ok,
        "4 paper queries on both backends + 1000 filter oracle cases",
    )


def test_model_metadata_paper_examples_both_backends():
    gateway = recorded_gateway()
    corpus = expected_metadata()
    expected = {name: corpus[name] for name in ("linreg", "logreg", "keras")}
    sklearn_snippets = {"linreg", "logreg"}
    ok = True
    for name, want in expected.items():
        via_llm = extract_model_metadata(snippet(name), backend="llm", gateway=gateway)
        via_det = extract_model_metadata(snippet(name), backend="deterministic")
        if via_llm is None or via_llm.to_jsonable() != want:
            ok = False
            break
        if via_det is None:
            ok = False
            break
        det = via_det.to_jsonable()
        shape_ok = (
            set(det) == set(want)
            and isinstance(det["train_variables"], list)
            and isinstance(det["test_variables"], list)
            and all(m["name"] and m["variable"] for m in det["metrics"])
        )
        if not shape_ok:
            ok = False
            break
        if name in sklearn_snippets and det["model_name"] != want["model_name"]:
            ok = False
            break
    absent_llm = extract_model_metadata(snippet("imputer"), backend="llm", gateway=gateway)
    absent_det = extract_model_metadata(snippet("imputer"), backend="deterministic")
    report(
        "model-metadata-regression",
        ok and absent_llm is None and absent_det is None,
        "3 worked snippets + imputer counterexample, recorded-LLM and deterministic",
    )


def test_column_relationships_one_hot_example():
    rel = infer_column_relationships(
        'df = pd.get_dummies(df, columns=["Gender"])',
        ["Gender", "Age"],
        ["Gender_Female", "Gender_Male"],
        backend="deterministic",
    )
    report(
        "column-relationships",
        rel == {"Gender_Female": ["Gender"], "Gender_Male": ["Gender"]},
        "one-hot prefix heuristic",
    )


GOLDEN_BINDINGS = {
    "code_summary": {
        "dataframe_var": "df",
        "code": 'import pandas as pd\ndf = pd.read_csv("student_exam_scores.csv")\ndf.head()',
    },
    "column_relationships": {
        "code": 'df = pd.get_dummies(df, columns=["Gender"])',
        "existing_columns": '["Gender", "Age"]',
        "added_columns": '["Gender_Female", "Gender_Male"]',
    },
    "query_to_filters": {
        "columns": (
            "[Gender, EthnicGroup, ParentEducation, LunchType, TestPrepCourse, PracticeSport, "
            "SportsPracticeFrequency, Siblings, WeeklyStudyHours, ReadingScore, MathScore, WritingScore]"
        ),
        "natural_language_query": "WritingScore is below 75 and SportsPracticeFrequency is less than 2",
    },
}


def test_prompt_fidelity_golden_files():
    templates = load_templates()
    bindings = dict(GOLDEN_BINDINGS)
    bindings["model_metrics"] = {"input_code": snippet("imputer")}
    ok = True
    for template_id, binding in bindings.items():
        rendered = templates[template_id].render(binding)
        with open(os.path.join(GOLDEN_DIR, f"{template_id}.txt"), encoding="utf-8", newline="") as fh:
            if rendered != fh.read():
                ok = False
                break
    report("prompt-fidelity", ok, "4 templates byte-match golden files")


EXPECTED_REPLAY = [
    ("df", 0, "dataset_loading"),
    ("df", 1, "missing_value_imputation"),
    ("df", 2, "replace_missing_with_label"),
    ("df", 3, "outlier_removal"),
    ("df", 4, "one_hot_encoding"),
    ("df", 5, "categorical_to_numeric"),
    ("df", 6, "feature_filtering"),
    ("X_train", 0, "dataset_splitting"),
]


def run_replay(root: str) -> tuple[list[dict], int]:
    """Replay the education session into a fresh embedded service."""
    transport = CountingTransport()
    gateway = LlmGateway(GatewayConfig(mode="disabled"), transport=transport)
    store = VersionStore(root, clock=LogicalClock())
    service = SyncService(store, gateway=gateway, poll_seconds=15)
    base = os.path.dirname(SESSION_PATH)
    cards = []
    with open(SESSION_PATH, encoding="utf-8") as fh:
        steps = [json.loads(line) for line in fh if line.strip()]
    for number, step in enumerate(steps, start=1):
        with open(os.path.join(base, step["snapshot"]), encoding="utf-8", newline="") as snap:
            snapshot_csv = snap.read()
        result = service.post_event(
            step["variable"],
            snapshot_csv=snapshot_csv,
            provenance=CellExecution(f"step-{number}", step["code"], number),
            scalars=step.get("scalars") or {},
        )
        cards.append(result.card)
    return cards, transport.calls


def test_end_to_end_replay_education_session(tmp_path):
    started = time.perf_counter()
    cards_one, calls_one = run_replay(str(tmp_path / "run1"))
    cards_two, calls_two = run_replay(str(tmp_path / "run2"))
    elapsed = time.perf_counter() - started

    got = [(c["variable"], c["version"], c["operation_kind"]) for c in cards_one]
    kinds_ok = got == EXPECTED_REPLAY

    by_step = {(c["variable"], c["version"]): c for c in cards_one}
    onehot = by_step[("df", 4)]["changes"]
    filtering = by_step[("df", 6)]["changes"]
    outliers = by_step[("df", 3)]["changes"]
    sets_ok = (
        sorted(onehot["added_columns"]) == ["Gender_Female", "Gender_Male"]
        and onehot["removed_columns"] == ["Gender"]
        and filtering["removed_columns"] == ["PracticeSport"]
        and filtering["added_columns"] == []
        and outliers["removed_rows"] == [413, 470]
        and outliers["added_columns"] == [] == outliers["removed_columns"]
    )
    overflow_ok = by_step[("df", 2)]["snapgrid"]["overflow"].get("EthnicGroup") == 37

    identical = json.dumps(cards_one, sort_keys=True) == json.dumps(cards_two, sort_keys=True)
    no_network = calls_one == 0 and calls_two == 0
    within_budget = elapsed < 10.0

    report(
        "end-to-end-replay",
        kinds_ok and sets_ok and overflow_ok and identical and no_network and within_budget,
        f"8 cards, two runs in {elapsed:.2f}s, budget 10s (two replays), zero network calls",
    )


def test_sync_semantics_100_interleaved(tmp_path):
    store = VersionStore(str(tmp_path / "sync"), clock=LogicalClock())
    service = SyncService(store, poll_seconds=15)
    rng = random.Random(20240604)
    subscribers = ("domain_expert", "data_scientist")
    cursors = {s: 0 for s in subscribers}
    seen_cards = {s: [] for s in subscribers}
    seen_comments = {s: [] for s in subscribers}
    delivered = {s: set() for s in subscribers}
    all_comments: dict[str, dict] = {}
    unread_ok = True

    def do_poll(subscriber: str):
        nonlocal unread_ok
        delta = service.poll(subscriber, cursors[subscriber])
        for variable in service.list_variables():
            expected = any(
                c["author_role"] != subscriber and c["id"] not in delivered[subscriber]
                for c in all_comments.values()
                if c["variable"] == variable
            )
            if delta.unread.get(variable) != expected:
                unread_ok = False
        seen_cards[subscriber].extend(delta.cards)
        seen_comments[subscriber].extend(delta.comments)
        delivered[subscriber].update(c["id"] for c in delta.comments)
        cursors[subscriber] = delta.next_cursor

    frame_counter = 0
    for i in range(100):
        action = rng.random()
        variable = rng.choice(["df", "X_train"])
        if action < 0.6 or store.latest_index(variable) is None:
            frame_counter += 1
            frame = random_frame(rng, max_rows=8, max_cols=4, min_rows=2, min_cols=2)
            service.post_event(
                variable,
                frame=frame,
                provenance=CellExecution(f"cell-{i}", f"df['x'] = {frame_counter}", i),
            )
        else:
            author = rng.choice(subscribers)
            version = rng.randint(0, store.latest_index(variable))
            comment = service.add_comment(variable, version, author, f"note {i}")
            all_comments[comment.id] = comment.to_jsonable()
        if rng.random() < 0.3:
            do_poll(rng.choice(subscribers))

    for subscriber in subscribers:
        do_poll(subscriber)
        do_poll(subscriber)

    ok = unread_ok
    detail = "unread flags, "
    for subscriber in subscribers:
        card_keys = [(c["variable"], c["version"]) for c in seen_cards[subscriber]]
        comment_keys = [c["id"] for c in seen_comments[subscriber]]
        if len(card_keys) != len(set(card_keys)) or len(comment_keys) != len(set(comment_keys)):
            ok = False  # duplicates: exactly-once violated
        snapshot_cards = []
        for variable in service.list_variables():
            snapshot_cards.extend(
                (c.variable, c.version) for c in service.get_history(variable)
            )
        if sorted(card_keys) != sorted(snapshot_cards):
            ok = False
        if sorted(comment_keys) != sorted(all_comments):
            ok = False
    detail += f"{len(all_comments)} comments, {frame_counter} events, exactly-once vs snapshot"
    report("sync-semantics", ok, detail)


def test_no_llm_guarantee_disabled_gateway_zero_network(tmp_path):
    transport = CountingTransport()
    gateway = LlmGateway(GatewayConfig(mode="disabled"), transport=transport)
    store = VersionStore(str(tmp_path / "nollm"), clock=LogicalClock())
    service = SyncService(store, gateway=gateway, backend="llm", poll_seconds=15)

    # Exercise every LLM-adjacent surface with the gateway disabled.
    base = os.path.dirname(SESSION_PATH)
    with open(SESSION_PATH, encoding="utf-8") as fh:
        steps = [json.loads(line) for line in fh if line.strip()]
    for number, step in enumerate(steps, start=1):
        with open(os.path.join(base, step["snapshot"]), encoding="utf-8", newline="") as snap:
            service.post_event(
                step["variable"],
                snapshot_csv=snap.read(),
                provenance=CellExecution(f"step-{number}", step["code"], number),
                scalars=step.get("scalars") or {},
            )
    service.run_query("df", 2, "WritingScore is below 75")
    history = service.get_history("df")
    ok = len(history) == 7 and all(c.summary for c in history)
    report(
        "no-llm-guarantee",
        ok and transport.calls == 0,
        f"pipeline + query with mode=disabled, network calls={transport.calls}",
    )
