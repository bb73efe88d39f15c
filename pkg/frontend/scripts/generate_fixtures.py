#!/usr/bin/env python3
"""Regenerate the dashboard test fixtures from the engine's replay session.

Produces, under frontend/fixtures/:
  delta_log.json       two successive poll deltas covering the 8-step session
                       plus a comment exchange
  query_response.json  POST /query/df/5 response for the WritingScore query
  query_error.json     POST /query response for a misspelled column
  stats_writing.json   numeric column stats (histogram + moments)
  stats_parent.json    categorical column stats
  frame_page.json      first page of df v0 for the Initial Dataset table

Usage: python frontend/scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, os.path.join(ROOT, "src"))

from fastapi.testclient import TestClient  # noqa: E402

from snapcards.httpapi import create_app  # noqa: E402
from snapcards.service import SyncService  # noqa: E402
from snapcards.store import LogicalClock, VersionStore  # noqa: E402

SESSION = os.path.join(ROOT, "tests", "fixtures", "education", "session.jsonl")
OUT_DIR = os.path.join(ROOT, "frontend", "fixtures")

QUERY_TEXT = "WritingScore is below 75 and SportsPracticeFrequency is less than 2"


def main() -> None:
    import tempfile

    os.makedirs(OUT_DIR, exist_ok=True)
    store = VersionStore(tempfile.mkdtemp(prefix="snapcards-frontend-fixtures-"), clock=LogicalClock())
    service = SyncService(store, poll_seconds=15)
    http = TestClient(create_app(service))

    with open(SESSION, encoding="utf-8") as fh:
        steps = [json.loads(line) for line in fh if line.strip()]

    deltas = []

    def post_steps(subset):
        base = os.path.dirname(SESSION)
        for number, step in subset:
            with open(os.path.join(base, step["snapshot"]), encoding="utf-8", newline="") as snap:
                payload = {
                    "variable": step["variable"],
                    "snapshot_csv": snap.read(),
                    "cell": {
                        "cell_id": f"step-{number}",
                        "code": step["code"],
                        "execution_count": number,
                    },
                    "scalars": step.get("scalars") or {},
                }
            response = http.post("/events", json=payload)
            response.raise_for_status()

    numbered = list(enumerate(steps, start=1))

    # First poll covers the early history; the second the rest plus comments.
    post_steps(numbered[:3])
    first = http.get("/poll", params={"cursor": 0, "subscriber": "domain_expert"}).json()
    deltas.append(first)

    post_steps(numbered[3:])
    http.post(
        "/comments",
        json={
            "variable": "df",
            "version": 1,
            "author_role": "data_scientist",
            "text": "Filled the missing parent-education entries with the most frequent value.",
        },
    )
    http.post(
        "/comments",
        json={
            "variable": "df",
            "version": 1,
            "author_role": "domain_expert",
            "text": "Could we mark them as 'unknown' instead? Imputing may hide real gaps.",
        },
    )
    second = http.get(
        "/poll", params={"cursor": first["next_cursor"], "subscriber": "domain_expert"}
    ).json()
    deltas.append(second)

    with open(os.path.join(OUT_DIR, "delta_log.json"), "w", encoding="utf-8") as fh:
        json.dump(deltas, fh, indent=1)

    query = http.post("/query/df/5", json={"text": QUERY_TEXT})
    query.raise_for_status()
    with open(os.path.join(OUT_DIR, "query_response.json"), "w", encoding="utf-8") as fh:
        json.dump(query.json(), fh, indent=1)

    error = http.post("/query/df/5", json={"text": "WritingScrore is below 75"})
    assert error.status_code == 400
    with open(os.path.join(OUT_DIR, "query_error.json"), "w", encoding="utf-8") as fh:
        json.dump({"status": 400, "detail": error.json()["detail"]}, fh, indent=1)

    for name, column, version in (
        ("stats_writing.json", "WritingScore", 0),
        ("stats_parent.json", "ParentEducation", 1),
    ):
        stats = http.get(f"/stats/df/{version}/{column}")
        stats.raise_for_status()
        with open(os.path.join(OUT_DIR, name), "w", encoding="utf-8") as fh:
            json.dump(stats.json(), fh, indent=1)

    page = http.get("/frame/df/0", params={"offset": 0, "limit": 10})
    page.raise_for_status()
    with open(os.path.join(OUT_DIR, "frame_page.json"), "w", encoding="utf-8") as fh:
        json.dump(page.json(), fh, indent=1)

    print(f"wrote fixtures to {OUT_DIR}")


if __name__ == "__main__":
    main()
