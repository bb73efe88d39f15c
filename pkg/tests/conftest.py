from __future__ import annotations

import os

import pytest

from snapcards.gateway import CountingTransport, GatewayConfig, LlmGateway, RecordedTransport
from snapcards.service import SyncService
from snapcards.store import LogicalClock, VersionStore

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(TESTS_DIR, "data")
GOLDEN_DIR = os.path.join(TESTS_DIR, "golden")
EDUCATION_DIR = os.path.join(TESTS_DIR, "fixtures", "education")
SESSION_PATH = os.path.join(EDUCATION_DIR, "session.jsonl")
RECORDINGS_PATH = os.path.join(DATA_DIR, "recorded_replies.json")


def snippet(name: str) -> str:
    with open(os.path.join(DATA_DIR, "snippets", f"{name}.py"), encoding="utf-8") as fh:
        return fh.read().rstrip("\n")


def expected_metadata() -> dict:
    import json

    with open(os.path.join(DATA_DIR, "snippets", "expected.json"), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def recorded_gateway() -> LlmGateway:
    transport = RecordedTransport.from_file(RECORDINGS_PATH)
    return LlmGateway(GatewayConfig(mode="live"), transport=transport)


@pytest.fixture
def disabled_gateway_counting() -> tuple[LlmGateway, CountingTransport]:
    transport = CountingTransport()
    return LlmGateway(GatewayConfig(mode="disabled"), transport=transport), transport


@pytest.fixture
def service(tmp_path) -> SyncService:
    store = VersionStore(str(tmp_path / "store"), clock=LogicalClock())
    return SyncService(store, poll_seconds=15)


def make_service(root: str) -> SyncService:
    store = VersionStore(root, clock=LogicalClock())
    return SyncService(store, poll_seconds=15)
