"""Replay a scripted session through the pipeline, no notebook required.

A session file is JSON Lines; each line is one step:
{"variable": "df", "code": "...", "snapshot": "relative/path.csv"}
with the snapshot path resolved against the session file's directory.
Steps post to an embedded service (--serve) or to a remote one (--url).
Exit codes: 0 ok, 2 input error, 3 service error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import httpx

from .gateway import GatewayConfig, LlmGateway, disabled_gateway
from .service import SyncService
from .snapgrid import SnapGrid
from .store import CellExecution, LogicalClock, VersionStore
from .svg import render_svg

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_SERVICE_ERROR = 3


def load_session(path: str) -> list[dict]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"session file not found: {path}")
    steps = []
    base = os.path.dirname(os.path.abspath(path))
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                step = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"session line {lineno}: bad JSON ({exc})")
            for key in ("variable", "code", "snapshot"):
                if key not in step:
                    raise ValueError(f"session line {lineno}: missing {key!r}")
            step["snapshot"] = os.path.join(base, step["snapshot"])
            step.setdefault("scalars", {})
            steps.append(step)
    return steps


def _emit_svg(directory: str, variable: str, index: int, card: dict) -> None:
    os.makedirs(directory, exist_ok=True)
    grid = SnapGrid.from_jsonable(card.get("snapgrid", {}))
    title = f"{variable} v{index}: {card.get('operation_kind', '')}"
    path = os.path.join(directory, f"{variable}_v{index}.svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(grid, title=title))


def _replay_embedded(steps: list[dict], args) -> int:
    store_dir = args.store or tempfile.mkdtemp(prefix="snapcards-replay-")
    clock = LogicalClock() if args.mode == "deterministic" else None
    store = VersionStore(store_dir, clock=clock)
    if args.mode == "llm":
        gateway = LlmGateway(GatewayConfig.from_file(args.gateway_config))
    else:
        gateway = disabled_gateway()
    service = SyncService(store, gateway=gateway, backend=args.mode if args.mode == "llm" else "deterministic")

    for number, step in enumerate(steps, start=1):
        try:
            with open(step["snapshot"], encoding="utf-8", newline="") as fh:
                snapshot_csv = fh.read()
        except OSError:
            print(f"step {number}: snapshot not found: {step['snapshot']}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        provenance = CellExecution(cell_id=f"step-{number}", code=step["code"], execution_count=number)
        try:
            result = service.post_event(
                step["variable"],
                snapshot_csv=snapshot_csv,
                provenance=provenance,
                scalars=step.get("scalars") or {},
            )
        except Exception as exc:
            print(f"step {number}: rejected: {exc}", file=sys.stderr)
            return EXIT_SERVICE_ERROR
        if result.duplicate:
            print(f"card {result.variable} v{result.index} (duplicate, no new card)")
            continue
        card = result.card or {}
        print(
            f"card {result.variable} v{result.index} "
            f"[{card.get('operation_kind', 'other')}] {card.get('summary', '')}"
        )
        if args.emit_svg:
            _emit_svg(args.emit_svg, result.variable, result.index, card)
    return EXIT_OK


def _replay_remote(steps: list[dict], args) -> int:
    base = args.url.rstrip("/")
    for number, step in enumerate(steps, start=1):
        try:
            with open(step["snapshot"], encoding="utf-8", newline="") as fh:
                snapshot_csv = fh.read()
        except OSError:
            print(f"step {number}: snapshot not found: {step['snapshot']}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        payload = {
            "variable": step["variable"],
            "snapshot_csv": snapshot_csv,
            "cell": {"cell_id": f"step-{number}", "code": step["code"], "execution_count": number},
            "scalars": step.get("scalars") or {},
        }
        try:
            response = httpx.post(f"{base}/events", json=payload, timeout=30)
        except httpx.HTTPError as exc:
            print(f"step {number}: service unreachable: {exc}", file=sys.stderr)
            return EXIT_SERVICE_ERROR
        if response.status_code >= 400:
            print(f"step {number}: rejected: {response.text}", file=sys.stderr)
            return EXIT_SERVICE_ERROR
        body = response.json()
        if body.get("duplicate"):
            print(f"card {body['variable']} v{body['index']} (duplicate, no new card)")
            continue
        history = httpx.get(f"{base}/history/{step['variable']}", timeout=30).json()
        card = history["cards"][body["index"]]
        print(
            f"card {body['variable']} v{body['index']} "
            f"[{card.get('operation_kind', 'other')}] {card.get('summary', '')}"
        )
        if args.emit_svg:
            _emit_svg(args.emit_svg, body["variable"], body["index"], card)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snapcards-replay",
        description="Replay a scripted session of (code, snapshot) steps through the card pipeline.",
    )
    parser.add_argument("session", help="session file (JSON Lines, one step per line)")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument(
        "--deterministic",
        dest="mode",
        action="store_const",
        const="deterministic",
        help="rule-based analyzers only; output is byte-identical across runs (default)",
    )
    mode.add_argument(
        "--llm",
        dest="mode",
        action="store_const",
        const="llm",
        help="use the live LLM gateway configured via environment/--gateway-config",
    )
    parser.add_argument("--emit-svg", metavar="DIR", help="write one SVG per card into DIR")
    parser.add_argument(
        "--serve",
        action="store_true",
        help="run an embedded service instead of posting to a remote one",
    )
    parser.add_argument("--url", default="http://127.0.0.1:8000", help="remote service base URL")
    parser.add_argument("--store", help="store directory for the embedded service")
    parser.add_argument("--gateway-config", help="gateway JSON config file (llm mode)")
    parser.set_defaults(mode="deterministic")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        steps = load_session(args.session)
    except (FileNotFoundError, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.serve:
        return _replay_embedded(steps, args)
    return _replay_remote(steps, args)


if __name__ == "__main__":
    sys.exit(main())
