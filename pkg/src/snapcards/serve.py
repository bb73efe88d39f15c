"""Run the sync service over HTTP: `snapcards-serve --store ./store`."""

from __future__ import annotations

import argparse

import uvicorn

from .gateway import GatewayConfig, LlmGateway, disabled_gateway
from .httpapi import create_app
from .service import SyncService
from .store import VersionStore


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snapcards-serve", description="Serve the snapcards sync service."
    )
    parser.add_argument("--store", default="./store", help="store directory (created if missing)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--llm",
        action="store_true",
        help="enable the live LLM gateway (configured via environment/--gateway-config)",
    )
    parser.add_argument("--gateway-config", help="gateway JSON config file")
    parser.add_argument("--gateway-log", help="structured gateway log file (JSON lines)")
    return parser


def make_service(args) -> SyncService:
    store = VersionStore(args.store)
    if args.llm:
        gateway = LlmGateway(GatewayConfig.from_file(args.gateway_config), log_path=args.gateway_log)
        return SyncService(store, gateway=gateway, backend="llm")
    return SyncService(store, gateway=disabled_gateway())


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    uvicorn.run(create_app(make_service(args)), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
