"""HTTP surface of the sync service (JSON bodies, UTF-8).

Endpoints: POST /events, GET /variables, GET /history/{variable},
GET /stats/{variable}/{version}/{column}, POST /query/{variable}/{version},
POST /comments, GET /poll?cursor=&subscriber=.
"""

from __future__ import annotations

from fastapi import Body, FastAPI, HTTPException, Query

from .frame import FrameError
from .query import QueryError
from .service import SyncService
from .store import (
    CellExecution,
    StoreError,
    UnknownStatsColumnError,
    UnknownVariableError,
    UnknownVersionError,
)


def create_app(service: SyncService) -> FastAPI:
    app = FastAPI(title="snapcards sync service")
    app.state.service = service

    @app.post("/events")
    def post_event(payload: dict = Body(...)):
        variable = payload.get("variable")
        if not isinstance(variable, str) or not variable:
            raise HTTPException(status_code=400, detail="event needs a 'variable' name")
        snapshot = payload.get("snapshot_csv")
        if not isinstance(snapshot, str) or not snapshot:
            raise HTTPException(status_code=400, detail="event needs 'snapshot_csv' text")
        cell = payload.get("cell") or {}
        provenance = CellExecution(
            cell_id=str(cell.get("cell_id", "")),
            code=str(cell.get("code", "")),
            execution_count=int(cell.get("execution_count", 0)),
        )
        scalars = payload.get("scalars") or {}
        try:
            result = service.post_event(
                variable,
                snapshot_csv=snapshot,
                provenance=provenance,
                scalars={k: v for k, v in scalars.items() if isinstance(v, (int, float))},
            )
        except FrameError as exc:
            raise HTTPException(status_code=400, detail=f"snapshot rejected: {exc}")
        except StoreError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"variable": result.variable, "index": result.index, "duplicate": result.duplicate}

    @app.get("/variables")
    def list_variables():
        return {"variables": service.list_variables()}

    @app.get("/history/{variable}")
    def get_history(variable: str, subscriber: str | None = Query(default=None)):
        try:
            cards = service.get_history(variable, subscriber=subscriber)
        except UnknownVariableError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"variable": variable, "cards": [c.to_jsonable() for c in cards]}

    @app.get("/frame/{variable}/{version}")
    def get_frame(
        variable: str,
        version: int,
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
    ):
        try:
            frame = service.store.load_frame(variable, version)
        except (UnknownVariableError, UnknownVersionError) as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        window = slice(offset, offset + limit)
        data = frame.to_jsonable()
        return {
            "variable": variable,
            "version": version,
            "columns": data["columns"],
            "row_ids": data["row_ids"][window],
            "rows": data["rows"][window],
            "total_rows": len(data["row_ids"]),
            "offset": offset,
        }

    @app.get("/stats/{variable}/{version}/{column}")
    def get_stats(variable: str, version: int, column: str):
        try:
            stats = service.column_stats(variable, version, column)
        except UnknownStatsColumnError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except (UnknownVariableError, UnknownVersionError) as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return stats.to_jsonable()

    @app.post("/query/{variable}/{version}")
    def post_query(variable: str, version: int, payload: dict = Body(...)):
        text = payload.get("text", "")
        backend = payload.get("backend")
        try:
            conditions, result, grid = service.run_query(variable, version, text, backend=backend)
        except (UnknownVariableError, UnknownVersionError) as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except QueryError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {
            "conditions": [c.to_jsonable() for c in conditions],
            "matching_row_ids": result.matching_row_ids,
            "matching_cells": [[rid, col] for rid, col in result.matching_cells],
            "snapgrid": grid,
        }

    @app.post("/comments")
    def post_comment(payload: dict = Body(...)):
        try:
            comment = service.add_comment(
                variable=str(payload.get("variable", "")),
                version=int(payload.get("version", -1)),
                author_role=str(payload.get("author_role", "")),
                text=str(payload.get("text", "")),
            )
        except UnknownVariableError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"comment": comment.to_jsonable()}

    @app.get("/poll")
    def poll(cursor: int = Query(default=0), subscriber: str = Query(default="domain_expert")):
        return service.poll(subscriber, cursor).to_jsonable()

    return app
