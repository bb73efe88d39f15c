"""snapcards: data-operation provenance engine and sync service.

Turns a stream of (code cell, tabular snapshot) events into data version
cards: structured diffs, bounded SnapGrid views, operation summaries,
column statistics, model metadata, natural-language filter queries, and
threaded comments behind a polling sync protocol.
"""

from .diffs import ChangeSet, CellEdit, apply_changes, diff
from .frame import ColumnDescriptor, TabularFrame, read_snapshot, write_snapshot
from .gateway import GatewayConfig, LlmGateway, disabled_gateway
from .insight import (
    ModelMetadata,
    OperationKind,
    classify_operation,
    extract_model_metadata,
    infer_column_relationships,
    summarize,
)
from .query import FilterCondition, QueryResult, apply_filters, parse_query
from .service import SyncService
from .snapgrid import CellState, SnapGrid, SnapGridSpec, render_snapgrid, select_subset
from .stats import ColumnStats, compute_column_stats
from .store import CellExecution, DataVersionCard, DatasetVersion, VersionStore
from .values import MISSING, CellValue

__version__ = "0.1.0"

__all__ = [
    "MISSING",
    "CellValue",
    "CellEdit",
    "CellExecution",
    "CellState",
    "ChangeSet",
    "ColumnDescriptor",
    "ColumnStats",
    "DataVersionCard",
    "DatasetVersion",
    "FilterCondition",
    "GatewayConfig",
    "LlmGateway",
    "ModelMetadata",
    "OperationKind",
    "QueryResult",
    "SnapGrid",
    "SnapGridSpec",
    "SyncService",
    "TabularFrame",
    "VersionStore",
    "apply_changes",
    "apply_filters",
    "classify_operation",
    "compute_column_stats",
    "diff",
    "disabled_gateway",
    "extract_model_metadata",
    "infer_column_relationships",
    "parse_query",
    "read_snapshot",
    "render_snapgrid",
    "select_subset",
    "summarize",
    "write_snapshot",
]
