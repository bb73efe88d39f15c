"""Rule-based code and diff analyzers with an optional LLM backend."""

from .classify import OperationKind, classify_operation
from .models import ModelMetadata, MetricEntry, extract_model_metadata
from .relationships import infer_column_relationships
from .summaries import summarize
from .vocab import Vocabulary, load_vocabulary

__all__ = [
    "OperationKind",
    "classify_operation",
    "ModelMetadata",
    "MetricEntry",
    "extract_model_metadata",
    "infer_column_relationships",
    "summarize",
    "Vocabulary",
    "load_vocabulary",
]
