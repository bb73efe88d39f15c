"""Extract model name, train/test variables, and metrics from cell code.

The deterministic backend pattern-matches estimator construction plus
fit/predict/evaluate calls and metric-function assignments; preprocessing
transformers (scalers, imputers) never count as models. Metric values come
from captured runtime variable contents when the client supplies them;
otherwise entries are name-only.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from ..gateway import (
    GatewayDisabledError,
    LlmGateway,
    MalformedReplyError,
    TransportError,
)
from .codescan import scan_code
from .vocab import Vocabulary, load_vocabulary

logger = logging.getLogger("snapcards.insight")


@dataclass
class MetricEntry:
    name: str
    variable: str
    value: float | None = None

    def to_jsonable(self) -> dict:
        return {"name": self.name, "variable": self.variable, "value": self.value}


@dataclass
class ModelMetadata:
    model_name: str
    train_variables: list[str] = field(default_factory=list)
    test_variables: list[str] = field(default_factory=list)
    metrics: list[MetricEntry] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "model_name": self.model_name,
            "train_variables": list(self.train_variables),
            "test_variables": list(self.test_variables),
            "metrics": [m.to_jsonable() for m in self.metrics],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "ModelMetadata":
        return cls(
            model_name=data["model_name"],
            train_variables=list(data.get("train_variables", [])),
            test_variables=list(data.get("test_variables", [])),
            metrics=[
                MetricEntry(m["name"], m.get("variable", ""), m.get("value"))
                for m in data.get("metrics", [])
            ],
        )


def metric_name_for_variable(variable: str, vocab: Vocabulary) -> str | None:
    """Map a variable name like mae_test or test_acc to a metric display name."""
    tokens = [t for t in re.split(r"[_\W]+|\d+", variable.lower()) if t]
    for token in tokens:
        if token in vocab.metric_vars:
            return vocab.metric_vars[token]
    return None


def _dedup(items: list[str]) -> list[str]:
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def _extract_deterministic(code: str, vocab: Vocabulary) -> ModelMetadata | None:
    scan = scan_code(code)
    if not scan.parsed:
        return None

    model_name: str | None = None
    estimator_vars: set[str] = set()
    preprocessor_vars: set[str] = set()
    for call in scan.calls:
        if call.name in vocab.estimators:
            if model_name is None:
                model_name = vocab.estimators[call.name]
            estimator_vars.update(call.assign_targets)
        elif call.name in vocab.preprocessors:
            preprocessor_vars.update(call.assign_targets)
    if model_name is None:
        return None

    def bound_to_estimator(call) -> bool:
        if call.receiver is not None:
            return call.receiver in estimator_vars and call.receiver not in preprocessor_vars
        return call.chained_constructor in vocab.estimators

    train: list[str] = []
    test: list[str] = []
    metric_entries: list[tuple[int, MetricEntry]] = []

    for call in scan.calls:
        if call.name == "fit" and bound_to_estimator(call):
            train.extend(call.positional_names)
            # reg = LinearRegression().fit(...) binds the model to the target.
            estimator_vars.update(call.assign_targets)

    for call in scan.calls:
        if call.name in ("predict", "predict_proba", "evaluate") and bound_to_estimator(call):
            test.extend(n for n in call.positional_names if n not in set(train))
            if call.name == "evaluate":
                for targets, fn in scan.tuple_call_targets:
                    if fn == "evaluate":
                        for target in targets:
                            display = metric_name_for_variable(target, vocab)
                            if display:
                                metric_entries.append(
                                    (call.order, MetricEntry(display, target))
                                )

    for call in scan.calls:
        if call.name in vocab.metric_fns and call.assign_targets:
            variable = call.assign_targets[0]
            display = metric_name_for_variable(variable, vocab) or vocab.metric_fns[call.name]
            metric_entries.append((call.order, MetricEntry(display, variable)))
            if call.positional_names:
                truth = call.positional_names[0]
                if truth not in set(train):
                    test.append(truth)

    metric_entries.sort(key=lambda pair: pair[0])
    metrics = []
    seen_vars = set()
    for _order, entry in metric_entries:
        if entry.variable not in seen_vars:
            seen_vars.add(entry.variable)
            metrics.append(entry)

    return ModelMetadata(
        model_name=model_name,
        train_variables=_dedup(train),
        test_variables=_dedup(test),
        metrics=metrics,
    )


def _attach_values(meta: ModelMetadata | None, scalars: dict[str, float] | None) -> ModelMetadata | None:
    if meta is None or not scalars:
        return meta
    for entry in meta.metrics:
        if entry.variable in scalars:
            value = scalars[entry.variable]
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                entry.value = float(value)
    return meta


def extract_model_metadata(
    code: str,
    backend: str = "deterministic",
    gateway: LlmGateway | None = None,
    scalars: dict[str, float] | None = None,
    vocab: Vocabulary | None = None,
) -> ModelMetadata | None:
    """Return model metadata, or None when no ML model is present."""
    vocab = vocab or load_vocabulary()
    if not code:
        return None
    if backend == "llm" and gateway is not None:
        try:
            record = gateway.complete_structured("model_metrics", {"input_code": code})
        except (GatewayDisabledError, TransportError):
            logger.warning("model metadata: gateway unavailable, using deterministic backend")
            return _attach_values(_extract_deterministic(code, vocab), scalars)
        except MalformedReplyError:
            logger.warning("model metadata: malformed completion after retry, treating as absent")
            return None
        if record is None:
            return None
        meta = ModelMetadata(
            model_name=record["model_name"],
            train_variables=record["train_variables"],
            test_variables=record["test_variables"],
            metrics=[MetricEntry(m["name"], m["variable"]) for m in record["metrics"]],
        )
        return _attach_values(meta, scalars)
    return _attach_values(_extract_deterministic(code, vocab), scalars)
