"""Gateway to an external completion service.

Owns the prompt templates, renders them with named-placeholder bindings,
validates structured replies (with one repair pass and one retry), and
exposes a deterministic off switch: in disabled mode no network activity
ever happens and callers fall back to the rule-based analyzers.
"""

from __future__ import annotations

import ast
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources

import httpx


class GatewayError(Exception):
    pass


class GatewayDisabledError(GatewayError):
    """Raised immediately in disabled mode; callers degrade deterministically."""


class BindingError(GatewayError):
    """A template placeholder was left unbound (raised before any network call)."""


class TransportError(GatewayError):
    """Timeout or transport failure talking to the completion service."""


class MalformedReplyError(GatewayError):
    """Reply still failed schema validation after repair and retry."""

    def __init__(self, message: str, raw_text: str):
        super().__init__(message)
        self.raw_text = raw_text


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    text: str
    placeholders: tuple[str, ...]
    reply_shape: str  # "free_text" or a structured schema id

    def render(self, bindings: dict[str, str]) -> str:
        missing = [p for p in self.placeholders if p not in bindings]
        if missing:
            raise BindingError(f"template {self.id!r} missing bindings: {missing}")
        text = self.text
        for name in self.placeholders:
            text = text.replace(f"<{name}>", str(bindings[name]))
        return text


def _load_template_text(name: str) -> str:
    return resources.files("snapcards").joinpath(f"prompts/{name}.txt").read_text("utf-8")


_TEMPLATE_SPECS = {
    "code_summary": (("dataframe_var", "code"), "free_text"),
    "column_relationships": (("code", "existing_columns", "added_columns"), "relationships"),
    "model_metrics": (("input_code",), "model_metrics"),
    "query_to_filters": (("columns", "natural_language_query"), "filter_conditions"),
}


def load_templates() -> dict[str, PromptTemplate]:
    return {
        tid: PromptTemplate(tid, _load_template_text(tid), placeholders, shape)
        for tid, (placeholders, shape) in _TEMPLATE_SPECS.items()
    }


@dataclass
class GatewayConfig:
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "SNAPCARDS_LLM_API_KEY"
    timeout_seconds: float = 20.0
    max_retries: int = 1
    mode: str = "disabled"  # "live" or "disabled"

    @classmethod
    def from_file(cls, path: str | None = None) -> "GatewayConfig":
        """Load from a JSON config file, then apply environment overrides."""
        config = cls()
        if path and os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
            for key in ("endpoint", "model", "api_key_env", "mode"):
                if key in data:
                    setattr(config, key, data[key])
            if "timeout_seconds" in data:
                config.timeout_seconds = float(data["timeout_seconds"])
            if "max_retries" in data:
                config.max_retries = int(data["max_retries"])
        env = os.environ
        config.endpoint = env.get("SNAPCARDS_LLM_ENDPOINT", config.endpoint)
        config.model = env.get("SNAPCARDS_LLM_MODEL", config.model)
        config.mode = env.get("SNAPCARDS_LLM_MODE", config.mode)
        if "SNAPCARDS_LLM_TIMEOUT" in env:
            config.timeout_seconds = float(env["SNAPCARDS_LLM_TIMEOUT"])
        return config


class HttpTransport:
    """POSTs a completion request; expects {"text": ...} or OpenAI-style choices."""

    def send(self, prompt: str, config: GatewayConfig) -> str:
        if not config.endpoint:
            raise TransportError("no completion endpoint configured")
        headers = {}
        api_key = os.environ.get(config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {"prompt": prompt}
        if config.model:
            payload["model"] = config.model
        try:
            response = httpx.post(
                config.endpoint, json=payload, headers=headers, timeout=config.timeout_seconds
            )
            response.raise_for_status()
            data = response.json()
        except httpx.TimeoutException as exc:
            raise TransportError(f"completion timed out after {config.timeout_seconds}s") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"completion transport failure: {exc}") from exc
        if isinstance(data, dict):
            if isinstance(data.get("text"), str):
                return data["text"]
            choices = data.get("choices")
            if isinstance(choices, list) and choices and isinstance(choices[0], dict):
                text = choices[0].get("text")
                if isinstance(text, str):
                    return text
        raise TransportError("completion reply had no text field")


class RecordedTransport:
    """Test double returning canned replies keyed by rendered-prompt digest."""

    def __init__(self, replies: dict[str, str]):
        self.replies = dict(replies)

    @classmethod
    def from_file(cls, path: str) -> "RecordedTransport":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    @staticmethod
    def key_for(prompt: str) -> str:
        import hashlib

        return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]

    def send(self, prompt: str, config: GatewayConfig) -> str:
        key = self.key_for(prompt)
        if key not in self.replies:
            raise TransportError(f"no recorded reply for prompt digest {key}")
        return self.replies[key]


class CountingTransport:
    """Wraps a transport and counts send() calls (zero-network assertions)."""

    def __init__(self, inner=None):
        self.inner = inner
        self.calls = 0

    def send(self, prompt: str, config: GatewayConfig) -> str:
        self.calls += 1
        if self.inner is None:
            raise TransportError("counting transport has no inner transport")
        return self.inner.send(prompt, config)


# -- structured reply validation --------------------------------------------


def parse_structured_text(text: str):
    """Parse a JSON body, accepting Python-literal style as a fallback."""
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        pass
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ValueError(f"not a structured body: {exc}") from exc


def repair_reply(text: str) -> str:
    """Single repair pass: strip prose/fences around the body, fix quotes."""
    cleaned = re.sub(r"```[a-zA-Z]*", "", text).replace("```", "")
    for fancy, plain in (("“", '"'), ("”", '"'), ("‘", "'"), ("’", "'")):
        cleaned = cleaned.replace(fancy, plain)
    starts = [i for i in (cleaned.find("{"), cleaned.find("[")) if i != -1]
    ends = [i for i in (cleaned.rfind("}"), cleaned.rfind("]")) if i != -1]
    if starts and ends and max(ends) > min(starts):
        cleaned = cleaned[min(starts) : max(ends) + 1]
    return cleaned.strip()


def validate_relationships(data) -> dict[str, list[str]]:
    """Normalize the column-relationship reply to {derived: [sources]}."""
    items: list[dict]
    if isinstance(data, dict):
        items = [data]
    elif isinstance(data, list) and all(isinstance(d, dict) for d in data):
        items = data
    else:
        raise ValueError("relationships reply must be a dict or list of dicts")
    merged: dict[str, list[str]] = {}
    for item in items:
        for key, value in item.items():
            if not isinstance(key, str):
                raise ValueError("relationship keys must be column names")
            if isinstance(value, str):
                value = [value]
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ValueError(f"sources for {key!r} must be a list of column names")
            merged[key] = list(value)
    return merged


def _ci_get(data: dict, name: str):
    for key, value in data.items():
        if isinstance(key, str) and key.strip().lower() == name:
            return value
    return None


def validate_model_metrics(data) -> dict | None:
    """Normalize the model-metadata reply; an empty object means absent."""
    if not isinstance(data, dict):
        raise ValueError("model metrics reply must be an object")
    if not data:
        return None
    model_name = _ci_get(data, "model name")
    if not isinstance(model_name, str) or not model_name:
        raise ValueError("missing Model Name")
    train = _ci_get(data, "train variables") or []
    test = _ci_get(data, "test variables") or []
    if not isinstance(train, list) or not isinstance(test, list):
        raise ValueError("train/test variables must be lists")
    metrics_raw = _ci_get(data, "metrics") or []
    if not isinstance(metrics_raw, list):
        raise ValueError("metrics must be a list")
    metrics = []
    for entry in metrics_raw:
        if not isinstance(entry, dict):
            raise ValueError("metric entries must be objects")
        name = _ci_get(entry, "metric")
        variable = _ci_get(entry, "metric variable")
        if not isinstance(name, str) or not name:
            raise ValueError("metric entries need a non-empty Metric name")
        metrics.append({"name": name, "variable": variable if isinstance(variable, str) else ""})
    return {
        "model_name": model_name,
        "train_variables": [str(v) for v in train],
        "test_variables": [str(v) for v in test],
        "metrics": metrics,
    }


_CANONICAL_OPERATORS = {"==", "!=", "<", "<=", ">", ">="}


def validate_filter_conditions(data) -> list[dict]:
    """Normalize the filter-condition reply; '=' becomes '=='."""
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ValueError("filter reply must be a list of conditions")
    conditions = []
    for entry in data:
        if not isinstance(entry, dict):
            raise ValueError("each condition must be an object")
        column = entry.get("column")
        operator = entry.get("operator")
        value = entry.get("value")
        if not isinstance(column, str) or not column:
            raise ValueError("condition missing column")
        if operator == "=":
            operator = "=="
        if operator not in _CANONICAL_OPERATORS:
            raise ValueError(f"unsupported operator {operator!r}")
        if not isinstance(value, (str, int, float, bool)):
            raise ValueError("condition value must be a scalar")
        conditions.append({"column": column, "operator": operator, "value": value})
    if not conditions:
        raise ValueError("empty condition list")
    return conditions


SCHEMA_VALIDATORS = {
    "relationships": validate_relationships,
    "model_metrics": validate_model_metrics,
    "filter_conditions": validate_filter_conditions,
}


class LlmGateway:
    """Renders templates and talks to the completion service."""

    def __init__(self, config: GatewayConfig | None = None, transport=None, log_path: str | None = None):
        self.config = config or GatewayConfig()
        self.transport = transport or HttpTransport()
        self.log_path = log_path
        self.templates = load_templates()
        self._log_lock = threading.Lock()

    @property
    def enabled(self) -> bool:
        return self.config.mode == "live"

    def render(self, template_id: str, bindings: dict[str, str]) -> str:
        if template_id not in self.templates:
            raise GatewayError(f"unknown template {template_id!r}")
        return self.templates[template_id].render(bindings)

    def complete(self, template_id: str, bindings: dict[str, str]) -> str:
        prompt = self.render(template_id, bindings)
        if self.config.mode != "live":
            self._log(template_id, 0.0, "disabled")
            raise GatewayDisabledError("gateway is disabled")
        started = time.monotonic()
        last_error: TransportError | None = None
        for _attempt in range(max(1, self.config.max_retries + 1)):
            try:
                reply = self.transport.send(prompt, self.config)
                self._log(template_id, time.monotonic() - started, "ok")
                return reply
            except TransportError as exc:
                last_error = exc
        self._log(template_id, time.monotonic() - started, "transport_error")
        raise last_error if last_error else TransportError("completion failed")

    def complete_structured(self, template_id: str, bindings: dict[str, str], schema: str | None = None):
        template = self.templates.get(template_id)
        if template is None:
            raise GatewayError(f"unknown template {template_id!r}")
        schema = schema or template.reply_shape
        validator = SCHEMA_VALIDATORS.get(schema)
        if validator is None:
            raise GatewayError(f"template {template_id!r} has no structured schema")

        raw = self.complete(template_id, bindings)
        result = self._parse_with_repair(raw, validator)
        if result is not _INVALID:
            return result
        # One retry on malformed output.
        retry_raw = self.complete(template_id, bindings)
        result = self._parse_with_repair(retry_raw, validator)
        if result is not _INVALID:
            return result
        self._log(template_id, 0.0, "malformed_reply")
        raise MalformedReplyError(f"reply failed {schema} validation after retry", retry_raw)

    @staticmethod
    def _parse_with_repair(raw: str, validator):
        for candidate in (raw, repair_reply(raw)):
            try:
                return validator(parse_structured_text(candidate))
            except ValueError:
                continue
        return _INVALID

    def _log(self, template_id: str, latency_seconds: float, outcome: str):
        if not self.log_path:
            return
        record = {
            "ts": time.time(),
            "template": template_id,
            "latency_ms": round(latency_seconds * 1000, 3),
            "outcome": outcome,
        }
        with self._log_lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")


_INVALID = object()


def disabled_gateway() -> LlmGateway:
    """Gateway that never touches the network; the deterministic default."""
    return LlmGateway(GatewayConfig(mode="disabled"), transport=CountingTransport())
