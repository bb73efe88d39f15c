"""Analyzer vocabulary loaded from the plain-text data file.

New estimators, metrics, or loader names are added by editing
``data/vocabulary.tsv``; no code change is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources


@dataclass
class Vocabulary:
    estimators: dict[str, str] = field(default_factory=dict)
    preprocessors: set[str] = field(default_factory=set)
    metric_fns: dict[str, str] = field(default_factory=dict)
    metric_vars: dict[str, str] = field(default_factory=dict)
    read_fns: set[str] = field(default_factory=set)
    split_fns: set[str] = field(default_factory=set)


_KIND_SLOTS = {
    "estimator": ("estimators", True),
    "preprocessor": ("preprocessors", False),
    "metric_fn": ("metric_fns", True),
    "metric_var": ("metric_vars", True),
    "read_fn": ("read_fns", False),
    "split_fn": ("split_fns", False),
}


def parse_vocabulary(text: str) -> Vocabulary:
    vocab = Vocabulary()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"vocabulary line {lineno}: expected 3 tab-separated fields")
        kind, pattern, display = (p.strip() for p in parts)
        if kind not in _KIND_SLOTS:
            raise ValueError(f"vocabulary line {lineno}: unknown kind {kind!r}")
        slot, has_display = _KIND_SLOTS[kind]
        target = getattr(vocab, slot)
        if has_display:
            target[pattern] = display if display != "-" else pattern
        else:
            target.add(pattern)
    return vocab


_cached: Vocabulary | None = None


def load_vocabulary() -> Vocabulary:
    global _cached
    if _cached is None:
        text = resources.files("snapcards").joinpath("data/vocabulary.tsv").read_text("utf-8")
        _cached = parse_vocabulary(text)
    return _cached
