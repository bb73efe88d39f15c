"""Per-column statistics for the side panel: histograms, counts, moments."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .frame import TabularFrame
from .values import format_value, is_missing

HISTOGRAM_BINS = 10


@dataclass
class ColumnStats:
    """Statistics over one column of one version.

    Numeric columns carry equal-width histogram bins plus mean/median/std
    (population); categorical, boolean, and text columns carry per-category
    counts. The bin or category counts plus missing_count always sum to the
    row count.
    """

    column: str
    dtype: str
    row_count: int
    missing_count: int
    bins: list[tuple[float, float, int]] = field(default_factory=list)
    mean: float | None = None
    median: float | None = None
    std: float | None = None
    categories: dict[str, int] = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        out = {
            "column": self.column,
            "dtype": self.dtype,
            "row_count": self.row_count,
            "missing_count": self.missing_count,
        }
        if self.dtype == "numeric":
            out["bins"] = [[lo, hi, n] for lo, hi, n in self.bins]
            out["mean"] = self.mean
            out["median"] = self.median
            out["std"] = self.std
        else:
            out["categories"] = self.categories
        return out


def numeric_histogram(values: list[float]) -> list[tuple[float, float, int]]:
    """Ten equal-width bins over [min, max]; a single-valued column gets one bin.

    Bins are half-open [lo, hi) except the last, which includes the max.
    """
    if not values:
        return []
    lo, hi = min(values), max(values)
    if lo == hi:
        return [(lo, hi, len(values))]
    width = (hi - lo) / HISTOGRAM_BINS
    counts = [0] * HISTOGRAM_BINS
    for v in values:
        idx = int((v - lo) / width)
        if idx >= HISTOGRAM_BINS:
            idx = HISTOGRAM_BINS - 1
        counts[idx] += 1
    return [(lo + i * width, lo + (i + 1) * width, counts[i]) for i in range(HISTOGRAM_BINS)]


def compute_column_stats(frame: TabularFrame, column: str) -> ColumnStats:
    descriptor = frame.descriptor(column)
    values = frame.column_values(column)
    missing = sum(1 for v in values if is_missing(v))
    present = [v for v in values if not is_missing(v)]

    if descriptor.dtype == "numeric":
        nums = [float(v) for v in present]
        return ColumnStats(
            column=column,
            dtype=descriptor.dtype,
            row_count=len(values),
            missing_count=missing,
            bins=numeric_histogram(nums),
            mean=statistics.fmean(nums) if nums else None,
            median=statistics.median(nums) if nums else None,
            std=statistics.pstdev(nums) if nums else None,
        )

    counts: dict[str, int] = {}
    for v in present:
        key = format_value(v)
        counts[key] = counts.get(key, 0) + 1
    return ColumnStats(
        column=column,
        dtype=descriptor.dtype,
        row_count=len(values),
        missing_count=missing,
        categories=counts,
    )
