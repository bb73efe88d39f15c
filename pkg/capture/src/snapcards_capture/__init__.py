"""Kernel-side capture client for the snapcards sync service."""

from .client import CaptureClient, collect_scalars, is_tabular, serialize_frame
from .hook import register

__all__ = ["CaptureClient", "collect_scalars", "is_tabular", "serialize_frame", "register"]
