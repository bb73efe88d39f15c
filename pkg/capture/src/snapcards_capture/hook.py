"""IPython integration: run the capture client after every cell execution."""

from __future__ import annotations

from .client import CaptureClient


def register(client: CaptureClient, ipython=None) -> CaptureClient:
    """Attach the client to the kernel's post_run_cell event.

    Call from a notebook:

        from snapcards_capture import CaptureClient, register
        register(CaptureClient(base_url="http://127.0.0.1:8000"))
    """
    if ipython is None:
        from IPython import get_ipython

        ipython = get_ipython()
    if ipython is None:
        raise RuntimeError("no running IPython kernel to attach to")

    def _on_post_run_cell(result):
        info = getattr(result, "info", None)
        source = getattr(info, "raw_cell", "") or ""
        count = getattr(result, "execution_count", None) or 0
        cell_id = getattr(info, "cell_id", "") or ""
        client.on_cell_executed(ipython.user_ns, source, count, cell_id=cell_id)

    ipython.events.register("post_run_cell", _on_post_run_cell)
    return client
