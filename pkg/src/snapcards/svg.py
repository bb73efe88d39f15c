"""Standalone SVG rendering of a SnapGrid with the six-state legend."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .snapgrid import CellState, SnapGrid, display_value

CELL_W = 96
CELL_H = 34
HEADER_H = 46
LABEL_W = 64
LEGEND_H = 26
PAD = 10

# Fill and border per state: gray unchanged, blue modified, purple added,
# red border removed, gray border not present, yellow border query match.
STATE_STYLE = {
    CellState.UNCHANGED: ("#d9d9d9", "#b5b5b5"),
    CellState.MODIFIED: ("#7ba3e0", "#4a78c2"),
    CellState.ADDED: ("#c3a7e0", "#9467bd"),
    CellState.REMOVED: ("#ffffff", "#d64545"),
    CellState.NOT_PRESENT: ("#ffffff", "#9e9e9e"),
    CellState.QUERY_MATCH: ("#d9d9d9", "#e8c227"),
}

LEGEND_ORDER = [
    (CellState.UNCHANGED, "unchanged"),
    (CellState.MODIFIED, "modified"),
    (CellState.ADDED, "added"),
    (CellState.REMOVED, "removed"),
    (CellState.NOT_PRESENT, "not present"),
    (CellState.QUERY_MATCH, "query match"),
]


def _cell_text(cell) -> str:
    if cell.state == CellState.MODIFIED:
        return f"{display_value(cell.old)} → {display_value(cell.new)}"
    if cell.state == CellState.REMOVED:
        return display_value(cell.old)
    if cell.state == CellState.NOT_PRESENT:
        return ""
    return display_value(cell.new if cell.has_new else cell.old)


def render_svg(grid: SnapGrid, title: str = "") -> str:
    cols = grid.spec.selected_columns
    rows = grid.spec.selected_row_ids
    width = LABEL_W + max(1, len(cols)) * CELL_W + 2 * PAD
    height = HEADER_H + max(1, len(rows)) * CELL_H + LEGEND_H + 3 * PAD
    overflow = grid.overflow_counts()
    boxed_sources = {src for src, _ in grid.spec.relationship_boxes}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(f'<text x="{PAD}" y="14" font-size="12">{escape(title)}</text>')

    for j, col in enumerate(cols):
        x = PAD + LABEL_W + j * CELL_W
        label = col if len(col) <= 14 else col[:13] + "…"
        parts.append(
            f'<text x="{x + CELL_W / 2:.0f}" y="{HEADER_H - 18}" text-anchor="middle" '
            f'font-weight="bold">{escape(label)}</text>'
        )
        if col in overflow:
            parts.append(
                f'<text x="{x + CELL_W / 2:.0f}" y="{HEADER_H - 5}" text-anchor="middle" '
                f'fill="#4a78c2">{overflow[col]} changed</text>'
            )
        if col in boxed_sources:
            parts.append(
                f'<rect x="{x - 2}" y="{HEADER_H - 34}" width="{CELL_W + 4}" '
                f'height="{len(rows) * CELL_H + 38}" fill="none" stroke="#c3a7e0" '
                f'stroke-width="3" rx="4"/>'
            )

    for i, rid in enumerate(rows):
        y = HEADER_H + PAD + i * CELL_H
        parts.append(
            f'<text x="{PAD + LABEL_W - 8}" y="{y + CELL_H / 2 + 4:.0f}" '
            f'text-anchor="end">{rid}</text>'
        )
        for j, _col in enumerate(cols):
            cell = grid.cells[i][j]
            fill, border = STATE_STYLE[cell.state]
            x = PAD + LABEL_W + j * CELL_W
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL_W - 4}" height="{CELL_H - 4}" '
                f'fill="{fill}" stroke="{border}" stroke-width="2" rx="3" '
                f'data-state="{cell.state.value}"/>'
            )
            text = _cell_text(cell)
            if text:
                parts.append(
                    f'<text x="{x + (CELL_W - 4) / 2:.0f}" y="{y + CELL_H / 2 + 3:.0f}" '
                    f'text-anchor="middle">{escape(text)}</text>'
                )

    legend_y = HEADER_H + PAD * 2 + max(1, len(rows)) * CELL_H
    x = PAD
    for state, label in LEGEND_ORDER:
        fill, border = STATE_STYLE[state]
        parts.append(
            f'<rect x="{x}" y="{legend_y}" width="14" height="14" fill="{fill}" '
            f'stroke="{border}" stroke-width="2" data-legend="{state.value}"/>'
        )
        parts.append(f'<text x="{x + 18}" y="{legend_y + 11}">{escape(label)}</text>')
        x += 18 + 7 * len(label) + 16
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
