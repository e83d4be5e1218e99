"""Hand-rolled SVG rendering of segmentations as horizontal color bars.

One row per labeling (ground truth first, then predictions), one rectangle
per maximal run of equal labels, the same fill color for the same label id
in every row, and a legend mapping colors to label names. The output is
plain SVG text with no plotting dependency.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .types import Segmentation

# 20 distinguishable fills; label ids beyond the palette wrap around.
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

_BAR_WIDTH = 640
_BAR_HEIGHT = 28
_ROW_GAP = 12
_LEFT_MARGIN = 130
_LEGEND_COLS = 5
_LEGEND_COL_WIDTH = 128
_LEGEND_ROW_HEIGHT = 22


def _color(label: int) -> str:
    return PALETTE[int(label) % len(PALETTE)]


def _as_labels(row: "Segmentation | np.ndarray") -> np.ndarray:
    if isinstance(row, Segmentation):
        return row.labels
    return np.asarray(row, dtype=np.intp)


def _row_rects(labels: np.ndarray) -> list[str]:
    runs = Segmentation(sequence_id="row", labels=labels).segments
    n = labels.shape[0]
    rects = []
    for run in runs:
        x = run.start / n * _BAR_WIDTH
        w = run.length / n * _BAR_WIDTH
        rects.append(
            f'<rect class="seg" x="{x:.2f}" y="0" width="{w:.2f}" '
            f'height="{_BAR_HEIGHT}" fill="{_color(run.label)}"/>'
        )
    return rects


def render_svg(
    rows: Sequence[tuple[str, np.ndarray]],
    label_names: Sequence[str] | None = None,
) -> str:
    """Build the SVG document for named label rows (all equal length)."""
    if not rows:
        raise ValueError("need at least one row to plot")
    lengths = {labels.shape[0] for _, labels in rows}
    if len(lengths) != 1:
        raise ValueError(f"all rows must have the same frame count, got {sorted(lengths)}")

    used = sorted({int(v) for _, labels in rows for v in np.unique(labels)})
    legend_rows = (len(used) + _LEGEND_COLS - 1) // _LEGEND_COLS
    rows_height = len(rows) * (_BAR_HEIGHT + _ROW_GAP)
    height = rows_height + 14 + legend_rows * _LEGEND_ROW_HEIGHT + 8
    width = _LEFT_MARGIN + _BAR_WIDTH + 10

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<style>text { font-family: sans-serif; font-size: 12px; }</style>",
    ]
    for i, (title, labels) in enumerate(rows):
        y = i * (_BAR_HEIGHT + _ROW_GAP)
        parts.append(
            f'<text x="{_LEFT_MARGIN - 8}" y="{y + _BAR_HEIGHT / 2 + 4:.0f}" '
            f'text-anchor="end">{title}</text>'
        )
        parts.append(f'<g class="row" transform="translate({_LEFT_MARGIN},{y})">')
        parts.extend(_row_rects(labels))
        parts.append("</g>")
    for pos, value in enumerate(used):
        col, row = pos % _LEGEND_COLS, pos // _LEGEND_COLS
        x = _LEFT_MARGIN + col * _LEGEND_COL_WIDTH
        y = rows_height + 10 + row * _LEGEND_ROW_HEIGHT
        if label_names is not None and 0 <= value < len(label_names):
            name = label_names[value]
        else:
            name = str(value)
        parts.append(
            f'<g class="legend"><rect class="key" x="{x}" y="{y}" width="14" height="14" '
            f'fill="{_color(value)}"/><text x="{x + 20}" y="{y + 12}">{name}</text></g>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_segmentation(
    gt: np.ndarray,
    predictions: Sequence["Segmentation | np.ndarray"],
    out_path: "str | Path",
    label_names: Sequence[str] | None = None,
) -> Path:
    """Write the ground-truth row plus one row per prediction to out_path.

    An empty predictions list yields a ground-truth-only plot. Rows share
    one color per label id; no semantic alignment between prediction
    cluster ids and ground-truth label ids is attempted here.
    """
    rows: list[tuple[str, np.ndarray]] = [("ground truth", _as_labels(gt))]
    for i, pred in enumerate(predictions):
        title = "prediction" if len(predictions) == 1 else f"prediction {i + 1}"
        rows.append((title, _as_labels(pred)))
    out_path = Path(out_path)
    out_path.write_text(render_svg(rows, label_names=label_names))
    return out_path
