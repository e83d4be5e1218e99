from __future__ import annotations

import re

import numpy as np
import pytest

from coocseg.plot import PALETTE, plot_segmentation, render_svg
from coocseg.types import Segmentation


def _seg_rects(svg: str) -> list[str]:
    return re.findall(r'<rect class="seg"[^>]*/>', svg)


def test_alternating_labels_make_one_rect_per_run():
    svg = render_svg([("row", np.array([0, 1, 0, 1]))])
    assert len(_seg_rects(svg)) == 4


def test_constant_row_is_single_rect():
    svg = render_svg([("row", np.array([3, 3, 3, 3, 3]))])
    rects = _seg_rects(svg)
    assert len(rects) == 1
    assert 'width="640.00"' in rects[0]


def test_identical_rows_render_identical_rects():
    labels = np.array([0, 0, 1, 2, 2, 2])
    svg = render_svg([("a", labels), ("b", labels.copy())])
    groups = re.findall(r'<g class="row"[^>]*>(.*?)</g>', svg, flags=re.S)
    assert len(groups) == 2
    assert groups[0] == groups[1]


def test_rect_widths_are_proportional():
    svg = render_svg([("row", np.array([0, 0, 0, 1]))])
    seg_widths = [
        float(re.search(r'width="([\d.]+)"', rect).group(1)) for rect in _seg_rects(svg)
    ]
    assert seg_widths[0] == pytest.approx(480.0)
    assert seg_widths[1] == pytest.approx(160.0)


def test_legend_lists_distinct_labels_with_names():
    svg = render_svg(
        [("row", np.array([0, 2, 2, 5]))], label_names=("zero", "one", "two")
    )
    legends = re.findall(r'<g class="legend">.*?</g>', svg)
    assert len(legends) == 3
    assert ">zero<" in svg and ">two<" in svg
    assert ">5<" in svg  # no name available, falls back to the id


def test_colors_cycle_through_palette():
    labels = np.arange(len(PALETTE) + 2)
    svg = render_svg([("row", labels)])
    assert svg.count(PALETTE[0]) >= 2  # label 0 and label len(PALETTE) share a color
    assert svg.count(PALETTE[1]) >= 2


def test_mismatched_row_lengths_raise():
    with pytest.raises(ValueError, match="same frame count"):
        render_svg([("a", np.array([0, 1])), ("b", np.array([0, 1, 2]))])
    with pytest.raises(ValueError, match="at least one row"):
        render_svg([])


def test_plot_segmentation_writes_file(tmp_path):
    gt = np.array([0, 0, 1, 1])
    pred = Segmentation(sequence_id="v", labels=np.array([0, 1, 1, 1]))
    out = plot_segmentation(gt, [pred], tmp_path / "plot.svg")
    text = out.read_text()
    assert text.startswith("<svg ")
    assert text.endswith("</svg>\n")
    assert ">ground truth<" in text
    assert ">prediction<" in text


def test_plot_segmentation_titles_multiple_predictions(tmp_path):
    gt = np.array([0, 1])
    preds = [np.array([0, 0]), np.array([1, 1])]
    text = plot_segmentation(gt, preds, tmp_path / "p.svg").read_text()
    assert ">prediction 1<" in text
    assert ">prediction 2<" in text


def test_plot_segmentation_without_predictions(tmp_path):
    text = plot_segmentation(np.array([0, 1, 1]), [], tmp_path / "p.svg").read_text()
    assert ">ground truth<" in text
    assert "prediction" not in text
