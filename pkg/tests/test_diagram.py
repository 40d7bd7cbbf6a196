import logging
import re

import numpy as np
import pytest

from app.diagram.models import DEFAULT_PALETTE, DiagramError, DiagramOptions
from app.diagram.services import (
    layout_bar_chart,
    layout_transition_diagram,
    render_bar_chart,
    render_svg,
    resolve_colors,
    series_colors,
)
from app.reports.services import read_charge_table
from app.transfer.services import partition_from_table, partition_donors_acceptors, solve

DIMER_FULL = np.array([[10.0, 40.0], [0.0, 50.0]])


def _full(charges_dir, name, method="proportional"):
    table = read_charge_table(charges_dir / f"{name}.json")
    result = solve(partition_from_table(table), method)[0]
    return result.full_matrix, list(table.names)


def _check_spans(d, tol=1e-9):
    opts = d.options
    drawable = opts.width - 2 * opts.margin - opts.gap * (len(d.names) - 1)
    assert sum(b.width for b in d.bottom) == pytest.approx(drawable)
    assert sum(b.width for b in d.top) == pytest.approx(drawable)
    for r in d.connectors:
        src, dst = d.bottom[r.source], d.top[r.target]
        assert src.x - tol <= r.bottom[0] <= r.bottom[1] <= src.x1 + tol
        assert dst.x - tol <= r.top[0] <= r.top[1] <= dst.x1 + tol
    for j, bar in enumerate(d.bottom):
        spans = sum(r.bottom[1] - r.bottom[0] for r in d.connectors if r.source == j)
        assert spans == pytest.approx(bar.width, abs=0.5)
    for j, bar in enumerate(d.top):
        spans = sum(r.top[1] - r.top[0] for r in d.connectors if r.target == j)
        assert spans == pytest.approx(bar.width, abs=0.5)


def test_single_subgroup_is_one_full_width_self_connector():
    d = layout_transition_diagram(np.array([[1.0]]), ["ALL"])
    assert len(d.bottom) == len(d.top) == 1
    assert len(d.connectors) == 1
    r = d.connectors[0]
    assert r.local
    assert r.width == pytest.approx(d.bottom[0].width)
    assert d.caption == "LE 100.0% / CT 0.0%"


def test_tq_state4_layout(charges_dir):
    full, names = _full(charges_dir, "tq_state4")
    d = layout_transition_diagram(full, names)
    assert d.bottom[0].percent == pytest.approx(94.2)
    assert d.top[1].percent == pytest.approx(92.9)
    dominant = max(d.connectors, key=lambda r: r.value)
    assert (names[dominant.source], names[dominant.target]) == ("THIO", "QUIN")
    assert dominant.percent == pytest.approx(87.1)
    assert d.caption == "LE 12.9% / CT 87.1%"
    _check_spans(d)


def test_ribbon_widths_are_proportional(charges_dir):
    full, names = _full(charges_dir, "cpp_state3", "quadratic")
    d = layout_transition_diagram(full, names)
    ratios = [r.width / r.value for r in d.connectors]
    assert max(ratios) == pytest.approx(min(ratios))
    big = max(d.connectors, key=lambda r: r.value)
    for r in d.connectors:
        assert abs(r.width - big.width * r.value / big.value) <= 0.5


@pytest.mark.parametrize("name", ["cpp_state1", "cpp_state3"])
def test_six_subgroups_do_not_overlap(charges_dir, name):
    full, names = _full(charges_dir, name, "quadratic")
    d = layout_transition_diagram(full, names)
    assert len(d.bottom) == 6
    _check_spans(d)
    for bars in (d.bottom, d.top):
        for left, right in zip(bars, bars[1:]):
            assert left.x1 + d.options.gap == pytest.approx(right.x)


def test_spans_follow_subgroup_order():
    full = np.array([[0.2, 0.3, 0.1], [0.0, 0.2, 0.0], [0.0, 0.0, 0.2]])
    d = layout_transition_diagram(full, ["A", "B", "C"])
    from_a = sorted((r for r in d.connectors if r.source == 0), key=lambda r: r.bottom[0])
    assert [r.target for r in from_a] == [0, 1, 2]
    into_b = sorted((r for r in d.connectors if r.target == 1), key=lambda r: r.top[0])
    assert [r.source for r in into_b] == [0, 1]


def test_small_connectors_are_kept_but_not_drawn(caplog):
    caplog.set_level(logging.WARNING, logger="ntx.diagram")
    full = np.array([[49.96, 0.04], [0.0, 50.0]])
    d = layout_transition_diagram(full, ["A", "B"])
    assert len(d.connectors) == 3
    assert [(r.source, r.target) for r in d.suppressed] == [(0, 1)]
    assert "1 connectors below" in caplog.text
    svg = render_svg(d).decode("utf-8")
    assert svg.count("<path ") == 2
    _check_spans(d)
    loose = layout_transition_diagram(full, ["A", "B"], options=DiagramOptions(epsilon=0.0))
    assert not loose.suppressed


def test_layout_errors():
    with pytest.raises(DiagramError, match="negativas"):
        layout_transition_diagram(np.array([[1.0, -0.5], [0.0, 1.0]]), ["A", "B"])
    with pytest.raises(DiagramError, match="nula"):
        layout_transition_diagram(np.zeros((2, 2)), ["A", "B"])
    with pytest.raises(DiagramError, match="incompatível"):
        layout_transition_diagram(np.eye(3), ["A", "B"])
    with pytest.raises(DiagramError, match="insuficiente"):
        layout_transition_diagram(np.eye(3), ["A", "B", "C"], options=DiagramOptions(width=60))


def test_options_validation():
    with pytest.raises(DiagramError):
        DiagramOptions(width=0)
    with pytest.raises(DiagramError):
        DiagramOptions(epsilon=-1)
    with pytest.raises(DiagramError, match="altura"):
        DiagramOptions(height=80)


def test_render_is_deterministic_and_valid_svg():
    d = layout_transition_diagram(DIMER_FULL, ["LEFT", "RIGHT"], ["#1f77b4", "#d62728"])
    first, second = render_svg(d), render_svg(d)
    assert first == second
    text = first.decode("utf-8")
    assert text.startswith('<?xml version="1.0" encoding="UTF-8"')
    assert 'version="1.1"' in text
    assert "LEFT 50.0%" in text and "RIGHT 90.0%" in text
    numbers = re.findall(r'[xy]="(-?\d+\.\d+)"', text)
    assert numbers and all(len(n.split(".")[1]) == 2 for n in numbers)


def test_names_are_escaped():
    d = layout_transition_diagram(np.array([[1.0]]), ["A<&>"])
    assert "A&lt;&amp;&gt;" in render_svg(d).decode("utf-8")


def test_transition_golden(golden):
    d = layout_transition_diagram(
        DIMER_FULL,
        ["LEFT", "RIGHT"],
        ["#1f77b4", "#d62728"],
        DiagramOptions(title="dimer (proportional)"),
    )
    golden("dimer_transition.svg", render_svg(d))


def test_bar_chart_golden(golden):
    golden(
        "dimer_bar_chart.svg",
        render_bar_chart([50.0, 50.0], [10.0, 90.0], ["LEFT", "RIGHT"], ["#1f77b4", "#d62728"]),
    )


def test_bar_chart_single_pair():
    chart = layout_bar_chart([0.7], [0.7], ["ALL"])
    assert len(chart.hole) == len(chart.particle) == 1
    assert chart.hole[0].percent == pytest.approx(100.0)
    assert b"ALL" in render_bar_chart([0.7], [0.7], ["ALL"])


@pytest.mark.parametrize("name", ["cu_phe", "cpp_state1", "tq_state9"])
def test_bar_chart_percent_labels_sum_to_100(charges_dir, name):
    table = read_charge_table(charges_dir / f"{name}.json")
    chart = layout_bar_chart(
        table.per_subgroup_hole, table.per_subgroup_particle, list(table.names)
    )
    for bars in (chart.hole, chart.particle):
        labels = [float(f"{b.percent:.1f}") for b in bars]
        assert sum(labels) == pytest.approx(100.0, abs=0.2)
    assert all(b.y + b.height == pytest.approx(chart.baseline) for b in chart.hole)


def test_bar_chart_errors():
    with pytest.raises(DiagramError, match="tamanhos"):
        layout_bar_chart([1.0], [1.0, 2.0], ["A"])
    with pytest.raises(DiagramError, match="negativas"):
        layout_bar_chart([-1.0, 2.0], [1.0, 1.0], ["A", "B"])
    with pytest.raises(DiagramError, match="nulo"):
        layout_bar_chart([0.0], [1.0], ["A"])


def test_colors_fall_back_to_palette():
    assert resolve_colors(["A", "B", "C"], ["#000000", None]) == (
        "#000000",
        DEFAULT_PALETTE[1],
        DEFAULT_PALETTE[2],
    )


def test_series_colors_are_stable_across_molecules():
    colors = series_colors([["Cu", "PHE1", "PHE2"], ["Ag", "PHE1", "PHE2"]], {"Ag": "#aaaaaa"})
    assert colors["PHE1"] == DEFAULT_PALETTE[1]
    assert colors["Ag"] == "#aaaaaa"
    assert list(colors) == ["Cu", "PHE1", "PHE2", "Ag"]


def test_local_excitation_matrix_draws_only_self_connectors():
    p = partition_donors_acceptors([30.0, 70.0], [30.0, 70.0])
    result = solve(p, "proportional")[0]
    d = layout_transition_diagram(result.full_matrix, ["A", "B"])
    assert all(r.local for r in d.connectors)
    assert d.caption == "LE 100.0% / CT 0.0%"
