"""Diagramas de transição (variante de Sankey) e gráficos de barras em SVG.

Layout em px: barras do buraco embaixo, da partícula em cima, em ordem de
índice de subgrupo. Dentro de cada barra as fitas ocupam faixas em ordem de
índice (destino na barra de baixo, origem na de cima), nunca por magnitude.
Saída determinística: coordenadas com 2 casas, sem timestamps.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from .models import (
    DEFAULT_PALETTE,
    Bar,
    BarChartSpec,
    DiagramError,
    DiagramOptions,
    DiagramSpec,
    Ribbon,
)

logger = logging.getLogger("ntx.diagram")

NEGATIVE_TOL = 1e-9

_env = Environment(
    loader=FileSystemLoader(str(Path(__file__).parent)),
    autoescape=select_autoescape(["svg"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)
_env.filters["px"] = "{:.2f}".format
_env.filters["pct"] = "{:.1f}%".format


def resolve_colors(names: Sequence[str], colors: Sequence[str | None] | None) -> tuple[str, ...]:
    colors = list(colors or [])
    out = []
    for j, _ in enumerate(names):
        chosen = colors[j] if j < len(colors) else None
        out.append(chosen or DEFAULT_PALETTE[j % len(DEFAULT_PALETTE)])
    return tuple(out)


def _bars(values: np.ndarray, names, colors, scale: float, total: float, y: float, opts):
    bars = []
    x = float(opts.margin)
    for j, v in enumerate(values):
        w = float(v) * scale
        bars.append(
            Bar(
                index=j,
                name=names[j],
                color=colors[j],
                x=x,
                y=y,
                width=w,
                height=float(opts.bar_height),
                value=float(v),
                percent=float(v) / total * 100.0,
            )
        )
        x += w + opts.gap
    return tuple(bars)


def layout_transition_diagram(
    full_matrix: np.ndarray,
    names: Sequence[str],
    colors: Sequence[str | None] | None = None,
    options: DiagramOptions | None = None,
) -> DiagramSpec:
    opts = options or DiagramOptions()
    Q = np.asarray(full_matrix, dtype=np.float64)
    size = len(names)
    if Q.shape != (size, size):
        raise DiagramError(f"matriz {Q.shape} incompatível com {size} subgrupos")
    if size == 0:
        raise DiagramError("diagrama sem subgrupos")
    if np.any(Q < -NEGATIVE_TOL):
        raise DiagramError("matriz de transferência com entradas negativas")
    Q = np.clip(Q, 0.0, None)
    total = float(Q.sum())
    if not total > 0:
        raise DiagramError("matriz de transferência nula")
    palette = resolve_colors(names, colors)

    drawable = opts.width - 2 * opts.margin - opts.gap * (size - 1)
    if drawable <= 0:
        raise DiagramError(f"largura {opts.width} insuficiente para {size} barras")
    scale = drawable / total

    y_top = float(opts.margin) + 16.0
    y_bottom = float(opts.height) - opts.margin - 16.0 - opts.bar_height
    hole = Q.sum(axis=1)
    particle = Q.sum(axis=0)
    bottom = _bars(hole, names, palette, scale, total, y_bottom, opts)
    top = _bars(particle, names, palette, scale, total, y_top, opts)

    # cursores de alocação das faixas dentro de cada barra
    cursor_bottom = [b.x for b in bottom]
    cursor_top = [b.x for b in top]
    spans_bottom: dict[tuple[int, int], tuple[float, float]] = {}
    for i in range(size):
        for j in range(size):
            if Q[i, j] > 0:
                w = Q[i, j] * scale
                spans_bottom[(i, j)] = (cursor_bottom[i], cursor_bottom[i] + w)
                cursor_bottom[i] += w
    ribbons = []
    for j in range(size):
        for i in range(size):
            if Q[i, j] > 0:
                w = Q[i, j] * scale
                top_span = (cursor_top[j], cursor_top[j] + w)
                cursor_top[j] += w
                percent = Q[i, j] / total * 100.0
                ribbons.append(
                    Ribbon(
                        source=i,
                        target=j,
                        value=float(Q[i, j]),
                        percent=float(percent),
                        bottom=spans_bottom[(i, j)],
                        top=top_span,
                        y_bottom=y_bottom,
                        y_top=y_top + opts.bar_height,
                        color=palette[i],
                        drawn=percent >= opts.epsilon,
                    )
                )
    # desenho em ordem (origem, destino)
    ribbons.sort(key=lambda r: (r.source, r.target))
    hidden = [r for r in ribbons if not r.drawn]
    if hidden:
        logger.warning(
            "%s connectors below %.2f%% not drawn (kept in data export)", len(hidden), opts.epsilon
        )

    le = float(np.trace(Q)) / total * 100.0
    caption = f"LE {le:.1f}% / CT {100.0 - le:.1f}%"
    return DiagramSpec(
        options=opts,
        names=tuple(names),
        colors=palette,
        bottom=bottom,
        top=top,
        connectors=tuple(ribbons),
        total=total,
        caption=caption,
    )


def render_svg(d: DiagramSpec) -> bytes:
    template = _env.get_template("_transition.svg")
    return template.render(d=d, opts=d.options).encode("utf-8")


def layout_bar_chart(
    hole: Sequence[float] | np.ndarray,
    particle: Sequence[float] | np.ndarray,
    names: Sequence[str],
    colors: Sequence[str | None] | None = None,
    options: DiagramOptions | None = None,
) -> BarChartSpec:
    opts = options or DiagramOptions()
    q_h = np.asarray(hole, dtype=np.float64).ravel()
    q_p = np.asarray(particle, dtype=np.float64).ravel()
    size = len(names)
    if size == 0 or q_h.size != size or q_p.size != size:
        raise DiagramError("cargas e nomes de subgrupos com tamanhos diferentes")
    if np.any(q_h < 0) or np.any(q_p < 0):
        raise DiagramError("cargas negativas")
    total_h, total_p = float(q_h.sum()), float(q_p.sum())
    if not total_h > 0 or not total_p > 0:
        raise DiagramError("cargas com total nulo")
    palette = resolve_colors(names, colors)
    pct_h = q_h / total_h * 100.0
    pct_p = q_p / total_p * 100.0

    baseline = float(opts.height) - opts.margin - 16.0
    plot_top = float(opts.margin) + 16.0
    peak = max(float(pct_h.max()), float(pct_p.max()))
    axis_max = min(100.0, 10.0 * np.ceil(peak / 10.0)) or 10.0
    scale = (baseline - plot_top) / axis_max
    slot = (opts.width - 2 * opts.margin) / size
    bar_w = max(1.0, (slot - opts.gap) / 2.0)

    hole_bars, particle_bars = [], []
    for j in range(size):
        x = opts.margin + j * slot + opts.gap / 2.0
        for values, pct, out, offset in (
            (q_h, pct_h, hole_bars, 0.0),
            (q_p, pct_p, particle_bars, bar_w),
        ):
            h = float(pct[j]) * scale
            out.append(
                Bar(
                    index=j,
                    name=names[j],
                    color=palette[j],
                    x=x + offset,
                    y=baseline - h,
                    width=bar_w,
                    height=h,
                    value=float(values[j]),
                    percent=float(pct[j]),
                )
            )
    ticks = tuple(
        (baseline - v * scale, f"{v:.0f}") for v in np.linspace(0.0, axis_max, 5)
    )
    return BarChartSpec(
        options=opts,
        names=tuple(names),
        colors=palette,
        hole=tuple(hole_bars),
        particle=tuple(particle_bars),
        baseline=baseline,
        ticks=ticks,
    )


def render_bar_chart(
    hole: Sequence[float] | np.ndarray,
    particle: Sequence[float] | np.ndarray,
    names: Sequence[str],
    colors: Sequence[str | None] | None = None,
    options: DiagramOptions | None = None,
) -> bytes:
    spec = layout_bar_chart(hole, particle, names, colors, options)
    return _env.get_template("_bar_chart.svg").render(c=spec, opts=spec.options).encode("utf-8")


def series_colors(
    series: Sequence[Sequence[str]],
    user: dict[str, str] | None = None,
) -> dict[str, str]:
    """Uma cor por nome de subgrupo ao longo de uma série de moléculas.

    Ordem de primeira ocorrência sobre a paleta fixa; cores do usuário têm
    precedência.
    """
    user = dict(user or {})
    out: dict[str, str] = {}
    k = 0
    for names in series:
        for name in names:
            if name in out:
                continue
            if name in user:
                out[name] = user[name]
            else:
                out[name] = DEFAULT_PALETTE[k % len(DEFAULT_PALETTE)]
                k += 1
    return out
