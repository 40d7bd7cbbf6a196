"""Comandos `ntx` (segment, charges, transfer, compare-seg, batch).

Registrados num Blueprint sem grupo (cli_group=None), então ficam direto em
`app.cli`; o script `ntx` é um FlaskGroup ligado a create_app.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, TypeVar

import click
from flask import Blueprint
from flask.cli import FlaskGroup

from ..charge.models import ChargeError
from ..cube_io.models import CubeFormatError
from ..diagram.models import DiagramError
from ..molecule.models import MoleculeError
from ..segmentation.models import SegmentationError
from ..transfer.models import TransferError
from . import services
from .models import FORMATS, METHODS, SEGMENTATIONS, RunConfig, parse_tp

cli_bp = Blueprint("ntx", __name__, cli_group=None)

DOMAIN_ERRORS = (
    CubeFormatError,
    MoleculeError,
    SegmentationError,
    ChargeError,
    TransferError,
    DiagramError,
    services.ValidationError,
    OSError,
)

T = TypeVar("T")


def _run(func: Callable[..., T], *args) -> T:
    try:
        return func(*args)
    except DOMAIN_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc


def _formats(value: str) -> tuple[str, ...]:
    return tuple(f.strip() for f in value.split(",") if f.strip())


def _colors(values: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for item in values:
        name, sep, color = item.partition("=")
        if not sep or not name.strip() or not color.strip():
            raise click.BadParameter(f"use NOME=#rrggbb, recebido {item!r}", param_hint="--color")
        out[name.strip()] = color.strip()
    return out


def _tp(value: str | None) -> tuple[float, ...] | None:
    try:
        return parse_tp(value)
    except (ValueError, OSError, TypeError) as exc:
        raise click.BadParameter(str(exc), param_hint="--tp") from exc


def cube_options(func):
    for option in reversed(
        [
            click.option("--hole", type=click.Path(path_type=Path), help="Cube do NTO buraco."),
            click.option(
                "--particle", type=click.Path(path_type=Path), help="Cube do NTO partícula."
            ),
            click.option(
                "--groups", type=click.Path(path_type=Path), help="JSON de subgrupos."
            ),
            click.option(
                "--out",
                type=click.Path(path_type=Path),
                default=Path("out"),
                show_default=True,
                help="Diretório de saída.",
            ),
            click.option(
                "--format",
                "formats",
                default=",".join(FORMATS),
                show_default=True,
                help="Subconjunto de csv,json,svg.",
            ),
        ]
    ):
        func = option(func)
    return func


def diagram_options(func):
    for option in reversed(
        [
            click.option(
                "--method", type=click.Choice(METHODS), default="both", show_default=True
            ),
            click.option("--tp", default=None, help="Preferência t_p: 'a,b,...' ou arquivo JSON."),
            click.option("--width", type=float, default=None, help="Largura do SVG (px)."),
            click.option("--height", type=float, default=None, help="Altura do SVG (px)."),
            click.option(
                "--epsilon", type=float, default=None, help="Limite (p.p.) para desenhar fitas."
            ),
            click.option("--color", "color", multiple=True, help="Cor de subgrupo NOME=#rrggbb."),
        ]
    ):
        func = option(func)
    return func


@cli_bp.cli.command("segment")
@cube_options
@click.option("--seg", type=click.Choice(SEGMENTATIONS), default="power", show_default=True)
def segment_command(hole, particle, groups, out, formats, seg):
    """Segmenta o volume e grava cubes de rótulos e contagens de voxels."""
    cfg = RunConfig(
        hole=hole, particle=particle, groups=groups, out=out, formats=_formats(formats), seg=seg
    )
    result = _run(services.cmd_segment, cfg)
    for path in result["files"]:
        click.echo(str(path))


@cli_bp.cli.command("charges")
@cube_options
@click.option("--seg", type=click.Choice(SEGMENTATIONS), default="power", show_default=True)
def charges_command(hole, particle, groups, out, formats, seg):
    """Cargas por átomo e por subgrupo (CSV/JSON)."""
    cfg = RunConfig(
        hole=hole, particle=particle, groups=groups, out=out, formats=_formats(formats), seg=seg
    )
    tables = _run(services.cmd_charges, cfg)
    for method, table in tables.items():
        total_h, total_p = table.totals
        click.echo(f"{method}: total hole {total_h:.6f}, total particle {total_p:.6f}")


@cli_bp.cli.command("transfer")
@cube_options
@diagram_options
@click.option("--seg", type=click.Choice(["power", "gradient"]), default="power")
@click.option(
    "--charges",
    type=click.Path(path_type=Path),
    default=None,
    help="JSON de cargas de subgrupo (dispensa os cubes).",
)
def transfer_command(
    hole, particle, groups, out, formats, method, tp, width, height, epsilon, color, seg, charges
):
    """Matriz de transferência, JSON e diagramas de transição."""
    cfg = RunConfig(
        hole=hole,
        particle=particle,
        groups=groups,
        out=out,
        formats=_formats(formats),
        method=method,
        tp=_tp(tp),
        seg=seg,
        charges=charges,
        colors=_colors(color),
        width=width,
        height=height,
        epsilon=epsilon,
    )
    for result in _run(services.cmd_transfer, cfg):
        summary = result.summary_percent()
        flag = " (local excitation only)" if result.local_excitation_only else ""
        click.echo(
            f"{result.method}: LE {summary['local_excitation']:.1f}% "
            f"CT {summary['charge_transfer']:.1f}%{flag}"
        )


@cli_bp.cli.command("compare-seg")
@cube_options
def compare_seg_command(hole, particle, groups, out, formats):
    """Compara cargas de subgrupo: diagrama de potência x subida de gradiente."""
    cfg = RunConfig(
        hole=hole, particle=particle, groups=groups, out=out, formats=_formats(formats), seg="both"
    )
    report = _run(services.cmd_compare_seg, cfg)
    click.echo(services.reports.compare_text(report), nl=False)


def _load_manifest(path: Path, defaults: dict) -> list[RunConfig]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"{path}: manifesto inválido: {exc}") from exc
    if isinstance(data, dict):
        defaults = {**defaults, **(data.get("defaults") or {})}
        data = data.get("items")
    if not isinstance(data, list):
        raise click.ClickException(f"{path}: esperado lista de itens ou {{'items': [...]}}")
    base = path.parent
    shared = RunConfig.from_mapping(defaults, base=base)
    configs = []
    for item in data:
        cfg = RunConfig.from_mapping(item, base=base, **_shared_values(shared))
        configs.append(cfg)
    return configs


def _shared_values(cfg: RunConfig) -> dict:
    return {
        "method": cfg.method,
        "seg": cfg.seg,
        "formats": cfg.formats,
        "tp": cfg.tp,
        "colors": dict(cfg.colors),
        "width": cfg.width,
        "height": cfg.height,
        "epsilon": cfg.epsilon,
    }


@cli_bp.cli.command("batch")
@click.argument("manifest", required=False, type=click.Path(path_type=Path))
@click.option(
    "--charges",
    "charges",
    multiple=True,
    type=click.Path(path_type=Path),
    help="JSON de cargas de subgrupo (um item por arquivo).",
)
@click.option("--out", type=click.Path(path_type=Path), default=Path("out"), show_default=True)
@diagram_options
@click.option("--format", "formats", default=",".join(FORMATS), show_default=True)
@click.pass_context
def batch_command(ctx, manifest, charges, out, method, tp, width, height, epsilon, color, formats):
    """Série de moléculas: um diretório por item e batch_summary.json."""
    defaults = {
        "method": method,
        "formats": list(_formats(formats)),
        "colors": _colors(color),
    }
    if tp:
        defaults["tp"] = list(_tp(tp) or ())
    for key, value in (("width", width), ("height", height), ("epsilon", epsilon)):
        if value is not None:
            defaults[key] = value
    configs: list[RunConfig] = []
    if manifest is not None:
        configs.extend(_load_manifest(manifest, defaults))
    shared = RunConfig.from_mapping(defaults)
    for path in charges:
        configs.append(RunConfig(charges=path, **_shared_values(shared)))
    summary = _run(services.cmd_batch, configs, out)
    for item in summary["items"]:
        line = f"{item['name']}: {item['status']}"
        if item.get("error"):
            line += f" ({item['error']})"
        click.echo(line)
    if summary["failed"]:
        ctx.exit(1)


def main() -> None:
    from .. import create_app

    group = FlaskGroup(
        name="ntx",
        help="Análise de transições eletrônicas a partir de cubes NTO.",
        create_app=lambda: create_app(),
        add_default_commands=False,
        add_version_option=False,
        load_dotenv=False,
        set_debug_flag=False,
    )
    group.main(prog_name="ntx")
