"""Orquestração das etapas (segment, charges, transfer, compare-seg, batch).

Cada comando valida e carrega todas as entradas antes de calcular. Saídas
são arquivos simples no diretório `out` da execução.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from flask import current_app, has_app_context

from ..charge.models import ChargeTable
from ..charge.services import charge_table, density, normalize_percent
from ..cube_io.models import CubeAtomRecord, GridField
from ..cube_io.services import read_cube, save_cube
from ..diagram.models import DiagramOptions
from ..diagram.services import (
    layout_transition_diagram,
    render_bar_chart,
    render_svg,
    series_colors,
)
from ..molecule.models import MoleculeSpec
from ..molecule.services import build_molecule, load_subgroup_config
from ..reports import services as reports
from ..segmentation.gradient_service import segment_gradient_ascent
from ..segmentation.models import LabelVolume
from ..segmentation.services import segment_power_diagram, segment_stats, subgroup_labels
from ..transfer.models import TransferResult
from ..transfer.services import partition_from_table, solve
from ..utils_parallel import resolve_workers
from .models import RunConfig

logger = logging.getLogger("ntx.cli")

_DEFAULTS = {
    "NORMALIZATION_TOLERANCE": 0.05,
    "COMPARE_THRESHOLD_PP": 2.0,
    "TRANSFER_MISMATCH_TOL": 1e-6,
    "QP_KKT_TOL": 1e-10,
    "DIAGRAM_WIDTH": 640,
    "DIAGRAM_HEIGHT": 420,
    "DIAGRAM_GAP": 12,
    "DIAGRAM_EPSILON": 0.1,
}


class ValidationError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def setting(key: str) -> Any:
    if has_app_context():
        return current_app.config.get(key, _DEFAULTS.get(key))
    return _DEFAULTS.get(key)


@dataclass(frozen=True)
class Inputs:
    hole: GridField
    particle: GridField
    atoms: list[CubeAtomRecord]
    molecule: MoleculeSpec


def load_inputs(cfg: RunConfig) -> Inputs:
    """Valida a configuração e lê cubes + grupos (falha antes de qualquer cálculo)."""
    errors = cfg.validate()
    if cfg.from_charges:
        errors.append("esta etapa exige --hole/--particle/--groups, não --charges")
    if errors:
        raise ValidationError(errors)
    hole, atoms = read_cube(cfg.hole)
    particle, atoms_p = read_cube(cfg.particle)
    problems: list[str] = []
    if not hole.same_grid(particle):
        problems.append(
            f"grades diferentes: {cfg.hole} {hole.counts} x {cfg.particle} {particle.counts}"
        )
    if len(atoms) != len(atoms_p):
        problems.append(f"número de átomos diferente: {len(atoms)} x {len(atoms_p)}")
    if problems:
        raise ValidationError(problems)
    molecule = build_molecule(atoms, load_subgroup_config(cfg.groups))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "Loaded %s: grid %s, %s atoms, groups %s",
            cfg.name,
            hole.counts,
            molecule.n_atoms,
            molecule.names,
        )
    return Inputs(hole=hole, particle=particle, atoms=atoms, molecule=molecule)


def _write(path: Path, data: str | bytes) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    return path


def _methods(cfg: RunConfig) -> list[str]:
    return ["power", "gradient"] if cfg.seg == "both" else [cfg.seg]


def segmentations(
    inputs: Inputs, methods: Sequence[str], workers: int | None = None
) -> dict[str, tuple[LabelVolume, LabelVolume]]:
    """Rótulos (buraco, partícula) por método; o diagrama de potência é o mesmo para ambos."""
    out: dict[str, tuple[LabelVolume, LabelVolume]] = {}
    m = inputs.molecule
    for method in methods:
        if method == "power":
            lv = segment_power_diagram(inputs.hole, m, workers=workers)
            out[method] = (lv, lv)
        else:
            out[method] = (
                segment_gradient_ascent(density(inputs.hole), m),
                segment_gradient_ascent(density(inputs.particle), m),
            )
    return out


def cmd_segment(cfg: RunConfig) -> dict[str, Any]:
    inputs = load_inputs(cfg)
    workers = resolve_workers()
    m = inputs.molecule
    files: list[Path] = []
    stats: dict[str, Any] = {"names": m.names}
    for method, (lv_h, lv_p) in segmentations(inputs, _methods(cfg), workers).items():
        if method == "power":
            targets = {"": lv_h}
        else:
            targets = {"_hole": lv_h, "_particle": lv_p}
        for suffix, lv in targets.items():
            tag = f"{method}{suffix}"
            files.append(
                save_cube(cfg.out / f"labels_{tag}.cube", lv.to_field(cfg.name), inputs.atoms)
            )
            merged = subgroup_labels(lv, m)
            files.append(
                save_cube(
                    cfg.out / f"subgroups_{tag}.cube", merged.to_field(cfg.name), inputs.atoms
                )
            )
            stats[tag] = segment_stats(lv, m)
    files.append(_write(cfg.out / "segment_stats.json", reports.dumps(stats)))
    logger.info("Segment %s: wrote %s files to %s", cfg.name, len(files), cfg.out)
    return {"files": files, "stats": stats}


def compute_tables(inputs: Inputs, methods: Sequence[str]) -> dict[str, ChargeTable]:
    workers = resolve_workers()
    tolerance = setting("NORMALIZATION_TOLERANCE")
    tables = {}
    for method, (lv_h, lv_p) in segmentations(inputs, methods, workers).items():
        tables[method] = charge_table(
            inputs.hole,
            inputs.particle,
            lv_h,
            inputs.molecule,
            particle_lv=lv_p if lv_p is not lv_h else None,
            tolerance=tolerance,
            workers=workers,
        )
    return tables


def _write_charges(cfg: RunConfig, table: ChargeTable, m: MoleculeSpec | None, suffix: str):
    files = []
    if "csv" in cfg.formats:
        files.append(_write(cfg.out / f"charges{suffix}.csv", reports.charges_csv(table, m)))
    if "json" in cfg.formats:
        data = reports.charges_json(table, m)
        files.append(_write(cfg.out / f"charges{suffix}.json", reports.dumps(data)))
    return files


def cmd_charges(cfg: RunConfig) -> dict[str, ChargeTable]:
    inputs = load_inputs(cfg)
    tables = compute_tables(inputs, _methods(cfg))
    for method, table in tables.items():
        suffix = "" if method == "power" else f"_{method}"
        _write_charges(cfg, table, inputs.molecule, suffix)
        pct = normalize_percent(table)
        logger.info(
            "Charges %s (%s): %s",
            cfg.name,
            method,
            ", ".join(
                f"{n} {h:.1f}%->{p:.1f}%"
                for n, h, p in zip(pct.names, pct.per_subgroup_hole, pct.per_subgroup_particle)
            ),
        )
    return tables


def _diagram_options(cfg: RunConfig, title: str = "") -> DiagramOptions:
    return DiagramOptions(
        width=cfg.width or setting("DIAGRAM_WIDTH"),
        height=cfg.height or setting("DIAGRAM_HEIGHT"),
        gap=setting("DIAGRAM_GAP"),
        epsilon=setting("DIAGRAM_EPSILON") if cfg.epsilon is None else cfg.epsilon,
        title=title,
    )


def _colors(names: Sequence[str], base: Sequence[str | None], overrides: Mapping[str, str]):
    return [overrides.get(n) or c for n, c in zip(names, base)]


def load_table(cfg: RunConfig) -> tuple[ChargeTable, list[str | None]]:
    """Tabela de cargas de subgrupo (do arquivo --charges ou dos cubes) e cores."""
    if cfg.from_charges:
        errors = cfg.validate(need_cubes=False)
        if errors:
            raise ValidationError(errors)
        table = reports.read_charge_table(cfg.charges)
        return table, [None] * table.n_subgroups
    inputs = load_inputs(cfg)
    method = "gradient" if cfg.seg == "gradient" else "power"
    table = compute_tables(inputs, [method])[method]
    _write_charges(cfg, table, inputs.molecule, "")
    return table, list(inputs.molecule.colors)


def run_transfer(
    cfg: RunConfig, table: ChargeTable, colors: Sequence[str | None]
) -> list[TransferResult]:
    pct = normalize_percent(table)
    partition = partition_from_table(pct)
    results = solve(
        partition,
        cfg.method,
        cfg.tp,
        kkt_tol=setting("QP_KKT_TOL"),
        mismatch_tol=setting("TRANSFER_MISMATCH_TOL"),
    )
    names = list(pct.names)
    palette = _colors(names, colors, cfg.colors)
    for result in results:
        if "json" in cfg.formats:
            data = reports.transfer_json(result)
            _write(cfg.out / f"transfer_{result.method}.json", reports.dumps(data))
        if "svg" in cfg.formats:
            opts = _diagram_options(cfg, title=f"{cfg.name} ({result.method})")
            spec = layout_transition_diagram(result.full_matrix, names, palette, opts)
            _write(cfg.out / f"transition_{result.method}.svg", render_svg(spec))
        summary = result.summary_percent()
        logger.info(
            "Transfer %s (%s): LE %.1f%%, CT %.1f%%%s",
            cfg.name,
            result.method,
            summary["local_excitation"],
            summary["charge_transfer"],
            " [local excitation only]" if result.local_excitation_only else "",
        )
    if "svg" in cfg.formats:
        chart = render_bar_chart(
            pct.per_subgroup_hole,
            pct.per_subgroup_particle,
            names,
            palette,
            _diagram_options(cfg, title=cfg.name),
        )
        _write(cfg.out / "bar_chart.svg", chart)
    return results


def cmd_transfer(cfg: RunConfig) -> list[TransferResult]:
    table, colors = load_table(cfg)
    return run_transfer(cfg, table, colors)


def cmd_compare_seg(cfg: RunConfig) -> dict[str, Any]:
    inputs = load_inputs(cfg)
    tables = compute_tables(inputs, ["power", "gradient"])
    report = reports.compare_segmentations(
        tables["power"], tables["gradient"], threshold=setting("COMPARE_THRESHOLD_PP")
    )
    if "json" in cfg.formats:
        _write(cfg.out / "compare_seg.json", reports.dumps(report))
    _write(cfg.out / "compare_seg.txt", reports.compare_text(report))
    logger.info(
        "Compare %s: %s of %s differences above %s pp",
        cfg.name,
        report["exceed_count"],
        report["total_count"],
        report["threshold"],
    )
    return report


def _item_dirs(configs: Sequence[RunConfig], out: Path) -> list[Path]:
    seen: dict[str, int] = {}
    dirs = []
    for cfg in configs:
        count = seen.get(cfg.name, 0)
        seen[cfg.name] = count + 1
        dirs.append(out / (cfg.name if count == 0 else f"{cfg.name}_{count}"))
    return dirs


def cmd_batch(configs: Sequence[RunConfig], out: Path) -> dict[str, Any]:
    """Série de moléculas: valida e carrega todas, depois calcula item a item.

    Falhas são registradas no resumo e o lote continua.
    """
    if not configs:
        raise ValidationError(["lote vazio: informe ao menos um item"])
    items: list[dict[str, Any]] = []
    loaded: list[tuple[int, RunConfig, ChargeTable, list[str | None]]] = []
    for i, (cfg, item_dir) in enumerate(zip(configs, _item_dirs(configs, out))):
        cfg.out = item_dir
        items.append({"name": cfg.name, "out": str(item_dir), "status": "pending"})
        try:
            table, colors = load_table(cfg)
        except (ValueError, OSError) as exc:
            items[i].update(status="failed", error=str(exc))
            logger.warning("Batch item %s failed during loading: %s", cfg.name, exc)
            continue
        loaded.append((i, cfg, table, colors))

    # cor única por nome de subgrupo ao longo da série
    user: dict[str, str] = {}
    for _, cfg, _, _ in loaded:
        for name, color in cfg.colors.items():
            user.setdefault(name, color)
    for _, _, table, colors in loaded:
        for name, color in zip(table.names, colors):
            if color:
                user.setdefault(name, color)
    palette = series_colors([table.names for _, _, table, _ in loaded], user)

    for i, cfg, table, _ in loaded:
        try:
            results = run_transfer(cfg, table, [palette[n] for n in table.names])
        except (ValueError, OSError) as exc:
            items[i].update(status="failed", error=str(exc))
            logger.warning("Batch item %s failed: %s", cfg.name, exc)
            continue
        items[i].update(
            status="ok",
            subgroups=list(table.names),
            transfers={r.method: reports.transfer_json(r) for r in results},
        )

    summary = reports.batch_summary(items, palette)
    _write(out / "batch_summary.json", reports.dumps(summary))
    logger.info("Batch: %s ok, %s failed", summary["ok"], summary["failed"])
    return summary
