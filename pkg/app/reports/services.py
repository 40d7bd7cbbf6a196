"""Relatórios: exportação CSV/JSON de cargas e transferências, comparação de
segmentações e resumo de lote.

Funções puras que devolvem dicts/str; a escrita em disco fica com a CLI.
"""

from __future__ import annotations

import csv
import io
import json
from os import PathLike
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..charge.models import ChargeError, ChargeTable
from ..charge.services import normalize_percent, table_from_subgroups
from ..molecule.models import MoleculeSpec
from ..molecule.radii import symbol
from ..transfer.models import TransferResult

CSV_COLUMNS = (
    "kind",
    "index",
    "name",
    "element",
    "subgroup",
    "hole",
    "particle",
    "diff",
    "hole_percent",
    "particle_percent",
    "diff_percent",
)


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _pct(table: ChargeTable) -> ChargeTable | None:
    try:
        return normalize_percent(table)
    except ChargeError:
        return None


def charges_json(table: ChargeTable, m: MoleculeSpec | None = None) -> dict[str, Any]:
    pct = _pct(table)
    atoms = []
    for i in range(table.n_atoms):
        row: dict[str, Any] = {
            "index": i,
            "hole": float(table.per_atom_hole[i]),
            "particle": float(table.per_atom_particle[i]),
            "diff": float(table.per_atom_diff[i]),
        }
        if m is not None:
            row["element"] = symbol(m.atoms[i].element)
            row["subgroup"] = m.names[int(m.atom_subgroups[i])]
        if pct is not None:
            row["hole_percent"] = float(pct.per_atom_hole[i])
            row["particle_percent"] = float(pct.per_atom_particle[i])
            row["diff_percent"] = float(pct.per_atom_diff[i])
        atoms.append(row)
    groups = []
    for j, name in enumerate(table.names):
        row = {
            "name": name,
            "members": list(table.groups[j]),
            "hole": float(table.per_subgroup_hole[j]),
            "particle": float(table.per_subgroup_particle[j]),
            "diff": float(table.per_subgroup_diff[j]),
        }
        if pct is not None:
            row["hole_percent"] = float(pct.per_subgroup_hole[j])
            row["particle_percent"] = float(pct.per_subgroup_particle[j])
            row["diff_percent"] = float(pct.per_subgroup_diff[j])
        groups.append(row)
    total_h, total_p = table.totals
    return {
        "unit": table.unit,
        "totals": {"hole": total_h, "particle": total_p},
        "atoms": atoms,
        "subgroups": groups,
    }


def charges_csv(table: ChargeTable, m: MoleculeSpec | None = None) -> str:
    data = charges_json(table, m)
    out = io.StringIO()
    writer = csv.DictWriter(
        out, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore"
    )
    writer.writeheader()
    for row in data["atoms"]:
        writer.writerow({"kind": "atom", "name": "", **row})
    for j, row in enumerate(data["subgroups"]):
        writer.writerow({"kind": "subgroup", "index": j, "subgroup": row["name"], **row})
    return out.getvalue()


def load_charge_table(data: Mapping[str, Any] | str | bytes) -> ChargeTable:
    """Lê cargas de subgrupo: export charges.json ou tabela publicada.

    Aceita {"unit": "raw"|"percent", "subgroups": [{"name", "hole", "particle"}]};
    sem "unit" os valores são tratados como percentuais.
    """
    if not isinstance(data, Mapping):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ChargeError(
                f"JSON de cargas inválido (linha {exc.lineno}): {exc.msg}"
            ) from None
    groups = data.get("subgroups") if isinstance(data, Mapping) else None
    if not isinstance(groups, list) or not groups:
        raise ChargeError("JSON de cargas sem lista 'subgroups'")
    try:
        names = [str(g["name"]) for g in groups]
        hole = [float(g["hole"]) for g in groups]
        particle = [float(g["particle"]) for g in groups]
    except (KeyError, TypeError, ValueError) as exc:
        raise ChargeError(f"subgrupo incompleto no JSON de cargas: {exc}") from None
    return table_from_subgroups(names, hole, particle, unit=str(data.get("unit", "percent")))


def read_charge_table(path: str | PathLike[str]) -> ChargeTable:
    p = Path(path)
    try:
        return load_charge_table(p.read_bytes())
    except ChargeError as exc:
        raise ChargeError(f"{p}: {exc}") from None


def transfer_json(result: TransferResult) -> dict[str, Any]:
    p = result.partition
    names = list(p.names)
    return {
        "method": result.method,
        "local_excitation_only": result.local_excitation_only,
        "preference": None if result.preference is None else [float(v) for v in result.preference],
        "partition": {
            "donors": [
                {"index": d, "name": names[d], "deficit": float(v)}
                for d, v in zip(p.donors, p.deficits)
            ],
            "acceptors": [
                {"index": a, "name": names[a], "surplus": float(v)}
                for a, v in zip(p.acceptors, p.surpluses)
            ],
            "total": p.total,
            "mismatch": p.mismatch,
        },
        "T": {
            "rows": p.donor_names,
            "columns": p.acceptor_names,
            "values": [[float(v) for v in row] for row in result.T],
        },
        "full_matrix": {
            "names": names,
            "values": [[float(v) for v in row] for row in result.full_matrix],
        },
        "residuals": {k: float(v) for k, v in result.residuals.items()},
        "summary": result.summary_percent(),
    }


def compare_segmentations(
    power: ChargeTable, gradient: ChargeTable, *, threshold: float = 2.0
) -> dict[str, Any]:
    """Compara Q por subgrupo (em %) entre diagrama de potência e gradiente."""
    if tuple(power.names) != tuple(gradient.names):
        raise ChargeError("tabelas com subgrupos diferentes")
    a, b = normalize_percent(power), normalize_percent(gradient)
    rows = []
    exceed = 0
    for j, name in enumerate(a.names):
        row: dict[str, Any] = {"name": name}
        for field, qa, qb in (
            ("hole", a.per_subgroup_hole[j], b.per_subgroup_hole[j]),
            ("particle", a.per_subgroup_particle[j], b.per_subgroup_particle[j]),
        ):
            diff = abs(float(qa) - float(qb))
            flagged = diff > threshold
            exceed += int(flagged)
            row[field] = {
                "power": float(qa),
                "gradient": float(qb),
                "abs_diff": diff,
                "exceeds": flagged,
            }
        rows.append(row)
    return {
        "threshold": threshold,
        "rows": rows,
        "exceed_count": exceed,
        "total_count": 2 * len(rows),
    }


def compare_text(report: Mapping[str, Any]) -> str:
    lines = [
        f"{'subgroup':<12} {'Qh_power':>9} {'Qh_grad':>9} {'|dQh|':>7} "
        f"{'Qp_power':>9} {'Qp_grad':>9} {'|dQp|':>7}"
    ]
    for row in report["rows"]:
        h, p = row["hole"], row["particle"]
        lines.append(
            f"{row['name']:<12} {h['power']:>9.1f} {h['gradient']:>9.1f} "
            f"{h['abs_diff']:>6.1f}{'*' if h['exceeds'] else ' '} "
            f"{p['power']:>9.1f} {p['gradient']:>9.1f} "
            f"{p['abs_diff']:>6.1f}{'*' if p['exceeds'] else ' '}"
        )
    lines.append(
        f"{report['exceed_count']} such cases out of {report['total_count']} "
        f"differ by more than {report['threshold']:g}% (marked *)"
    )
    return "\n".join(lines) + "\n"


def batch_summary(
    items: Sequence[Mapping[str, Any]], colors: Mapping[str, str]
) -> dict[str, Any]:
    failed = [it for it in items if it.get("status") != "ok"]
    return {
        "items": list(items),
        "colors": dict(colors),
        "ok": len(items) - len(failed),
        "failed": len(failed),
    }
